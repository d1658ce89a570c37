"""
Electing a leader on a ring
===========================

Four nodes are spawned, shuffled into a ring and told to start.
Each nominates itself; a nomination survives only while it beats
the identity of the node it reaches.
"""

from ringactors import MemoryTrace, Rng, Runtime, ring_election

trace = MemoryTrace()
rt = Runtime(trace=trace)

ring = ring_election(rt, 4, rng=Rng(2024))
rt.wait_idle(5)

print("ring order:", ", ".join(str(a) for a in ring))
for line in trace.lines:
    print("  ", line)

# exactly one node saw its own nomination come home: the largest
wins = [line for line in trace.lines if line.endswith("I win")]
print(wins, "expected", max(ring))

# every nomination hop is counted by type
print("Nominate messages:", rt.sent["Nominate"])
rt.shutdown()
