"""
Telling everyone who won
========================

The bare election only informs the winner. Extended nodes remember the
greatest nominee they have seen, so when the winner sends a declaration
around the ring each node can check it before passing it on.
"""

from ringactors import MemoryTrace, Rng, Runtime, bench_channels, extended_election

trace = MemoryTrace()
with Runtime(trace=trace) as rt:
    outcome = extended_election(rt, 5, Rng(7))

print("winner:", outcome.winner, "at ring index", outcome.winner_index)
for line in outcome.events:
    if "Winner" in line or "Confirmed" in line:
        print("  ", line)

# the same protocol over asyncio queues, with no actor runtime at all;
# a seed places the largest node at the same ring index
lines = []
chan = bench_channels(5, Rng(7), emit=lines.append)
print("channel winner:", chan.winner, "at ring index", chan.winner_index)
print("\n".join("   " + line for line in lines))
