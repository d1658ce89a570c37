"""
Timing the two implementations
==============================

Each mode is run a few times per ring size and summarised by its median.
The command line tool ``ringactors-bench`` does the same and can also
write a CSV file for plotting.
"""

from ringactors.bench import Mode, format_table, measure

rows = []
for n in (256, 512, 1024, 2048):
    for mode in (Mode.CONTROL, Mode.ACTORS, Mode.CHANNELS):
        rows += measure(mode, n, seed=1, repetitions=3)

print(format_table(rows))

# message counts do not depend on timing: a given seed always gives the same total
again = measure(Mode.ACTORS, 1024, seed=1)[0]
first = next(r for r in rows if r.mode == "actors" and r.ring_size == 1024)
assert again.messages == first.messages
