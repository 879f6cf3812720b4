"""Walk through one agenda on six candidates and replay a few elections."""

import numpy as np

from runoff_agenda import build_partition, run_two_round, tally, SeedVector

part = build_partition(6, 2)
print("A =", sorted(part.members_a), " B =", sorted(part.members_b))

# which seeds end up backing each candidate in the two first-round elections
for label, bmap, members in (("A", part.ballot_map_a, part.members_a),
                             ("B", part.ballot_map_b, part.members_b)):
    for c in sorted(members):
        seeds = [s for s in range(1, 7) if bmap[s] == c]
        print(f"  {label}-election: candidate {c} collects seeds {seeds}")

for seeds in ([1, 1, 6, 3, 2], [1, 5, 3, 3, 2], [1, 1, 1]):
    sv = SeedVector(np.array(seeds), 6)
    print(seeds, tally(sv, part.ballot_map_a).counts, tally(sv, part.ballot_map_b).counts,
          "->", run_two_round(sv, part))

# the same set on fourteen candidates, rotated so candidate 2 is the target
print("A(14, 4, 1) =", sorted(build_partition(14, 4, 1).members_a))
print("A(14, 4, 2) =", sorted(build_partition(14, 4, 2).members_a))
