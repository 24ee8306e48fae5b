"""Closed lattice paths and their flat-step profiles.

Every trace statistic in this package reduces to counting closed paths
on the integers by the levels of their flat steps.  This script walks
the smallest cases and checks the two closed-form counts against raw
enumeration.
"""

from tracefluct import (
    MultiIndex,
    closed_path_count,
    enumerate_closed_paths,
    profile_count,
    profile_counts,
    same_level_pair_count,
    single_flat_count,
)

print("All closed paths of length 3:")
for p in enumerate_closed_paths(3):
    print(f"  {p}  levels={p.levels()}  profile={p.flat_profile()}")

print("\nPath counts by canonical profile, k = 4:")
for beta, n in sorted(profile_counts(4).items(), key=lambda kv: kv[0].pairs):
    print(f"  {str(beta):8s} -> {n}")
print(f"  total = {closed_path_count(4)} closed paths")

print("\nClosed forms vs enumeration:")
for k in (1, 3, 5, 7, 9, 11):
    enum = profile_count(k, MultiIndex.delta())
    print(f"  single flat, k={k:2d}: enumerated {enum:5d}, closed form {single_flat_count(k):5d}")
for j in (2, 4, 6, 8, 10):
    enum = profile_count(j, MultiIndex.two_delta())
    print(f"  shared pair, j={j:2d}: enumerated {enum:5d}, closed form {same_level_pair_count(j):5d}")

print("\nProfiles with two flats at separated levels (k = 6):")
for s in (1, 2, 3):
    print(f"  separation {s}: {profile_count(6, MultiIndex.delta_pair(s))} paths")
