"""Closed lattice paths with flat steps and their level profiles.

A path of length ``k`` takes steps from {-1, 0, +1} on the integers,
starting at the origin; it is *closed* when it returns to the origin.
The multiset of levels at which its flat (0) steps occur, shifted so the
lowest occupied level is zero, is the path's *flat profile*, represented
here by :class:`MultiIndex`.  Counting closed paths by profile is the
combinatorial core of everything downstream: trace polynomials of the
tridiagonal operator, exact means, and fluctuation variances.

All counting in this module is exact integer arithmetic.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Mapping

UP = 1
FLAT = 0
DOWN = -1

#: Hard ceiling for exhaustive enumeration.  3**14 candidate step strings
#: (~616k closed paths) is still desk-scale; larger powers are served by
#: closed forms only.
DEFAULT_ENUMERATION_CAP = 14

_STEP_CHARS = {UP: "U", FLAT: "F", DOWN: "D"}


@dataclass(frozen=True)
class MultiIndex:
    """Canonical flat-step level profile.

    ``pairs`` lists ``(level offset, count)`` with strictly increasing
    offsets, every count >= 1, and -- canonically -- smallest offset 0.
    Only the canonical map participates in equality and hashing.  When a
    profile is extracted from a concrete placement, ``iota`` records the
    original minimal support position; it is bookkeeping, not identity.
    """

    pairs: tuple[tuple[int, int], ...]
    iota: int | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        offsets = [h for h, _ in self.pairs]
        if offsets != sorted(set(offsets)):
            raise ValueError("offsets must be strictly increasing")
        if any(c < 1 for _, c in self.pairs):
            raise ValueError("counts must be positive")
        if self.pairs and self.pairs[0][0] != 0:
            raise ValueError("canonical form requires the smallest offset to be 0")

    # -- constructors ---------------------------------------------------

    @classmethod
    def from_counts(cls, counts: Mapping[int, int], iota: int | None = None) -> "MultiIndex":
        """Build from a level -> count mapping, canonicalising the offsets."""
        items = sorted((h, c) for h, c in counts.items() if c > 0)
        if not items:
            return cls((), iota)
        base = items[0][0]
        return cls(
            tuple((h - base, c) for h, c in items),
            base if iota is None else iota,
        )

    @classmethod
    def from_levels(cls, levels) -> "MultiIndex":
        """Build from an iterable of flat-step levels (with multiplicity)."""
        return cls.from_counts(Counter(levels))

    @classmethod
    def zero(cls) -> "MultiIndex":
        return cls(())

    @classmethod
    def delta(cls) -> "MultiIndex":
        """One flat step at a single level."""
        return cls(((0, 1),))

    @classmethod
    def two_delta(cls) -> "MultiIndex":
        """Two flat steps sharing one level."""
        return cls(((0, 2),))

    @classmethod
    def delta_pair(cls, s: int) -> "MultiIndex":
        """One flat step each at two levels separated by ``s`` >= 1."""
        if s < 1:
            raise ValueError("level separation must be >= 1")
        return cls(((0, 1), (s, 1)))

    # -- accessors -------------------------------------------------------

    @property
    def weight(self) -> int:
        """Total flat-step count."""
        return sum(c for _, c in self.pairs)

    @property
    def span(self) -> int:
        """Largest occupied offset (0 for the empty profile)."""
        return self.pairs[-1][0] if self.pairs else 0

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(h for h, _ in self.pairs)

    def count(self, h: int) -> int:
        for off, c in self.pairs:
            if off == h:
                return c
        return 0

    def is_single_level(self) -> bool:
        return len(self.pairs) <= 1

    def placed_at(self, iota: int) -> "MultiIndex":
        return MultiIndex(self.pairs, iota)

    def __str__(self) -> str:
        if not self.pairs:
            return "0"
        return "+".join(f"{h}:{c}" for h, c in self.pairs)


@dataclass(frozen=True)
class LatticePath:
    """Step sequence over {-1, 0, +1}; levels start at the origin."""

    steps: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(s not in (UP, FLAT, DOWN) for s in self.steps):
            raise ValueError("steps must be -1, 0 or +1")

    @property
    def length(self) -> int:
        return len(self.steps)

    def levels(self) -> tuple[int, ...]:
        """The visited levels y_0 .. y_k, y_0 = 0."""
        out = [0]
        y = 0
        for s in self.steps:
            y += s
            out.append(y)
        return tuple(out)

    @property
    def is_closed(self) -> bool:
        return sum(self.steps) == 0

    def flat_levels(self) -> tuple[int, ...]:
        """Level of each flat step, in path order."""
        out = []
        y = 0
        for s in self.steps:
            if s == FLAT:
                out.append(y)
            y += s
        return tuple(out)

    def flat_profile(self) -> MultiIndex:
        """Canonical profile of this path's flat steps."""
        return MultiIndex.from_levels(self.flat_levels())

    def level_range(self) -> int:
        ys = self.levels()
        return max(ys) - min(ys)

    def __str__(self) -> str:
        return "".join(_STEP_CHARS[s] for s in self.steps) or "(empty)"


def flat_profile(path: LatticePath) -> MultiIndex:
    """Canonical flat profile of a closed path."""
    if not path.is_closed:
        raise ValueError("flat profiles are defined for closed paths")
    return path.flat_profile()


def path_range(path: LatticePath) -> int:
    """max level - min level along the path."""
    return path.level_range()


def _check_cap(k: int, cap: int | None) -> None:
    limit = DEFAULT_ENUMERATION_CAP if cap is None else cap
    if k > limit:
        raise ValueError(
            f"enumeration for k={k} exceeds the cap of {limit}; "
            "raise the cap explicitly or use a closed form"
        )


def closed_path_count(k: int) -> int:
    """Number of closed length-k paths: sum over flat counts f of C(k,f)*C(k-f,(k-f)/2)."""
    total = 0
    for f in range(k % 2, k + 1, 2):
        total += math.comb(k, f) * math.comb(k - f, (k - f) // 2)
    return total


def enumerate_closed_paths(k: int, cap: int | None = None) -> Iterator[LatticePath]:
    """Yield every closed path of length k exactly once.

    Depth-first over steps, pruning branches whose current level cannot
    return to the origin within the remaining steps.
    """
    if k < 0:
        raise ValueError("path length must be >= 0")
    _check_cap(k, cap)
    steps: list[int] = []

    def rec(level: int, remaining: int):
        if remaining == 0:
            if level == 0:
                yield LatticePath(tuple(steps))
            return
        for s in (UP, FLAT, DOWN):
            if abs(level + s) <= remaining - 1:
                steps.append(s)
                yield from rec(level + s, remaining - 1)
                steps.pop()

    yield from rec(0, k)


def no_flat_closed_paths(k: int, cap: int | None = None) -> Iterator[LatticePath]:
    """Yield the closed length-k paths without flat steps (empty for odd k)."""
    if k < 0:
        raise ValueError("path length must be >= 0")
    _check_cap(k, cap)
    steps: list[int] = []

    def rec(level: int, remaining: int):
        if remaining == 0:
            if level == 0:
                yield LatticePath(tuple(steps))
            return
        for s in (UP, DOWN):
            if abs(level + s) <= remaining - 1:
                steps.append(s)
                yield from rec(level + s, remaining - 1)
                steps.pop()

    yield from rec(0, k)


@lru_cache(maxsize=None)
def _profile_table(k: int) -> dict[tuple[tuple[int, int], ...], int]:
    """Count closed length-k paths per canonical flat profile (pairs key)."""
    table: dict[tuple[tuple[int, int], ...], int] = {}
    flats: list[int] = []

    def rec(level: int, remaining: int) -> None:
        if remaining == 0:
            if level == 0:
                if flats:
                    cnt = Counter(flats)
                    base = min(cnt)
                    key = tuple(sorted((h - base, c) for h, c in cnt.items()))
                else:
                    key = ()
                table[key] = table.get(key, 0) + 1
            return
        if abs(level + 1) <= remaining - 1:
            rec(level + 1, remaining - 1)
        if abs(level) <= remaining - 1:
            flats.append(level)
            rec(level, remaining - 1)
            flats.pop()
        if abs(level - 1) <= remaining - 1:
            rec(level - 1, remaining - 1)

    rec(0, k)
    return table


def profile_counts(k: int, cap: int | None = None) -> dict[MultiIndex, int]:
    """All canonical profiles of closed length-k paths with their path counts."""
    if k < 0:
        raise ValueError("path length must be >= 0")
    _check_cap(k, cap)
    return {MultiIndex(pairs): n for pairs, n in _profile_table(k).items()}


def profile_count(k: int, beta: MultiIndex, cap: int | None = None) -> int:
    """Number of closed length-k paths whose flat profile is (canonically) ``beta``."""
    _check_cap(k, cap)
    return _profile_table(k).get(beta.pairs, 0)


def single_flat_count(k: int) -> int:
    """Closed k-paths with exactly one flat step: k*C(k-1,(k-1)/2) for odd k, else 0."""
    if k < 1 or k % 2 == 0:
        return 0
    return k * math.comb(k - 1, (k - 1) // 2)


def same_level_pair_count(j: int) -> int:
    """Closed j-paths with two flat steps at one shared level: j*2^(j-3), j even.

    Evaluated exactly (j=2 gives 1).  Odd j is rejected rather than
    silently returning 0 because the closed form only covers even j.
    """
    if j < 2 or j % 2 != 0:
        raise ValueError("the shared-level pair count is defined for even j >= 2")
    return (j * 2**j) // 8


def flat_weight_count(l: int, j: int, cap: int | None = None) -> int:
    """Closed l-paths with exactly j flat steps, summed over all profiles."""
    if not 0 <= j <= l:
        raise ValueError("flat count j must satisfy 0 <= j <= l")
    _check_cap(l, cap)
    return sum(n for pairs, n in _profile_table(l).items()
               if sum(c for _, c in pairs) == j)


def flat_weight_bound(l: int, j: int) -> int:
    """Combinatorial upper bound C(l,j)*C(l-j,(l-j)/2) for :func:`flat_weight_count`."""
    if (l - j) % 2 != 0:
        return 0
    return math.comb(l, j) * math.comb(l - j, (l - j) // 2)


def no_flat_closed_stats(k: int, cap: int | None = None) -> tuple[int, int]:
    """(count, summed level range) over the closed no-flat paths of length k."""
    count = 0
    total_range = 0
    for p in no_flat_closed_paths(k, cap):
        count += 1
        total_range += p.level_range()
    return count, total_range
