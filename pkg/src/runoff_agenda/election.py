"""Discrete two-round election with clockwise preference lists.

A voter is fully described by its seed: the first candidate of the
clockwise list ``(s, s+1, ..., n, 1, ..., s-1)``.  Whenever a subset of
candidates stands, the voter backs the first member of that subset met
while walking clockwise from the seed.  Candidates are 1-based throughout.

Two evaluation paths are provided.  The scalar path (``tally``,
``unique_winner``, ``head_to_head``, ``run_two_round``) follows the rules
literally and is used by the brute-force oracles.  The batch path
(``batch_two_round``, ``batch_universal``) evaluates thousands of
electorates at once with numpy and is what the Monte Carlo estimators use.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "DegeneratePartitionError",
    "validate_agenda",
    "SeedVector",
    "Partition",
    "VoteTally",
    "Status",
    "TwoRoundOutcome",
    "build_partition",
    "recruitment_ballot_map",
    "tally",
    "unique_winner",
    "head_to_head",
    "run_two_round",
    "shift_seeds",
    "universal_victory",
    "sample_seeds",
    "exact_p1_bruteforce",
    "exact_p2_bruteforce",
    "batch_two_round",
    "batch_universal",
    "TargetKernel",
    "VOID_A",
    "VOID_B",
    "VOID_FINAL",
]

# Codes returned by the batch kernels in place of a winner id.
VOID_A = -1
VOID_B = -2
VOID_FINAL = -3


class DegeneratePartitionError(ValueError):
    """Raised for (n, l) outside the range where the agenda is meaningful."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SeedVector:
    """Seeds ``s_1..s_m`` of an electorate over candidates ``1..n``."""

    seeds: np.ndarray
    n: int

    def __post_init__(self):
        seeds = np.array(self.seeds, dtype=np.int64).reshape(-1)
        if self.n < 1:
            raise ValueError(f"candidate count must be >= 1, got {self.n}")
        if seeds.size < 1:
            raise ValueError("an electorate needs at least one voter")
        if seeds.min() < 1 or seeds.max() > self.n:
            raise ValueError(f"seeds must lie in 1..{self.n}")
        object.__setattr__(self, "seeds", _readonly(seeds))

    @property
    def m(self) -> int:
        return int(self.seeds.size)

    def __len__(self) -> int:
        return self.m


def validate_agenda(n: int, l: int) -> None:
    if n % 2 or n < 6:
        raise DegeneratePartitionError(
            f"candidate count must be even and >= 6, got n={n}")
    hi = n // 2 - 1
    if not 2 <= l <= hi:
        raise DegeneratePartitionError(
            f"degenerate partition: width l={l} outside valid range 2..{hi} for n={n}")


@dataclass(frozen=True)
class Partition:
    """Agenda ``A^(i,n,l)`` with its complement and precomputed ballot maps.

    ``ballot_map_a[s]`` is the A-candidate that a voter with seed ``s``
    supports (index 0 is unused so that seeds index directly).
    """

    n: int
    l: int
    rotation: int
    members_a: frozenset
    ballot_map_a: np.ndarray = field(repr=False)
    ballot_map_b: np.ndarray = field(repr=False)

    @property
    def members_b(self) -> frozenset:
        return frozenset(range(1, self.n + 1)) - self.members_a

    @property
    def head_a(self) -> int:
        """The target candidate (head of the contiguous block of A)."""
        return self.rotation

    @property
    def head_b(self) -> int:
        """The main challenger, candidate ``l+1`` rotated."""
        return (self.l + self.rotation - 1) % self.n + 1

    def in_a(self, candidate: int) -> bool:
        return candidate in self.members_a


def _rotate(c: int, delta: int, n: int) -> int:
    return (c - 1 + delta) % n + 1


def _next_member_map(members: frozenset, n: int) -> np.ndarray:
    """For every seed, the first member met walking clockwise from it."""
    out = np.zeros(n + 1, dtype=np.int64)
    nxt = 0
    # two backward sweeps so the wrap-around from n to 1 is resolved
    for s in itertools.chain(range(n, 0, -1), range(n, 0, -1)):
        if s in members:
            nxt = s
        out[s] = nxt
    return out


def build_partition(n: int, l: int, i: int = 1) -> Partition:
    """Build the agenda for target ``i``.

    For ``i = 1`` the set A is ``{1..l}`` followed by every other candidate
    ``l+2, l+4, ..., n``; other targets rotate this set by ``i-1``.
    """
    validate_agenda(n, l)
    if not 1 <= i <= n:
        raise ValueError(f"rotation index must lie in 1..{n}, got {i}")
    base = set(range(1, l + 1)) | {l + 2 * k for k in range(1, (n - 2 * l) // 2 + 1)}
    members = frozenset(_rotate(a, i - 1, n) for a in base)
    map_a, map_b = _ballot_maps(members, n)
    return Partition(n, l, i, members, map_a, map_b)


def _ballot_maps(members_a: frozenset, n: int) -> tuple[np.ndarray, np.ndarray]:
    members_b = frozenset(range(1, n + 1)) - members_a
    return (_readonly(_next_member_map(members_a, n)),
            _readonly(_next_member_map(members_b, n)))


def recruitment_ballot_map(partition: Partition) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(ballot_map_a, ballot_map_b)`` indexed by seed ``1..n``.

    A seed votes for ``i`` exactly when it is ``i`` itself or lies in the
    run of opposite-set candidates immediately preceding ``i`` on the cycle.
    """
    return partition.ballot_map_a, partition.ballot_map_b


@dataclass(frozen=True)
class VoteTally:
    counts: dict

    @property
    def total(self) -> int:
        return sum(self.counts.values())


def tally(seeds: SeedVector, ballot_map: np.ndarray) -> VoteTally:
    """Count votes per candidate; every candidate in the map's image is listed."""
    if len(ballot_map) != seeds.n + 1:
        raise ValueError("ballot map and seed vector disagree on n")
    candidates = sorted(set(int(c) for c in ballot_map[1:]))
    counts = dict.fromkeys(candidates, 0)
    for c in ballot_map[seeds.seeds]:
        counts[int(c)] += 1
    return VoteTally(counts)


def unique_winner(t: VoteTally) -> Optional[int]:
    """Candidate with the strictly greatest count, or ``None`` on a tie."""
    if not t.counts:
        raise ValueError("empty tally")
    best = max(t.counts.values())
    leaders = [c for c, v in t.counts.items() if v == best]
    return leaders[0] if len(leaders) == 1 else None


def head_to_head(seeds: SeedVector, first: int, second: int) -> Optional[int]:
    """Final round between two candidates; ``None`` when the vote is level."""
    n = seeds.n
    if first == second or not (1 <= first <= n and 1 <= second <= n):
        raise ValueError("head_to_head needs two distinct candidates in 1..n")
    s = seeds.seeds
    to_first = (first - s) % n < (second - s) % n
    v1 = int(to_first.sum())
    v2 = seeds.m - v1
    if v1 == v2:
        return None
    return first if v1 > v2 else second


class Status(enum.Enum):
    WINNER = "winner"
    VOID_IN_A = "void_in_a"
    VOID_IN_B = "void_in_b"
    VOID_IN_FINAL = "void_in_final"


@dataclass(frozen=True)
class TwoRoundOutcome:
    status: Status
    winner: Optional[int] = None

    @property
    def is_void(self) -> bool:
        return self.status is not Status.WINNER


def run_two_round(seeds: SeedVector, partition: Partition) -> TwoRoundOutcome:
    """Play both rounds; any tie at any stage voids the election."""
    if seeds.n != partition.n:
        raise ValueError("seed vector and partition disagree on n")
    wa = unique_winner(tally(seeds, partition.ballot_map_a))
    wb = unique_winner(tally(seeds, partition.ballot_map_b))
    if wa is None:
        return TwoRoundOutcome(Status.VOID_IN_A)
    if wb is None:
        return TwoRoundOutcome(Status.VOID_IN_B)
    w = head_to_head(seeds, wa, wb)
    if w is None:
        return TwoRoundOutcome(Status.VOID_IN_FINAL)
    return TwoRoundOutcome(Status.WINNER, w)


def shift_seeds(seeds: SeedVector, delta: int) -> SeedVector:
    """Map every seed ``s`` to ``((s - 1 + delta) mod n) + 1``."""
    return SeedVector((seeds.seeds - 1 + delta) % seeds.n + 1, seeds.n)


def universal_victory(seeds: SeedVector, n: int, l: int) -> bool:
    """True iff every candidate wins under its own rotated agenda.

    Candidate ``i`` wins under ``A^(i)`` exactly when candidate 1 wins under
    ``A^(1)`` with all seeds shifted back by ``i-1``, so one partition is
    enough.
    """
    if seeds.n != n:
        raise ValueError("seed vector and n disagree")
    base = build_partition(n, l, 1)
    for delta in range(n):
        out = run_two_round(shift_seeds(seeds, -delta), base)
        if out.winner != 1:
            return False
    return True


def sample_seeds(n: int, m: int, rng: np.random.Generator) -> SeedVector:
    """Draw ``m`` independent uniform seeds over ``1..n``."""
    if n < 1 or m < 1:
        raise ValueError("need n >= 1 and m >= 1")
    return SeedVector(rng.integers(1, n + 1, size=m), n)


def _enumerate_exact(n: int, m: int, predicate, budget: int) -> Fraction:
    if m < 1:
        raise ValueError("enumeration needs m >= 1")
    total = n ** m
    if total > budget:
        raise ValueError(f"enumeration of {n}^{m} = {total} vectors exceeds budget {budget}")
    fact_m = math.factorial(m)
    hits = 0
    # the outcome only depends on the multiset of seeds; weight each
    # multiset by the number of ordered vectors realizing it
    for combo in itertools.combinations_with_replacement(range(1, n + 1), m):
        if predicate(SeedVector(combo, n)):
            weight = fact_m
            for _, grp in itertools.groupby(combo):
                weight //= math.factorial(sum(1 for _ in grp))
            hits += weight
    return Fraction(hits, total)


def exact_p1_bruteforce(n: int, m: int, l: int, budget: int = 10**7) -> Fraction:
    """Exact probability that candidate 1 wins under ``A^(1,n,l)``."""
    part = build_partition(n, l, 1)
    return _enumerate_exact(
        n, m, lambda sv: run_two_round(sv, part).winner == 1, budget)


def exact_p2_bruteforce(n: int, m: int, l: int, budget: int = 10**7) -> Fraction:
    """Exact probability of the universal victory event."""
    validate_agenda(n, l)
    return _enumerate_exact(n, m, lambda sv: universal_victory(sv, n, l), budget)


# ---------------------------------------------------------------------------
# batch kernels


def _first_round(votes: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Plurality winner per row of ``votes`` (shape ``(T, m)``).

    Returns ``(winner, unique)``; ``winner`` is meaningless where
    ``unique`` is False.
    """
    t, m = votes.shape
    if m * m <= 4 * n:
        # few voters, many candidates: count co-voters pairwise
        same = votes[:, :, None] == votes[:, None, :]
        support = same.sum(axis=2)
        top = support.max(axis=1)
        n_top = (support == top[:, None]).sum(axis=1)
        winner = votes[np.arange(t), support.argmax(axis=1)]
        # a unique leader with c votes accounts for exactly c maximal rows
        return winner, n_top == top
    offsets = (np.arange(t, dtype=np.int64) * (n + 1))[:, None]
    counts = np.bincount((votes + offsets).ravel(), minlength=t * (n + 1))
    counts = counts.reshape(t, n + 1)
    top = counts.max(axis=1)
    n_top = (counts == top[:, None]).sum(axis=1)
    return counts.argmax(axis=1), n_top == 1


def batch_two_round(seeds: np.ndarray, partition: Partition) -> np.ndarray:
    """Vectorized ``run_two_round`` over rows of an ``(T, m)`` seed array.

    Returns the winner id per row, or one of ``VOID_A``, ``VOID_B``,
    ``VOID_FINAL``.
    """
    seeds = np.asarray(seeds, dtype=np.int64)
    n = partition.n
    m = seeds.shape[1]
    wa, ua = _first_round(partition.ballot_map_a[seeds], n)
    wb, ub = _first_round(partition.ballot_map_b[seeds], n)
    da = (wa[:, None] - seeds) % n
    db = (wb[:, None] - seeds) % n
    votes_a = (da < db).sum(axis=1)
    twice = 2 * votes_a
    out = np.where(twice > m, wa, wb)
    out = np.where(twice == m, VOID_FINAL, out)
    out = np.where(ub, out, VOID_B)
    out = np.where(ua, out, VOID_A)
    return out


def batch_universal(seeds: np.ndarray, n: int, l: int) -> np.ndarray:
    """Vectorized ``universal_victory``; returns a boolean per row."""
    seeds = np.asarray(seeds, dtype=np.int64)
    base = build_partition(n, l, 1)
    alive = np.arange(seeds.shape[0])
    for delta in range(n):
        if alive.size == 0:
            break
        shifted = (seeds[alive] - 1 - delta) % n + 1
        alive = alive[batch_two_round(shifted, base) == 1]
    ok = np.zeros(seeds.shape[0], dtype=bool)
    ok[alive] = True
    return ok


class TargetKernel:
    """Seed-histogram evaluation of "candidate 1 wins under ``A^(1,n,l)``".

    Both first-round tallies and the final vote for candidate 1 against
    every possible challenger are linear in the seed histogram, so one
    matrix product per block replaces the per-voter work.  Meant for
    moderate ``n``; the histogram has ``n`` columns per electorate.
    """

    def __init__(self, n: int, l: int):
        part = build_partition(n, l, 1)
        self.n = n
        a = sorted(part.members_a)
        b = sorted(part.members_b)
        self._b = np.array(b, dtype=np.int64)
        s = np.arange(1, n + 1)
        va = (part.ballot_map_a[1:, None] == np.array(a)[None, :])
        vb = (part.ballot_map_b[1:, None] == self._b[None, :])
        # closer[s, j]: seed s ranks candidate 1 above challenger b[j]
        closer = (1 - s[:, None]) % n < (self._b[None, :] - s[:, None]) % n
        self._na = len(a)
        self._nb = len(b)
        self._mat = np.hstack([va, vb, closer]).astype(np.float64)

    @staticmethod
    def histogram(seeds: np.ndarray, n: int) -> np.ndarray:
        """Per-row seed counts, column ``c-1`` holding seed ``c``."""
        t = seeds.shape[0]
        offsets = (np.arange(t, dtype=np.int64) * n)[:, None]
        flat = np.bincount((seeds - 1 + offsets).ravel(), minlength=t * n)
        return flat.reshape(t, n).astype(np.float64)

    def wins(self, hist: np.ndarray) -> np.ndarray:
        """Boolean per row of a ``(T, n)`` histogram."""
        m = hist.sum(axis=1)
        prod = hist @ self._mat
        na, nb = self._na, self._nb
        votes_a = prod[:, :na]
        votes_b = prod[:, na:na + nb]
        final = prod[:, na + nb:]
        # candidate 1 is column 0 of the A block
        rivals_a = votes_a[:, 1:].max(axis=1) if na > 1 else np.zeros(len(hist))
        ok_a = votes_a[:, 0] > rivals_a
        top_b = votes_b.max(axis=1)
        ok_b = (votes_b == top_b[:, None]).sum(axis=1) == 1
        jb = votes_b.argmax(axis=1)
        v1 = final[np.arange(len(hist)), jb]
        return ok_a & ok_b & (2 * v1 > m)

    def universal(self, hist: np.ndarray) -> np.ndarray:
        """Universal victory per row: candidate 1 wins every shifted electorate."""
        alive = np.arange(hist.shape[0])
        for delta in range(self.n):
            if alive.size == 0:
                break
            # seeds shifted back by delta: column j takes old column j+delta
            shifted = np.roll(hist[alive], -delta, axis=1)
            alive = alive[self.wins(shifted)]
        ok = np.zeros(hist.shape[0], dtype=bool)
        ok[alive] = True
        return ok
