"""Monte Carlo estimation of victory probabilities and the plateau optimizer."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .election import (
    TargetKernel,
    batch_two_round,
    batch_universal,
    build_partition,
    validate_agenda,
)
from .streams import RngSpec, run_blocks

Z95 = 1.96

# stream families; the validation run must never reuse scan electorates
SCAN_FAMILY = 0
VALIDATION_FAMILY = 1


def wilson_interval(successes: int, trials: int, z: float = Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials < 1 or not 0 <= successes <= trials:
        raise ValueError(f"invalid counts: {successes}/{trials}")
    if z <= 0:
        raise ValueError("z must be positive")
    p = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials)) / denom
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == trials else min(1.0, center + half)
    # guard against rounding pushing a bound past the point estimate
    return min(lo, p), max(hi, p)


@dataclass(frozen=True)
class BinomialEstimate:
    successes: int
    trials: int
    z: float = Z95
    wilson_lower: float = field(init=False)
    wilson_upper: float = field(init=False)

    def __post_init__(self):
        lo, hi = wilson_interval(self.successes, self.trials, self.z)
        object.__setattr__(self, "wilson_lower", lo)
        object.__setattr__(self, "wilson_upper", hi)

    @property
    def p_hat(self) -> float:
        return self.successes / self.trials

    @property
    def se(self) -> float:
        """Plain binomial standard error of ``p_hat``."""
        p = self.p_hat
        return math.sqrt(p * (1 - p) / self.trials)

    @property
    def half_width(self) -> float:
        return (self.wilson_upper - self.wilson_lower) / 2

    def as_dict(self) -> dict:
        return {
            "successes": self.successes,
            "trials": self.trials,
            "p_hat": self.p_hat,
            "wilson_lower": self.wilson_lower,
            "wilson_upper": self.wilson_upper,
            "z": self.z,
        }


# above this many candidates the per-row histogram gets too wide to pay off
HISTOGRAM_MAX_N = 1024


def _event(n: int, l: int, universal: bool) -> Callable[[np.ndarray], np.ndarray]:
    if universal:
        return lambda seeds: batch_universal(seeds, n, l)
    part = build_partition(n, l, 1)
    return lambda seeds: batch_two_round(seeds, part) == 1


def _count_successes(n, m, ls, trials, rng, universal, workers):
    """Success counts per width in ``ls``, sharing electorates across widths."""
    if n <= HISTOGRAM_MAX_N:
        kernels = [TargetKernel(n, l) for l in ls]

        def one_block(block, rows):
            hist = TargetKernel.histogram(rng.block_seeds(block, rows, n, m), n)
            ev = [k.universal(hist) if universal else k.wins(hist) for k in kernels]
            return np.array([int(e.sum()) for e in ev], dtype=np.int64)
    else:
        events = [_event(n, l, universal) for l in ls]

        def one_block(block, rows):
            seeds = rng.block_seeds(block, rows, n, m)
            return np.array([int(ev(seeds).sum()) for ev in events], dtype=np.int64)

    parts = run_blocks(one_block, rng.blocks(trials), workers)
    return np.sum(parts, axis=0)


def estimate_p1_discrete(n: int, m: int, l: int, trials: int, rng: RngSpec,
                         z: float = Z95, workers: int | None = None) -> BinomialEstimate:
    """Frequency with which candidate 1 wins under ``A^(1,n,l)``.

    Electorates depend only on ``(rng, trial)``, never on ``l``, so
    estimates at different widths share random numbers.
    """
    validate_agenda(n, l)
    if m < 1:
        raise ValueError("m must be >= 1")
    s = _count_successes(n, m, [l], trials, rng, False, workers)
    return BinomialEstimate(int(s[0]), trials, z)


def estimate_p2_discrete(n: int, m: int, l: int, trials: int, rng: RngSpec,
                         z: float = Z95, workers: int | None = None) -> BinomialEstimate:
    """Frequency of the universal victory event."""
    validate_agenda(n, l)
    if m < 1:
        raise ValueError("m must be >= 1")
    s = _count_successes(n, m, [l], trials, rng, True, workers)
    return BinomialEstimate(int(s[0]), trials, z)


@dataclass(frozen=True)
class PlateauResult:
    l_opt: int
    l_left: int
    l_right: int
    p_validated: BinomialEstimate
    scan: dict = field(repr=False, default_factory=dict)  # l -> BinomialEstimate

    def as_dict(self) -> dict:
        return {
            "l_opt": self.l_opt,
            "l_left": self.l_left,
            "l_right": self.l_right,
            **{f"validated_{k}": v for k, v in self.p_validated.as_dict().items()},
        }


def _scan_grid(l_min: int, l_max: int, n: int) -> tuple[list[int], int]:
    span = l_max - l_min
    if n <= 200 or span <= 512:
        return list(range(l_min, l_max + 1)), 1
    stride = math.ceil(span / 512)
    grid = list(range(l_min, l_max + 1, stride))
    if grid[-1] != l_max:
        grid.append(l_max)
    return grid, stride


def wilson_centroid_optimize(n: int, m: int, l_min: int | None = None,
                             l_max: int | None = None, scan_trials: int = 10_000,
                             validation_trials: int = 100_000, z: float = Z95,
                             rng: RngSpec | None = None, universal: bool = False,
                             workers: int | None = None) -> PlateauResult:
    """Locate the optimal width as the centre of the Wilson plateau.

    1. estimate p(l) across the width range with common random numbers;
    2. take the Wilson lower bound of the best estimate as threshold;
    3. the plateau is the contiguous run of widths around the argmax whose
       estimate reaches that threshold;
    4. ``l_opt`` is its rounded midpoint (half to even);
    5. ``l_opt`` is re-estimated on an independent stream family.

    For large ranges the scan is strided, then filled in densely around the
    best point and across both plateau edges.
    """
    rng = RngSpec(0) if rng is None else rng
    l_min = 2 if l_min is None else l_min
    l_max = n // 2 - 1 if l_max is None else l_max
    if l_min > l_max:
        raise ValueError(f"empty width range {l_min}..{l_max}")
    validate_agenda(n, l_min)
    validate_agenda(n, l_max)
    scan_rng = rng.child(SCAN_FAMILY)
    counts: dict[int, int] = {}

    def evaluate(ls):
        todo = sorted(set(ls) - counts.keys())
        if todo:
            s = _count_successes(n, m, todo, scan_trials, scan_rng, universal, workers)
            counts.update(zip(todo, (int(v) for v in s)))

    grid, stride = _scan_grid(l_min, l_max, n)
    evaluate(grid)
    if stride > 1:
        best = max(counts, key=lambda l: (counts[l], -l))
        evaluate(range(max(l_min, best - stride + 1), min(l_max, best + stride - 1) + 1))

    def plateau():
        ls = sorted(counts)
        # ties on the maximum break toward the smaller width
        i_best = max(range(len(ls)), key=lambda i: (counts[ls[i]], -ls[i]))
        floor = wilson_interval(counts[ls[i_best]], scan_trials, z)[0]
        lo = hi = i_best
        while lo > 0 and counts[ls[lo - 1]] / scan_trials >= floor:
            lo -= 1
        while hi < len(ls) - 1 and counts[ls[hi + 1]] / scan_trials >= floor:
            hi += 1
        return ls, lo, hi

    if stride > 1:
        # fill the gaps just outside each plateau edge until both edges are exact
        while True:
            ls, lo, hi = plateau()
            gaps = []
            if lo > 0 and ls[lo] - ls[lo - 1] > 1:
                gaps.extend(range(ls[lo - 1] + 1, ls[lo]))
            if hi < len(ls) - 1 and ls[hi + 1] - ls[hi] > 1:
                gaps.extend(range(ls[hi] + 1, ls[hi + 1]))
            if not gaps:
                break
            evaluate(gaps)

    ls, lo, hi = plateau()
    l_left, l_right = ls[lo], ls[hi]
    l_opt = round((l_left + l_right) / 2)
    if universal:
        validated = estimate_p2_discrete(n, m, l_opt, validation_trials,
                                         rng.child(VALIDATION_FAMILY), z, workers)
    else:
        validated = estimate_p1_discrete(n, m, l_opt, validation_trials,
                                         rng.child(VALIDATION_FAMILY), z, workers)
    scan = {l: BinomialEstimate(c, scan_trials, z) for l, c in sorted(counts.items())}
    return PlateauResult(l_opt, l_left, l_right, validated, scan)
