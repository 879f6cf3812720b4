"""Continuous limit of the cyclic two-round election.

Voters become i.i.d. uniform points on the circle ``[0, 1)``.  With a
cluster of width ``eta`` the target collects the points of ``(0, eta)``,
its main challenger those of ``(1 - eta, 1)``, and the target wins iff both
arcs hold at least two points and the target's arc holds fewer than
``m / 2``.  Counts follow a multinomial law with cell probabilities
``(eta, eta, 1 - 2 eta)``.
"""

from __future__ import annotations

import math
from contextlib import nullcontext
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import mpmath
import numpy as np
from scipy.special import gammaln

from .estimator import BinomialEstimate, Z95, VALIDATION_FAMILY, SCAN_FAMILY
from .streams import RngSpec, run_blocks

MIN_EXTENDED_DIGITS = 60


class NoFeasibleVictory(ValueError):
    """Every candidate width gives the target zero probability of winning."""


@dataclass(frozen=True)
class ContinuousParams:
    m: int
    eta: float

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if not 0 < self.eta < 0.5:
            raise ValueError(f"eta must lie strictly inside (0, 0.5), got {self.eta}")


@dataclass(frozen=True)
class PrecisionConfig:
    mode: str = "machine"
    digits: int = 80

    def __post_init__(self):
        if self.mode not in ("machine", "extended"):
            raise ValueError(f"unknown precision mode {self.mode!r}")
        if self.mode == "extended" and self.digits < MIN_EXTENDED_DIGITS:
            raise ValueError(
                f"extended precision needs >= {MIN_EXTENDED_DIGITS} digits, got {self.digits}")

    @classmethod
    def extended(cls, digits: int = 80) -> "PrecisionConfig":
        return cls("extended", digits)

    @property
    def is_extended(self) -> bool:
        return self.mode == "extended"


MACHINE = PrecisionConfig()


def _half_cap(m: int) -> int:
    # largest target count strictly below m/2
    return (m - 1) // 2


# --- machine precision -----------------------------------------------------

def _log_terms(m: int, eta: float, s: np.ndarray, t: np.ndarray) -> np.ndarray:
    lf = gammaln(np.arange(m + 1) + 1.0)
    le, lr = math.log(eta), math.log1p(-2 * eta)
    return lf[m] - lf[s] - lf[t] - lf[m - s - t] + (s + t) * le + (m - s - t) * lr


def _win_mass_machine(m: int, eta: float) -> float:
    k = _half_cap(m)
    s, t = np.meshgrid(np.arange(m + 1), np.arange(m + 1), indexing="ij")
    mask = (s >= 2) & (s <= k) & (t >= 2) & (s + t <= m)
    if not mask.any():
        return 0.0
    return math.fsum(np.exp(_log_terms(m, eta, s[mask], t[mask])).tolist())


def _fail_mass_machine(m: int, eta: float) -> float:
    k = _half_cap(m)
    lf = gammaln(np.arange(m + 1) + 1.0)
    # target count outside 2..k: whole binomial rows of the simplex
    s_out = np.array([s for s in range(m + 1) if s < 2 or s > k], dtype=np.int64)
    log_rows = (lf[m] - lf[s_out] - lf[m - s_out] + s_out * math.log(eta)
                + (m - s_out) * math.log1p(-eta))
    # target count inside 2..k but challenger below 2
    s_in, t_in = [], []
    for s in range(2, k + 1):
        for t in (0, 1):
            if s + t <= m:
                s_in.append(s)
                t_in.append(t)
    parts = np.exp(log_rows).tolist()
    if s_in:
        parts += np.exp(_log_terms(m, eta, np.array(s_in), np.array(t_in))).tolist()
    return math.fsum(parts)


# --- extended precision ----------------------------------------------------

class _MpTables:
    """Log-factorials for one ``m`` at the current mpmath precision."""

    def __init__(self, m: int):
        self.m = m
        self.lf = [mpmath.loggamma(k + 1) for k in range(m + 1)]


def _win_mass_mp(tab: _MpTables, eta) -> mpmath.mpf:
    m, lf = tab.m, tab.lf
    le, lr = mpmath.log(eta), mpmath.log(1 - 2 * eta)
    terms = []
    for s in range(2, _half_cap(m) + 1):
        base = lf[m] - lf[s] + s * le
        for t in range(2, m - s + 1):
            terms.append(mpmath.exp(base - lf[t] - lf[m - s - t] + t * le + (m - s - t) * lr))
    return mpmath.fsum(terms)


def _fail_mass_mp(tab: _MpTables, eta) -> mpmath.mpf:
    m, lf = tab.m, tab.lf
    k = _half_cap(m)
    le, lr, lc = mpmath.log(eta), mpmath.log(1 - 2 * eta), mpmath.log(1 - eta)
    terms = [mpmath.exp(lf[m] - lf[s] - lf[m - s] + s * le + (m - s) * lc)
             for s in range(m + 1) if s < 2 or s > k]
    for s in range(2, k + 1):
        for t in (0, 1):
            if s + t <= m:
                terms.append(mpmath.exp(lf[m] - lf[s] - lf[t] - lf[m - s - t]
                                        + (s + t) * le + (m - s - t) * lr))
    return mpmath.fsum(terms)


def p_win_continuous(params: ContinuousParams, precision: PrecisionConfig = MACHINE):
    """Victory probability ``p`` and failure probability ``q`` of the target.

    ``p`` sums the multinomial mass over target count ``2 <= s < m/2`` and
    challenger count ``t >= 2``.  ``q`` sums the mass of the complementary
    region directly (rows with ``s`` outside the window collapse to binomial
    terms), so it keeps full relative accuracy when ``p`` rounds to 1.
    Extended mode returns ``mpmath.mpf`` values.
    """
    m, eta = params.m, params.eta
    if not precision.is_extended:
        return _win_mass_machine(m, eta), _fail_mass_machine(m, eta)
    with mpmath.workdps(precision.digits):
        tab = _MpTables(m)
        e = mpmath.mpf(eta)
        return _win_mass_mp(tab, e), _fail_mass_mp(tab, e)


class EtaOptimum(NamedTuple):
    eta: float
    p: float
    q: float


def _golden_min(f, a: float, b: float, tol: float):
    """Minimize a unimodal ``f`` on ``[a, b]`` down to an interval of width ``tol``."""
    inv = (math.sqrt(5) - 1) / 2
    c, d = b - inv * (b - a), a + inv * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - inv * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv * (b - a)
            fd = f(d)
    return (a + b) / 2


def _eta_grid(start: float, end: float, step: float) -> np.ndarray:
    if not 0 < start < end < 0.5:
        raise ValueError(f"grid must satisfy 0 < start < end < 0.5, got [{start}, {end}]")
    if step <= 0:
        raise ValueError("step must be positive")
    k = int(math.floor((end - start) / step + 1e-9))
    return start + step * np.arange(k + 1)


def optimize_eta_win(m: int, grid_start: float = 0.1, grid_end: float = 0.45,
                     step: float = 0.0007, precision: PrecisionConfig = MACHINE,
                     tol: float = 1e-6) -> EtaOptimum:
    """Width maximizing the continuous victory probability.

    A coarse grid scan picks the best grid point (smallest width on ties);
    golden-section search then refines within one step on either side.
    Maximizing ``p`` is done by minimizing the directly summed ``q``, which
    stays resolvable after ``p`` saturates at 1.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    grid = _eta_grid(grid_start, grid_end, step)
    if m <= 4:
        raise NoFeasibleVictory(f"no feasible victory with m={m} voters")

    scope = mpmath.workdps(precision.digits) if precision.is_extended else nullcontext()
    with scope:
        if precision.is_extended:
            tab = _MpTables(m)
            fail = lambda e: _fail_mass_mp(tab, mpmath.mpf(e))
        else:
            fail = lambda e: _fail_mass_machine(m, float(e))
        qs = [fail(e) for e in grid]
        i = min(range(len(grid)), key=lambda j: (qs[j], j))
        if qs[i] >= 1:
            raise NoFeasibleVictory(f"no feasible victory with m={m} voters")
        lo = max(grid_start, grid[i] - step)
        hi = min(grid_end, grid[i] + step)
        eta = float(_golden_min(fail, float(lo), float(hi), tol))
        p, q = p_win_continuous(ContinuousParams(m, eta), precision)
    return EtaOptimum(eta, p, q)


class DecayRow(NamedTuple):
    m: int
    eta_star: float
    log10_q: float


def decay_table(m_list: Sequence[int], precision: PrecisionConfig = MACHINE,
                **grid) -> list[DecayRow]:
    rows = []
    for m in m_list:
        if m < 5:
            raise ValueError(f"decay table needs m >= 5, got {m}")
        opt = optimize_eta_win(m, precision=precision, **grid)
        rows.append(DecayRow(m, opt.eta, float(mpmath.log10(opt.q))))
    return rows


# --- universal event on the circle ----------------------------------------

@dataclass(frozen=True)
class UniformSample:
    points: np.ndarray
    order: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float).reshape(-1)
        if pts.size < 1 or pts.min() < 0 or pts.max() >= 1:
            raise ValueError("points must be a non-empty array in [0, 1)")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_points(cls, points) -> "UniformSample":
        pts = np.asarray(points, dtype=float)
        return cls(pts, np.argsort(pts, kind="stable"))

    @property
    def sorted_points(self) -> np.ndarray:
        return self.points[self.order]

    @property
    def m(self) -> int:
        return int(self.points.size)


def sample_uniform_points(m: int, rng: np.random.Generator) -> UniformSample:
    if m < 1:
        raise ValueError("m must be >= 1")
    return UniformSample.from_points(rng.random(m))


def universal_event_continuous(sample: UniformSample, eta: float) -> bool:
    """Whether every rotation of the width-``eta`` agenda is won.

    Checks only the windows anchored at the points themselves: the open
    window ``(U_j, U_j + eta)`` must hold at least two points and the
    half-closed window ``[U_j, U_j + eta)`` fewer than ``m / 2``.
    """
    if not 0 < eta < 0.5:
        raise ValueError(f"eta must lie strictly inside (0, 0.5), got {eta}")
    x = sample.sorted_points
    m = x.size
    ring = np.concatenate([x, x + 1.0])
    end = np.searchsorted(ring, x + eta, side="left")
    open_counts = end - np.searchsorted(ring, x, side="right")
    closed_counts = end - np.searchsorted(ring, x, side="left")
    return bool(open_counts.min() >= 2 and 2 * closed_counts.max() < m)


def _window_bounds_dense(x: np.ndarray, cap: int) -> tuple[np.ndarray, np.ndarray]:
    # all pairwise forward gaps; tolerates coincident points
    m = x.shape[1]
    lo = np.empty(x.shape[0])
    hi = np.empty(x.shape[0])
    rows = max(1, 2_000_000 // (m * m))
    for a in range(0, x.shape[0], rows):
        xs = x[a:a + rows]
        gaps = (xs[:, None, :] - xs[:, :, None]) % 1.0
        pos = np.where(gaps > 0, gaps, np.inf)
        lo[a:a + rows] = np.partition(pos, 1, axis=2)[:, :, 1].max(axis=1)
        hi[a:a + rows] = np.partition(gaps, cap, axis=2)[:, :, cap].min(axis=1)
    return lo, hi


def window_bounds(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-sample widths ``(lo, hi)`` with universal event iff ``lo < eta <= hi``.

    For each anchor point, the open window reaches two points once ``eta``
    exceeds the gap to the second point ahead, and the half-closed window
    reaches ``m / 2`` points once ``eta`` exceeds the gap to the ``cap``-th
    point ahead.  ``lo`` and ``hi`` are the worst anchors for each.
    """
    x = np.sort(np.asarray(points, dtype=float), axis=1)
    t, m = x.shape
    lo = np.full(t, np.inf)
    hi = np.zeros(t)
    if m < 3:
        return lo, hi
    cap = (m + 1) // 2 - 1  # most points allowed in a half-closed window
    ring = np.concatenate([x, x + 1.0], axis=1)
    lo = (ring[:, 2:m + 2] - x).max(axis=1)
    hi = (ring[:, cap:cap + m] - x).min(axis=1)
    tied = (np.diff(ring[:, :m + 1], axis=1) == 0).any(axis=1)
    if tied.any():
        lo[tied], hi[tied] = _window_bounds_dense(x[tied], cap)
    return lo, hi


def estimate_p2_continuous(m: int, eta: float, trials: int, master_seed: int,
                           z: float = Z95, workers: int | None = None,
                           family: int = SCAN_FAMILY) -> BinomialEstimate:
    """Monte Carlo frequency of the continuous universal event."""
    ContinuousParams(m, eta)
    rng = RngSpec(master_seed, family)

    def one_block(block, rows):
        lo, hi = window_bounds(rng.block_uniforms(block, rows, m))
        return int(((lo < eta) & (eta <= hi)).sum())

    hits = sum(run_blocks(one_block, rng.blocks(trials), workers))
    return BinomialEstimate(hits, trials, z)


class UniversalOptimum(NamedTuple):
    eta: float
    estimate: BinomialEstimate
    grid: np.ndarray
    scan_successes: np.ndarray


def optimize_eta_universal(m: int, trials: int = 100_000, grid=None,
                           master_seed: int = 0, validation_trials: int | None = None,
                           z: float = Z95, workers: int | None = None) -> UniversalOptimum:
    """Grid search of the continuous universal event frequency.

    Every grid width is scored on the same samples; the winner (smallest
    width on ties) is re-estimated on a fresh stream family.
    """
    grid = _eta_grid(0.1, 0.45, 0.0007) if grid is None else np.asarray(grid, dtype=float)
    if grid.size == 0 or grid.min() <= 0 or grid.max() >= 0.5:
        raise ValueError("grid must be non-empty and inside (0, 0.5)")
    rng = RngSpec(master_seed, SCAN_FAMILY)

    def one_block(block, rows):
        lo, hi = window_bounds(rng.block_uniforms(block, rows, m))
        keep = lo < hi
        lo_s, hi_s = np.sort(lo[keep]), np.sort(hi[keep])
        # samples with lo < eta minus samples already closed (hi < eta)
        return (np.searchsorted(lo_s, grid, side="left")
                - np.searchsorted(hi_s, grid, side="left"))

    succ = np.sum(run_blocks(one_block, rng.blocks(trials), workers), axis=0)
    best = int(np.argmax(succ))
    eta = float(grid[best])
    est = estimate_p2_continuous(m, eta, validation_trials or trials, master_seed, z,
                                 workers, family=VALIDATION_FAMILY)
    return UniversalOptimum(eta, est, grid, succ)
