"""Chernoff-type failure bounds and decay-rate fitting."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class StepDistribution:
    """Law of a single +1 / 0 / -1 step of a lazy random walk."""

    p_plus: float
    p_minus: float

    def __post_init__(self):
        if not (0 <= self.p_plus <= 1 and 0 <= self.p_minus <= 1):
            raise ValueError("step probabilities must lie in [0, 1]")
        if self.p_plus + self.p_minus > 1 + 1e-12:
            raise ValueError("p_plus + p_minus exceeds 1")

    @property
    def p_zero(self) -> float:
        return max(0.0, 1.0 - self.p_plus - self.p_minus)


def chernoff_rate(d: StepDistribution) -> float:
    """Per-step factor ``r`` with ``P(sum of m steps <= 0) <= r**m``.

    ``r = 1 - (sqrt(p_plus) - sqrt(p_minus))**2``; requires positive drift.
    """
    if not d.p_minus < d.p_plus:
        raise ValueError("tail bound needs p_minus < p_plus")
    return 1.0 - (math.sqrt(d.p_plus) - math.sqrt(d.p_minus)) ** 2


def per_round_rates(n: int, l: int) -> dict:
    """Chernoff factors for the first-round duels and the final against ``l+1``.

    In the first round the head of A (support ``l+1``) faces rivals of
    support at most 2; in the final candidate 1 collects ``n-l`` seeds
    against ``l``.
    """
    first = chernoff_rate(StepDistribution((l + 1) / n, 2 / n))
    final = chernoff_rate(StepDistribution((n - l) / n, l / n))
    return {"first_round": first, "final": final}


def _pow(rate: float, m: int) -> float:
    if m == 0:
        return 1.0
    if rate <= 0:
        return 0.0
    return math.exp(m * math.log(rate))


def failure_upper_bound(n: int, m: int, l: int) -> float:
    """Upper bound on ``1 - p_1(n, m, l)``, capped at 1.

    Union bound over the ``n-2`` first-round rivals of the two heads plus
    the final against candidate ``l+1``.
    """
    rates = per_round_rates(n, l)
    raw = (n - 2) * _pow(rates["first_round"], m) + _pow(rates["final"], m)
    return min(1.0, raw)


def relaxed_upper_bound(n: int, m: int, l: int) -> float:
    """Looser ``(n-1) * max(...)**m`` form of the same bound, capped at 1."""
    rates = per_round_rates(n, l)
    return min(1.0, (n - 1) * _pow(max(rates.values()), m))


def fit_decay_slope(rows: Sequence[tuple[float, float]]) -> float:
    """Least-squares slope of ``log10 q`` against ``m``.

    ``rows`` are ``(m, log10_q)`` pairs with strictly increasing ``m``.
    """
    if len(rows) < 3:
        raise ValueError("need at least three rows to fit a slope")
    ms = np.array([r[0] for r in rows], dtype=float)
    ys = np.array([r[-1] for r in rows], dtype=float)
    if np.any(np.diff(ms) <= 0):
        raise ValueError("m values must be strictly increasing")
    slope, _ = np.polyfit(ms, ys, 1)
    return float(slope)
