"""Reproducible random streams for Monte Carlo trials.

Trials are grouped into fixed-size blocks.  Block ``b`` of family ``f``
under master seed ``s`` draws from a Philox generator keyed by
``SeedSequence(s, spawn_key=(f, b))``.  Because the block size is a
constant, the draws for trial ``t`` depend only on ``(s, f, t)`` and the
shape of the request; worker count and evaluation order never enter.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, TypeVar

import numpy as np

BLOCK_SIZE = 4096
WORKERS_ENV = "AGENDA_WORKERS"

T = TypeVar("T")


@dataclass(frozen=True)
class RngSpec:
    master_seed: int
    family: int = 0

    def __post_init__(self):
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")

    def block_rng(self, block: int) -> np.random.Generator:
        ss = np.random.SeedSequence(self.master_seed, spawn_key=(self.family, block))
        return np.random.Generator(np.random.Philox(ss))

    def child(self, family: int) -> "RngSpec":
        """Same master seed, disjoint stream family."""
        return RngSpec(self.master_seed, family)

    def blocks(self, trials: int) -> list[tuple[int, int]]:
        """``(block, rows)`` pairs covering ``trials`` trials."""
        if trials < 1:
            raise ValueError("trials must be >= 1")
        full, rest = divmod(trials, BLOCK_SIZE)
        out = [(b, BLOCK_SIZE) for b in range(full)]
        if rest:
            out.append((full, rest))
        return out

    def block_seeds(self, block: int, rows: int, n: int, m: int) -> np.ndarray:
        """Discrete seeds in ``1..n`` for the first ``rows`` trials of a block."""
        draws = self.block_rng(block).integers(1, n + 1, size=(BLOCK_SIZE, m))
        return draws[:rows]

    def block_uniforms(self, block: int, rows: int, m: int) -> np.ndarray:
        """Uniform points on ``[0, 1)`` for the first ``rows`` trials of a block."""
        return self.block_rng(block).random((BLOCK_SIZE, m))[:rows]

    def trial_seeds(self, trial: int, n: int, m: int) -> np.ndarray:
        b, r = divmod(trial, BLOCK_SIZE)
        return self.block_seeds(b, r + 1, n, m)[r]


def default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV)
    if raw is None:
        return os.cpu_count() or 1
    try:
        w = int(raw)
    except ValueError:
        raise ValueError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}") from None
    if w < 1:
        raise ValueError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}")
    return w


def run_blocks(fn: Callable[[int, int], T], blocks: Iterable[tuple[int, int]],
               workers: int | None = None) -> list[T]:
    """Apply ``fn(block, rows)`` to every block, results in block order."""
    blocks = list(blocks)
    workers = default_workers() if workers is None else workers
    if workers <= 1 or len(blocks) <= 1:
        return [fn(b, r) for b, r in blocks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda br: fn(*br), blocks))
