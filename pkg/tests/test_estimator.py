import numpy as np
import pytest

from runoff_agenda.election import DegeneratePartitionError, exact_p1_bruteforce, exact_p2_bruteforce
from runoff_agenda.estimator import (
    BinomialEstimate,
    estimate_p1_discrete,
    estimate_p2_discrete,
    wilson_centroid_optimize,
    wilson_interval,
)
from runoff_agenda.streams import BLOCK_SIZE, RngSpec, default_workers, run_blocks


class TestWilson:
    def test_all_successes(self):
        lo, hi = wilson_interval(100_000, 100_000)
        assert lo == pytest.approx(0.9999616, abs=1e-7)
        assert hi == 1.0

    def test_no_successes(self):
        assert wilson_interval(0, 500)[0] == 0.0

    def test_half(self):
        assert wilson_interval(50, 100)[0] == pytest.approx(0.4038, abs=1e-4)

    @pytest.mark.parametrize("s,t", [(-1, 10), (11, 10), (0, 0)])
    def test_invalid(self, s, t):
        with pytest.raises(ValueError):
            wilson_interval(s, t)

    def test_ordering(self):
        for t in (1, 7, 100, 12345):
            for s in range(0, t + 1, max(1, t // 9)):
                e = BinomialEstimate(s, t)
                assert 0 <= e.wilson_lower <= e.p_hat <= e.wilson_upper <= 1

    def test_coverage(self):
        rng = np.random.default_rng(17)
        hits = 0
        for s in rng.binomial(200, 0.3, size=1000):
            lo, hi = wilson_interval(int(s), 200)
            hits += lo <= 0.3 <= hi
        assert 930 <= hits <= 970


class TestStreams:
    def test_trial_draws_independent_of_request(self):
        rng = RngSpec(99)
        full = rng.block_seeds(0, BLOCK_SIZE, 14, 5)
        assert np.array_equal(rng.block_seeds(0, 10, 14, 5), full[:10])
        assert np.array_equal(rng.trial_seeds(7, 14, 5), full[7])

    def test_families_differ(self):
        a = RngSpec(3).block_seeds(0, 50, 14, 9)
        b = RngSpec(3).child(1).block_seeds(0, 50, 14, 9)
        assert not np.array_equal(a, b)

    def test_workers_env(self, monkeypatch):
        monkeypatch.setenv("AGENDA_WORKERS", "3")
        assert default_workers() == 3
        monkeypatch.setenv("AGENDA_WORKERS", "zero")
        with pytest.raises(ValueError):
            default_workers()

    def test_block_order(self):
        out = run_blocks(lambda b, r: (b, r), RngSpec(0).blocks(3 * BLOCK_SIZE + 5), workers=4)
        assert out == [(0, BLOCK_SIZE), (1, BLOCK_SIZE), (2, BLOCK_SIZE), (3, 5)]


class TestEstimates:
    def test_rejects_bad_width(self):
        with pytest.raises(DegeneratePartitionError):
            estimate_p1_discrete(14, 21, 1, 100, RngSpec(0))

    @pytest.mark.parametrize("workers", [1, 2, 4])
    def test_worker_count_irrelevant(self, workers):
        base = estimate_p1_discrete(14, 21, 5, 20_000, RngSpec(11), workers=1)
        assert estimate_p1_discrete(14, 21, 5, 20_000, RngSpec(11), workers=workers) == base

    def test_universal_never_exceeds_single(self):
        rng = RngSpec(4)
        p1 = estimate_p1_discrete(14, 31, 5, 20_000, rng)
        p2 = estimate_p2_discrete(14, 31, 5, 20_000, rng)
        assert p2.successes <= p1.successes

    def test_two_voters_never_universal(self):
        assert estimate_p2_discrete(6, 2, 2, 5000, RngSpec(1)).successes == 0

    @pytest.mark.parametrize("n,m,l", [(6, 3, 2), (8, 3, 3), (6, 5, 2)])
    def test_agrees_with_enumeration(self, n, m, l):
        exact = float(exact_p1_bruteforce(n, m, l))
        lo, hi = _ci(estimate_p1_discrete(n, m, l, 100_000, RngSpec(n + m), z=2.576))
        assert lo <= exact <= hi

    def test_universal_agrees_with_enumeration(self):
        exact = float(exact_p2_bruteforce(6, 5, 2))
        lo, hi = _ci(estimate_p2_discrete(6, 5, 2, 100_000, RngSpec(5), z=2.576))
        assert lo <= exact <= hi

    def test_large_n_path_matches_histogram_path(self):
        # n above the histogram cutoff goes through the per-voter kernel
        from runoff_agenda import estimator
        a = estimate_p1_discrete(200, 15, 50, 8000, RngSpec(2))
        cutoff = estimator.HISTOGRAM_MAX_N
        try:
            estimator.HISTOGRAM_MAX_N = 0
            b = estimate_p1_discrete(200, 15, 50, 8000, RngSpec(2))
        finally:
            estimator.HISTOGRAM_MAX_N = cutoff
        assert a == b

    def test_common_random_numbers_reduce_variance(self):
        diffs_crn, diffs_ind = [], []
        for rep in range(50):
            a = estimate_p1_discrete(14, 21, 4, 4000, RngSpec(rep)).p_hat
            b = estimate_p1_discrete(14, 21, 5, 4000, RngSpec(rep)).p_hat
            c = estimate_p1_discrete(14, 21, 5, 4000, RngSpec(1000 + rep)).p_hat
            diffs_crn.append(a - b)
            diffs_ind.append(a - c)
        assert np.var(diffs_crn) < np.var(diffs_ind)


def _ci(est):
    return est.wilson_lower, est.wilson_upper


class TestPlateau:
    def test_singleton_range(self):
        res = wilson_centroid_optimize(6, 31, scan_trials=2000, validation_trials=2000,
                                       rng=RngSpec(0))
        assert (res.l_left, res.l_opt, res.l_right) == (2, 2, 2)

    def test_empty_range(self):
        with pytest.raises(ValueError):
            wilson_centroid_optimize(14, 21, 5, 4)

    def test_fourteen_candidates(self):
        res = wilson_centroid_optimize(14, 31, rng=RngSpec(1), validation_trials=20_000)
        assert res.l_opt == 5
        assert res.l_left <= res.l_opt <= res.l_right
        assert res.l_opt == round((res.l_left + res.l_right) / 2)

    def test_centroid_not_dominated(self):
        res = wilson_centroid_optimize(30, 41, rng=RngSpec(6), validation_trials=10_000)
        here = res.scan[res.l_opt]
        for est in res.scan.values():
            assert here.p_hat >= est.p_hat - 2 * est.se

    def test_deterministic(self):
        kw = dict(scan_trials=3000, validation_trials=3000, rng=RngSpec(8))
        a = wilson_centroid_optimize(16, 41, universal=True, workers=1, **kw)
        b = wilson_centroid_optimize(16, 41, universal=True, workers=4, **kw)
        assert a.as_dict() == b.as_dict()
        assert a.scan == b.scan

    def test_strided_scan_finds_dense_plateau(self):
        # the strided path must give the same plateau as scanning every width
        from runoff_agenda import estimator
        kw = dict(scan_trials=3000, validation_trials=1000, rng=RngSpec(3))
        strided = wilson_centroid_optimize(1200, 15, 250, 480, **kw)
        grid = estimator._scan_grid
        try:
            estimator._scan_grid = lambda lo, hi, n: (list(range(lo, hi + 1)), 1)
            dense = wilson_centroid_optimize(1200, 15, 250, 480, **kw)
        finally:
            estimator._scan_grid = grid
        assert strided.l_opt == dense.l_opt

    @pytest.mark.slow
    def test_ratio_trend(self):
        ratios = []
        for n in (50, 100, 200):
            res = wilson_centroid_optimize(n, 51, rng=RngSpec(n), validation_trials=10_000)
            ratios.append(res.l_opt / n)
        assert all(0.20 <= r <= 0.30 for r in ratios)
        assert ratios[0] >= ratios[1] >= ratios[2]
