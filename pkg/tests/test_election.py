from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from runoff_agenda.election import (
    VOID_A,
    VOID_B,
    VOID_FINAL,
    DegeneratePartitionError,
    SeedVector,
    Status,
    TargetKernel,
    batch_two_round,
    batch_universal,
    build_partition,
    exact_p1_bruteforce,
    exact_p2_bruteforce,
    head_to_head,
    recruitment_ballot_map,
    run_two_round,
    sample_seeds,
    shift_seeds,
    tally,
    unique_winner,
    universal_victory,
)


def sv(seeds, n=6):
    return SeedVector(np.array(seeds), n)


@st.composite
def instance(draw, max_n=40, max_m=25):
    n = draw(st.integers(3, max_n // 2)) * 2
    l = draw(st.integers(2, n // 2 - 1))
    m = draw(st.integers(1, max_m))
    seeds = draw(st.lists(st.integers(1, n), min_size=m, max_size=m))
    return n, l, SeedVector(np.array(seeds), n)


class TestPartition:
    def test_figure_set(self):
        assert build_partition(14, 4, 1).members_a == {1, 2, 3, 4, 6, 8, 10}

    def test_small_sets(self):
        p = build_partition(6, 2, 1)
        assert p.members_a == {1, 2, 4}
        assert p.members_b == {3, 5, 6}

    def test_rotation(self):
        assert build_partition(14, 4, 2).members_a == {2, 3, 4, 5, 7, 9, 11}

    @pytest.mark.parametrize("n,l", [(14, 1), (14, 7), (7, 2), (4, 1), (6, 3)])
    def test_rejects_bad_width(self, n, l):
        with pytest.raises(DegeneratePartitionError):
            build_partition(n, l)

    def test_error_names_range(self):
        with pytest.raises(DegeneratePartitionError, match=r"2\.\.6"):
            build_partition(14, 1)

    def test_ballot_maps_small(self):
        a, b = recruitment_ballot_map(build_partition(6, 2))
        pre_a = {c: {s for s in range(1, 7) if a[s] == c} for c in (1, 2, 4)}
        pre_b = {c: {s for s in range(1, 7) if b[s] == c} for c in (3, 5, 6)}
        assert pre_a == {1: {5, 6, 1}, 2: {2}, 4: {3, 4}}
        assert pre_b == {3: {1, 2, 3}, 5: {4, 5}, 6: {6}}

    def test_head_recruits(self):
        a, _ = recruitment_ballot_map(build_partition(14, 4))
        assert {s for s in range(1, 15) if a[s] == 1} == {11, 12, 13, 14, 1}

    @pytest.mark.parametrize("n", range(6, 42, 2))
    def test_preimage_law(self, n):
        for l in range(2, n // 2):
            p = build_partition(n, l)
            a, b = p.ballot_map_a[1:], p.ballot_map_b[1:]
            ca = {c: int((a == c).sum()) for c in p.members_a}
            cb = {c: int((b == c).sum()) for c in p.members_b}
            assert len(p.members_a) == len(p.members_b) == n // 2
            assert ca[1] == l + 1
            assert all(ca[c] == 1 for c in range(2, l + 1))
            assert all(ca[c] == 2 for c in range(l + 2, n - l + 1, 2))
            assert cb[l + 1] == l + 1
            assert sum(ca.values()) == sum(cb.values()) == n

    @given(st.integers(3, 20), st.data())
    def test_maps_land_in_their_sets(self, half, data):
        n = 2 * half
        l = data.draw(st.integers(2, n // 2 - 1))
        i = data.draw(st.integers(1, n))
        p = build_partition(n, l, i)
        assert set(p.ballot_map_a[1:].tolist()) == p.members_a
        assert set(p.ballot_map_b[1:].tolist()) == p.members_b
        for c in p.members_a:
            assert p.ballot_map_a[c] == c


class TestRounds:
    def test_tallies(self):
        p = build_partition(6, 2)
        seeds = sv([1, 5, 3, 3, 2])
        assert tally(seeds, p.ballot_map_a).counts == {1: 2, 2: 1, 4: 2}
        assert tally(seeds, p.ballot_map_b).counts == {3: 4, 5: 1, 6: 0}

    def test_single_voter_tally(self):
        p = build_partition(8, 3)
        t = tally(sv([5], 8), p.ballot_map_a)
        assert t.counts[int(p.ballot_map_a[5])] == 1
        assert t.total == 1

    def test_unique_winner(self):
        p = build_partition(6, 2)
        seeds = sv([1, 5, 3, 3, 2])
        assert unique_winner(tally(seeds, p.ballot_map_a)) is None
        assert unique_winner(tally(seeds, p.ballot_map_b)) == 3
        assert unique_winner(tally(sv([4, 4, 4]), p.ballot_map_a)) == 4

    def test_head_to_head(self):
        assert head_to_head(sv([1, 5, 3, 3, 2]), 1, 3) == 3
        assert head_to_head(sv([1, 1, 6, 3, 2]), 1, 3) == 1
        assert head_to_head(sv([1, 3]), 1, 3) is None

    def test_two_round_examples(self):
        p = build_partition(6, 2)
        out = run_two_round(sv([1, 1, 6, 3, 2]), p)
        assert out.status is Status.WINNER and out.winner == 1
        assert run_two_round(sv([1, 5, 3, 3, 2]), p).status is Status.VOID_IN_A
        assert run_two_round(sv([1, 1, 1]), p).winner == 1

    @settings(max_examples=200)
    @given(instance())
    def test_vote_conservation(self, inst):
        n, l, seeds = inst
        p = build_partition(n, l)
        assert tally(seeds, p.ballot_map_a).total == seeds.m
        assert tally(seeds, p.ballot_map_b).total == seeds.m

    @settings(max_examples=200)
    @given(instance())
    def test_winner_is_strict(self, inst):
        n, l, seeds = inst
        p = build_partition(n, l)
        out = run_two_round(seeds, p)
        if out.status is Status.WINNER:
            ta = tally(seeds, p.ballot_map_a).counts
            tb = tally(seeds, p.ballot_map_b).counts
            wa, wb = unique_winner(TallyView(ta)), unique_winner(TallyView(tb))
            assert out.winner in (wa, wb)
            other = wb if out.winner == wa else wa
            s = seeds.seeds
            mine = ((out.winner - s) % n < (other - s) % n).sum()
            assert 2 * mine > seeds.m

    @settings(max_examples=300)
    @given(instance(), st.data())
    def test_rotation_equivariance(self, inst, data):
        n, l, seeds = inst
        i = data.draw(st.integers(1, n))
        direct = run_two_round(seeds, build_partition(n, l, i)).winner == i
        via_one = run_two_round(shift_seeds(seeds, -(i - 1)), build_partition(n, l, 1)).winner == 1
        assert direct == via_one


class TallyView:
    def __init__(self, counts):
        self.counts = counts


class TestUniversal:
    @pytest.mark.parametrize("s", range(1, 7))
    def test_single_voter_never_universal(self, s):
        assert not universal_victory(sv([s]), 6, 2)

    def test_large_electorate_is_nearly_always_universal(self):
        rng = np.random.default_rng(5)
        seeds = rng.integers(1, 7, size=(2000, 401))
        assert batch_universal(seeds, 6, 2).mean() > 0.99


class TestOracles:
    def test_p1_single_voter(self):
        assert exact_p1_bruteforce(6, 1, 2) == Fraction(1, 6)

    def test_p1_needs_voters(self):
        with pytest.raises(ValueError):
            exact_p1_bruteforce(6, 0, 2)

    def test_p2_small(self):
        assert exact_p2_bruteforce(6, 1, 2) == 0
        assert exact_p2_bruteforce(6, 2, 2) == 0

    def test_multiset_weighting_matches_ordered_enumeration(self):
        import itertools
        p = build_partition(6, 2)
        hits = sum(run_two_round(sv(list(v)), p).winner == 1
                   for v in itertools.product(range(1, 7), repeat=3))
        assert exact_p1_bruteforce(6, 3, 2) == Fraction(hits, 216)

    def test_budget_guard(self):
        with pytest.raises(ValueError, match="budget"):
            exact_p1_bruteforce(14, 9, 4, budget=10**6)


class TestSampling:
    def test_reproducible(self):
        a = sample_seeds(10, 7, np.random.default_rng(3))
        b = sample_seeds(10, 7, np.random.default_rng(3))
        assert np.array_equal(a.seeds, b.seeds)

    def test_uniform_marginal(self):
        s = sample_seeds(10, 100_000, np.random.default_rng(1))
        assert abs((s.seeds == 1).mean() - 0.1) < 0.01

    def test_seed_vector_validation(self):
        with pytest.raises(ValueError):
            SeedVector(np.array([0, 1]), 6)
        with pytest.raises(ValueError):
            SeedVector(np.array([], dtype=int), 6)

    def test_head_vote_is_binomial(self):
        # votes for the head of A over (n=14, l=4, m=21): Binomial(21, 5/14)
        n, l, m, trials = 14, 4, 21, 100_000
        rng = np.random.default_rng(2024)
        seeds = rng.integers(1, n + 1, size=(trials, m))
        p = build_partition(n, l)
        head = (p.ballot_map_a[seeds] == 1).sum(axis=1)
        observed = np.bincount(head, minlength=m + 1).astype(float)
        expected = stats.binom.pmf(np.arange(m + 1), m, (l + 1) / n) * trials
        keep = expected >= 5
        obs = np.append(observed[keep], observed[~keep].sum())
        exp = np.append(expected[keep], expected[~keep].sum())
        exp *= obs.sum() / exp.sum()
        assert stats.chisquare(obs, exp).pvalue > 0.001


class TestBatch:
    @pytest.mark.parametrize("n,l", [(6, 2), (8, 3), (14, 5), (30, 9), (200, 60)])
    @pytest.mark.parametrize("m", [1, 2, 5, 11, 20])
    def test_batch_matches_scalar(self, n, l, m):
        rng = np.random.default_rng(n * 100 + m)
        seeds = rng.integers(1, n + 1, size=(300, m))
        p = build_partition(n, l)
        codes = {Status.VOID_IN_A: VOID_A, Status.VOID_IN_B: VOID_B,
                 Status.VOID_IN_FINAL: VOID_FINAL}
        got = batch_two_round(seeds, p)
        for row, g in zip(seeds, got):
            out = run_two_round(SeedVector(row, n), p)
            assert g == (out.winner if out.status is Status.WINNER else codes[out.status])

    @pytest.mark.parametrize("n,l,m", [(6, 2, 7), (8, 3, 9), (14, 5, 21)])
    def test_batch_universal_matches_scalar(self, n, l, m):
        rng = np.random.default_rng(m)
        seeds = rng.integers(1, n + 1, size=(200, m))
        got = batch_universal(seeds, n, l)
        want = [universal_victory(SeedVector(r, n), n, l) for r in seeds]
        assert got.tolist() == want

    @pytest.mark.parametrize("n", [6, 14, 30, 100])
    @pytest.mark.parametrize("m", [1, 4, 11, 31])
    def test_histogram_kernel_matches(self, n, m):
        rng = np.random.default_rng(7 * n + m)
        seeds = rng.integers(1, n + 1, size=(400, m))
        for l in range(2, n // 2, max(1, n // 20)):
            k = TargetKernel(n, l)
            hist = TargetKernel.histogram(seeds, n)
            assert np.array_equal(k.wins(hist), batch_two_round(seeds, build_partition(n, l)) == 1)
            if n <= 30:
                assert np.array_equal(k.universal(hist), batch_universal(seeds, n, l))

    def test_even_m_ties_more(self):
        n, l, trials = 14, 5, 40_000
        rng = np.random.default_rng(9)
        p = build_partition(n, l)

        def void_rate(m):
            return (batch_two_round(rng.integers(1, n + 1, size=(trials, m)), p) < 0).mean()

        for m in (10, 20):
            even = void_rate(m)
            assert even > void_rate(m - 1)
            assert even > void_rate(m + 1)
