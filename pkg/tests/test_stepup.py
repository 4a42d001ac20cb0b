import numpy as np
import pytest

from lsufdr.stepup import PValueSample, ecdf, lsd, lsu


def make_sample(pvalues, nulls=None):
    pv = np.asarray(pvalues, dtype=float)
    if nulls is None:
        nulls = np.ones(pv.size, dtype=bool)
    return PValueSample(pvalues=pv, is_true_null=np.asarray(nulls))


class TestLsu:
    def test_hand_enumeration(self):
        # critical values at alpha=0.15, n=3: (0.05, 0.10, 0.15)
        s = make_sample([0.01, 0.5, 0.9])
        r = lsu(s, 0.15)
        assert r.m == 1
        assert r.threshold == pytest.approx(0.05)
        assert r.v == 1  # all entries are true nulls here

    def test_all_zero_false_nulls(self):
        s = make_sample([0.0] * 6, nulls=[False] * 6)
        r = lsu(s, 0.1)
        assert r.m == 6
        assert r.v == 0
        assert r.fdp == 0.0

    def test_all_one(self):
        s = make_sample([1.0] * 5)
        r = lsu(s, 0.2)
        assert r.m == 0
        assert r.fdp == 0.0
        assert r.threshold == 0.0

    def test_tie_at_critical_value_rejected(self):
        # p equal to its critical value counts as a rejection
        s = make_sample([0.05, 0.9])
        r = lsu(s, 0.1)
        assert r.m == 1

    def test_empty_sample_rejected(self):
        with pytest.raises(ValueError):
            make_sample([])

    def test_alpha_domain(self):
        s = make_sample([0.2])
        for alpha in (0.0, 1.0, -0.5, 2.0):
            with pytest.raises(ValueError):
                lsu(s, alpha)

    def test_rejected_count_matches_threshold(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            n = rng.integers(1, 60)
            pv = rng.random(n) ** rng.uniform(0.5, 2.0)
            s = make_sample(pv)
            r = lsu(s, 0.2)
            assert np.count_nonzero(pv <= r.threshold) == r.m
            if r.m > 0:
                assert np.all(np.sort(pv)[r.m:] > r.threshold)

    def test_threshold_supremum_characterization(self):
        # t* = sup{t: ecdf(t) >= t/alpha} over the critical grid agrees
        rng = np.random.default_rng(3)
        alpha = 0.25
        for _ in range(100):
            n = int(rng.integers(2, 40))
            pv = rng.random(n)
            s = make_sample(pv)
            r = lsu(s, alpha)
            grid = alpha * np.arange(1, n + 1) / n
            holds = [ecdf(pv, float(t)) >= t / alpha for t in grid]
            sup_idx = max((i for i, h in enumerate(holds) if h), default=-1)
            m_from_sup = sup_idx + 1
            assert m_from_sup == r.m
            if r.m > 0:
                assert ecdf(pv, r.threshold) >= r.threshold / alpha
            for t in grid[r.m:]:
                assert ecdf(pv, float(t)) < t / alpha

    def test_permutation_invariance(self):
        rng = np.random.default_rng(5)
        pv = rng.random(25)
        nulls = rng.random(25) < 0.6
        base = lsu(PValueSample(pvalues=pv, is_true_null=nulls), 0.1)
        for _ in range(20):
            perm = rng.permutation(25)
            r = lsu(PValueSample(pvalues=pv[perm], is_true_null=nulls[perm]),
                    0.1)
            assert (r.m, r.v, r.threshold) == (base.m, base.v, base.threshold)

    def test_monotone_in_single_pvalue(self):
        rng = np.random.default_rng(6)
        for _ in range(100):
            n = int(rng.integers(2, 30))
            pv = rng.random(n)
            s = make_sample(pv)
            m0 = lsu(s, 0.3).m
            i = int(rng.integers(0, n))
            pv2 = pv.copy()
            pv2[i] = pv[i] * rng.random()
            assert lsu(make_sample(pv2), 0.3).m >= m0

    def test_input_not_mutated(self):
        pv = np.array([0.9, 0.1, 0.4])
        s = make_sample(pv)
        lsu(s, 0.2)
        assert list(s.pvalues) == [0.9, 0.1, 0.4]

    def test_independent_uniform_fdr_is_alpha(self):
        # all-null uniform p-values: FDR equals alpha exactly in
        # expectation; Monte Carlo within 3 standard errors
        rng = np.random.default_rng(11)
        alpha = 0.1
        reps = 20000
        n = 40
        fdps = np.empty(reps)
        for k in range(reps):
            s = make_sample(rng.random(n))
            fdps[k] = lsu(s, alpha).fdp
        se = fdps.std(ddof=1) / np.sqrt(reps)
        assert abs(fdps.mean() - alpha) < 3 * se


class TestLsd:
    def test_hand_enumeration(self):
        s = make_sample([0.01, 0.5, 0.9])
        assert lsd(s, 0.15).m == 1

    def test_first_step_fails(self):
        s = make_sample([0.09, 0.2])
        r = lsd(s, 0.1)  # critical values (0.05, 0.1); first fails
        assert r.m == 0

    def test_never_more_than_lsu(self):
        rng = np.random.default_rng(12)
        for _ in range(300):
            n = int(rng.integers(1, 50))
            pv = rng.random(n) ** rng.uniform(0.3, 3.0)
            s = make_sample(pv)
            assert lsd(s, 0.2).m <= lsu(s, 0.2).m

    def test_all_pass(self):
        s = make_sample([0.0, 0.01])
        assert lsd(s, 0.2).m == 2


class TestEcdf:
    def test_direct_count(self):
        assert ecdf(np.array([0.2, 0.4]), 0.3) == 0.5

    def test_all_below_one(self):
        v = np.array([0.1, 0.99, 1.0])
        assert ecdf(v, 1.0) == 1.0

    def test_zeros(self):
        v = np.array([0.0, 0.0, 0.5, 0.7])
        assert ecdf(v, 0.0) == 0.5

    def test_right_continuity(self):
        v = np.array([0.25, 0.5])
        assert ecdf(v, 0.25) == 0.5
        assert ecdf(v, 0.25 - 1e-12) == 0.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            ecdf(np.array([]), 0.5)


class TestSampleValidation:
    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            PValueSample(pvalues=np.array([0.1, 0.2]),
                         is_true_null=np.array([True]))

    def test_range(self):
        with pytest.raises(ValueError):
            make_sample([-0.1, 0.5])
        with pytest.raises(ValueError):
            make_sample([0.1, 1.5])

    def test_counts(self):
        s = make_sample([0.1, 0.2, 0.3], nulls=[True, False, True])
        assert (s.n, s.n0, s.n1) == (3, 2, 1)
