"""Hypothesis tests, ROC analysis, and the bootstrap.

Brute-force oracles here re-derive exact distributions by direct
enumeration; the implementations under test must agree exactly, not
approximately, wherever both paths are exact.
"""

import itertools
from math import comb

import numpy as np
import pytest

from tugait.errors import ValidationError
from tugait.stats import (
    analyze_variable,
    bootstrap_auc_ci,
    fisher_exact,
    mann_whitney_u,
    optimal_cutoff,
    roc_curve,
    variable_seed,
    welch_t_test,
)


def brute_force_u_pvalue(a, b):
    """Two-sided exact U p-value by explicit enumeration of rank splits.

    Counts the lower tail of the null U distribution and doubles it —
    by symmetry this equals the textbook both-tails count, which we
    also compute as a self-check.  Using integer counts before the one
    division keeps the arithmetic bit-identical to the implementation.
    """
    pooled = sorted(list(a) + list(b))
    n_a, n_b = len(a), len(b)
    ranks = {v: i + 1 for i, v in enumerate(pooled)}  # tie-free inputs only
    r_a = sum(ranks[v] for v in a)
    u_a = r_a - n_a * (n_a + 1) / 2
    u_obs = min(u_a, n_a * n_b - u_a)

    one_tail = both_tails = 0
    total = comb(n_a + n_b, n_a)
    for combo in itertools.combinations(range(1, n_a + n_b + 1), n_a):
        u = sum(combo) - n_a * (n_a + 1) / 2
        one_tail += u <= u_obs
        both_tails += min(u, n_a * n_b - u) <= u_obs
    assert min(1.0, (2 * one_tail) / total) == min(1.0, both_tails / total)
    return min(1.0, (2 * one_tail) / total)


class TestMannWhitneyU:
    def test_separated_triples(self):
        res = mann_whitney_u([1, 2, 3], [4, 5, 6])
        assert res.p_value == pytest.approx(0.1, abs=1e-15)
        assert res.statistic in (0.0, 9.0)
        assert res.method_detail == "exact"
        assert res.test == "mann_whitney_u"

    def test_identical_samples(self):
        res = mann_whitney_u([1, 2, 3, 4], [1, 2, 3, 4])
        assert res.p_value == 1.0

    def test_symmetric_in_groups(self):
        a, b = [1.2, 3.4, 2.2, 5.0], [2.8, 0.4, 4.4]
        assert mann_whitney_u(a, b).p_value == mann_whitney_u(b, a).p_value

    @pytest.mark.parametrize("n_a,n_b", [(2, 2), (3, 4), (5, 5), (2, 8), (4, 6)])
    def test_exact_path_matches_enumeration(self, n_a, n_b, rng):
        for _ in range(5):
            pool = rng.permutation(np.arange(1.0, n_a + n_b + 1))
            a, b = pool[:n_a], pool[n_a:]
            res = mann_whitney_u(a, b)
            assert res.method_detail == "exact"
            assert res.p_value == brute_force_u_pvalue(a, b)

    def test_ties_use_normal_approximation(self):
        res = mann_whitney_u([1, 1, 2, 3], [2, 2, 3, 4])
        assert res.method_detail == "normal_approx"
        assert 0.0 <= res.p_value <= 1.0

    def test_large_groups_use_normal_approximation(self, rng):
        a, b = rng.normal(size=20), rng.normal(size=20)
        assert mann_whitney_u(a, b).method_detail == "normal_approx"

    def test_monte_carlo_calibration(self):
        # null rejection rate at alpha=0.05 for n=18 vs 18, as in the cohort
        rng = np.random.default_rng(314159)
        rejections = sum(
            mann_whitney_u(rng.normal(size=18), rng.normal(size=18)).p_value < 0.05
            for _ in range(1000)
        )
        assert 30 <= rejections <= 70

    def test_group_stats_recorded(self):
        res = mann_whitney_u([1.0, 2.0, 3.0], [4.0, 5.0, 7.0])
        assert res.n_faller == 3 and res.n_nonfaller == 3
        assert res.mean_faller == pytest.approx(2.0)
        assert res.mean_nonfaller == pytest.approx(16.0 / 3)

    @pytest.mark.parametrize("a,b", [([], [1, 2]), ([1], [2, 3]), ([1, 2], [3])])
    def test_rejects_undersized_groups(self, a, b):
        with pytest.raises(ValidationError):
            mann_whitney_u(a, b)


class TestWelchT:
    def test_identical_groups(self):
        assert welch_t_test([1, 2, 3, 4], [1, 2, 3, 4]).p_value == 1.0

    def test_extreme_separation(self, rng):
        a = rng.normal(0.0, 1e-3, size=10)
        b = 100.0 + rng.normal(0.0, 1e-3, size=10)
        assert welch_t_test(a, b).p_value < 1e-6

    def test_zero_variance_equal_means(self):
        res = welch_t_test([5.0, 5.0], [5.0, 5.0])
        assert res.p_value == 1.0
        assert res.method_detail == "degenerate_zero_variance"

    def test_zero_variance_distinct_means(self):
        assert welch_t_test([5.0, 5.0], [7.0, 7.0]).p_value == 0.0

    def test_matches_scipy_generic_case(self, rng):
        from scipy import stats as sps

        a, b = rng.normal(size=12), rng.normal(0.8, 2.0, size=9)
        res = welch_t_test(a, b)
        expected = sps.ttest_ind(a, b, equal_var=False)
        assert res.p_value == pytest.approx(expected.pvalue, rel=1e-12)
        assert res.statistic == pytest.approx(expected.statistic, rel=1e-12)


class TestFisherExact:
    def test_gender_style_table(self):
        res = fisher_exact([[10, 8], [15, 3]])
        assert res.p_value == pytest.approx(0.14635309073573813, abs=1e-15)
        assert res.test == "fisher_exact"

    def test_homogeneous_table(self):
        assert fisher_exact([[5, 5], [5, 5]]).p_value == 1.0

    def test_diagonal_extreme(self):
        res = fisher_exact([[8, 0], [0, 8]])
        assert res.p_value == pytest.approx(2 / comb(16, 8), rel=1e-12)
        assert res.p_value == pytest.approx(0.0001554001554001554, abs=1e-18)

    def test_matches_scipy(self):
        from scipy import stats as sps

        for table in ([[3, 7], [9, 2]], [[1, 11], [5, 6]], [[10, 8], [15, 3]]):
            res = fisher_exact(table)
            assert res.p_value == pytest.approx(
                sps.fisher_exact(table).pvalue, rel=1e-12
            )

    @pytest.mark.parametrize(
        "table",
        [
            [[-1, 2], [3, 4]],
            [[1.5, 2], [3, 4]],
            [[0, 0], [3, 4]],
            [[0, 2], [0, 4]],
        ],
    )
    def test_rejects_bad_tables(self, table):
        with pytest.raises(ValidationError):
            fisher_exact(table)


class TestRocCurve:
    def test_perfect_separation(self):
        roc = roc_curve([1.0, 2.0, 3.0, 4.0], [0, 0, 1, 1])
        assert roc.auc == 1.0
        assert roc.points[0] == (0.0, 0.0)
        assert roc.points[-1] == (1.0, 1.0)
        assert (0.0, 1.0) in roc.points
        assert roc.polarity == "higher_is_faller"

    def test_all_values_equal(self):
        roc = roc_curve([3.0] * 8, [0, 1] * 4)
        assert roc.auc == 0.5

    def test_orientation_keeps_auc_above_half(self):
        values = [4.0, 3.0, 2.0, 1.0]
        roc = roc_curve(values, [1, 1, 0, 0])
        flipped = roc_curve(values, [0, 0, 1, 1])
        assert roc.auc == flipped.auc == 1.0
        assert {roc.polarity, flipped.polarity} == {"higher_is_faller", "lower_is_faller"}

    def test_points_monotone(self, rng):
        values = rng.normal(size=30)
        labels = rng.integers(0, 2, size=30)
        if labels.sum() in (0, 30):
            labels[0] = 1 - labels[0]
        roc = roc_curve(values, labels)
        fpr = [p[0] for p in roc.points]
        tpr = [p[1] for p in roc.points]
        assert all(a <= b for a, b in zip(fpr, fpr[1:]))
        assert all(a <= b for a, b in zip(tpr, tpr[1:]))

    def test_trapezoid_equals_ranksum(self, rng):
        # heavy ties: small integer alphabet
        for _ in range(100):
            n = int(rng.integers(6, 40))
            values = rng.integers(0, 4, size=n).astype(float)
            labels = rng.integers(0, 2, size=n)
            if labels.sum() in (0, n):
                labels[0] = 1 - labels[0]
            roc = roc_curve(values, labels)
            from scipy.stats import rankdata

            r = rankdata(values if roc.polarity == "higher_is_faller" else -values)
            n_f = labels.sum()
            u = r[labels == 1].sum() - n_f * (n_f + 1) / 2
            rank_auc = u / (n_f * (n - n_f))
            assert roc.auc == pytest.approx(rank_auc, abs=1e-9)

    def test_rejects_single_class(self):
        with pytest.raises(ValidationError):
            roc_curve([1.0, 2.0, 3.0], [1, 1, 1])


class TestOptimalCutoff:
    def test_separable_example(self):
        roc = roc_curve([1.0, 2.0, 3.0, 4.0], [0, 0, 1, 1])
        prob, cut, sens, spec, f1 = optimal_cutoff(roc)
        assert sens == spec == f1 == 1.0
        assert 2.0 < cut < 3.0
        assert prob == pytest.approx(0.5)

    def test_mirrored_distributions_equalize(self):
        # classes mirror each other around 0; symmetry forces sens == spec
        a = np.array([-3.0, -2.0, -1.0, -0.5, 1.5, 2.5])
        values = np.concatenate([a, -a])
        labels = np.array([0] * 6 + [1] * 6)
        roc = roc_curve(values, labels)
        _, _, sens, spec, _ = optimal_cutoff(roc)
        assert sens == pytest.approx(spec)

    def test_prob_cutoff_in_unit_interval(self, rng):
        for _ in range(20):
            values = rng.normal(size=24)
            labels = rng.integers(0, 2, size=24)
            if labels.sum() in (0, 24):
                labels[0] = 1 - labels[0]
            prob, _, _, _, _ = optimal_cutoff(roc_curve(values, labels))
            assert 0.0 <= prob <= 1.0


class TestBootstrap:
    def test_perfect_separation_ci(self):
        values = [1.0, 2.0, 3.0, 10.0, 11.0, 12.0]
        labels = [0, 0, 0, 1, 1, 1]
        assert bootstrap_auc_ci(values, labels, resamples=200, seed=7) == (1.0, 1.0)

    def test_deterministic(self, rng):
        values = rng.normal(size=36) + np.repeat([0.0, 1.0], 18)
        labels = np.repeat([0, 1], 18)
        a = bootstrap_auc_ci(values, labels, resamples=500, seed=42)
        b = bootstrap_auc_ci(values, labels, resamples=500, seed=42)
        assert a == b

    def test_seed_changes_interval(self, rng):
        values = rng.normal(size=36) + np.repeat([0.0, 0.8], 18)
        labels = np.repeat([0, 1], 18)
        a = bootstrap_auc_ci(values, labels, resamples=300, seed=1)
        b = bootstrap_auc_ci(values, labels, resamples=300, seed=2)
        assert a != b

    def test_interval_contains_point_estimate(self, rng):
        for seed in range(5):
            r = np.random.default_rng(seed)
            values = r.normal(size=30) + np.repeat([0.0, 0.6], 15)
            labels = np.repeat([0, 1], 15)
            lo, hi = bootstrap_auc_ci(values, labels, resamples=300, seed=seed)
            auc = roc_curve(values, labels).auc
            assert lo <= auc <= hi

    def test_variable_seed_mixing(self):
        s1 = variable_seed(0, "pse_c")
        s2 = variable_seed(0, "wpsp2_c")
        assert s1 != s2
        assert variable_seed(0, "pse_c") == s1
        assert variable_seed(2**40 + 5, "x") == variable_seed(5, "x")  # 32-bit base


class TestAnalyzeVariable:
    def test_full_result(self, rng):
        values = np.concatenate([rng.normal(size=18), rng.normal(1.2, 1.0, size=18)])
        labels = np.repeat([0, 1], 18)
        res = analyze_variable(values, labels, "demo", resamples=300, seed=9)
        assert res.variable == "demo"
        assert res.auc_ci_95[0] <= res.auc <= res.auc_ci_95[1]
        assert res.bootstrap["resamples"] == 300
        assert res.bootstrap["seed"] == variable_seed(9, "demo")
        assert 0.0 <= res.prob_cutoff <= 1.0
        assert res.f1 is not None
