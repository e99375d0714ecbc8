"""Hypothesis tests and ROC analysis over the cohort table.

Everything here is a pure function of its inputs.  The fallers are the
positive class throughout: sensitivity is the faller detection rate and
precision in the f1 score counts predicted fallers.

Conventions:

* Mann-Whitney U: two-sided.  Exact tail enumeration (integer counting
  over all rank assignments) when the smaller group has <= 12 subjects
  and the pooled sample is tie-free; otherwise the normal approximation
  with tie and continuity corrections.  The path taken is reported.
* Fisher: exact two-sided via hypergeometric enumeration in integer
  arithmetic — tables are included when their count is <= the observed
  table's count, so no floating-point fuzz decides inclusion.
* ROC: thresholds sweep the distinct observed values, ties grouped into
  single steps (diagonal moves), which makes the trapezoid area equal
  the midrank Mann-Whitney AUC.  Polarity is auto-oriented so AUC >= 0.5
  and recorded.
* Bootstrap CI: stratified percentile bootstrap with the orientation
  frozen from the full sample, so resamples where discrimination
  collapses honestly drag the lower bound down.
"""

from __future__ import annotations

import math
import warnings
import zlib
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy import stats as sps

from .errors import ValidationError

EXACT_U_MAX_N = 12  # exact enumeration bound for the smaller group


@dataclass(frozen=True)
class GroupComparison:
    variable: str
    test: str  # mann_whitney_u | welch_t | fisher_exact
    statistic: float
    p_value: float
    method_detail: str = ""
    n_faller: int | None = None
    n_nonfaller: int | None = None
    mean_faller: float | None = None
    sd_faller: float | None = None
    mean_nonfaller: float | None = None
    sd_nonfaller: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.p_value <= 1.0:
            raise AssertionError(f"p-value out of range: {self.p_value}")


@dataclass(frozen=True)
class RocResult:
    """ROC curve with optimal-cutoff and bootstrap fields.

    ``points`` runs from (0,0) to (1,1); ``thresholds`` holds the
    original-unit decision value for each point after the first (the
    first point is the classify-nothing sentinel).  The decision rule is
    "value >= threshold -> faller" for ``higher_is_faller`` polarity and
    "value <= threshold -> faller" otherwise.
    """

    variable: str
    polarity: str  # higher_is_faller | lower_is_faller
    points: tuple  # ((fpr, tpr), ...)
    thresholds: tuple  # original-unit value per point, aligned with points[1:]
    auc: float
    counts: tuple  # ((tp, fp), ...) aligned with points
    n_faller: int
    n_nonfaller: int
    sensitivity: float | None = None
    specificity: float | None = None
    f1: float | None = None
    prob_cutoff: float | None = None
    value_cutoff: float | None = None
    auc_ci_95: tuple | None = None
    bootstrap: dict | None = None


# ---------------------------------------------------------------------------
# Mann-Whitney U


def _midranks(pooled: np.ndarray) -> np.ndarray:
    return sps.rankdata(pooled, method="average")


def _u_statistic(group_a: np.ndarray, group_b: np.ndarray) -> float:
    pooled = np.concatenate([group_a, group_b])
    ranks = _midranks(pooled)
    n_a = group_a.size
    r_a = float(ranks[:n_a].sum())
    return r_a - n_a * (n_a + 1) / 2.0


def _exact_count_le(n_a: int, n_b: int, u_max: int) -> int:
    """Number of tie-free rank assignments with U_a <= u_max (exact integer)."""

    @lru_cache(maxsize=None)
    def ways(i: int, j: int, u: int) -> int:
        # largest remaining rank is an 'a' (beats all j b's) or a 'b'
        if u < 0:
            return 0
        if i == 0 or j == 0:
            return 1 if u == 0 else 0
        return ways(i - 1, j, u - j) + ways(i, j - 1, u)

    total = 0
    for u in range(min(u_max, n_a * n_b) + 1):
        total += ways(n_a, n_b, u)
    ways.cache_clear()
    return total


def mann_whitney_u(group_a, group_b, variable: str = "") -> GroupComparison:
    """Two-sided Mann-Whitney U test; group_a fills the faller slots.

    Exact path: ``p = min(1, 2 * P(U <= min(U_a, U_b)))`` with the tail
    probability counted over all ``C(n_a+n_b, n_a)`` rank assignments.
    Approximate path: normal with tie-corrected variance and 0.5
    continuity correction; a zero-variance pooled sample (all values
    identical) gives p = 1.
    """
    a = np.asarray(group_a, dtype=float)
    b = np.asarray(group_b, dtype=float)
    if a.size < 2 or b.size < 2:
        raise ValidationError("each group needs >= 2 observations")

    n_a, n_b = a.size, b.size
    u_a = _u_statistic(a, b)
    pooled = np.concatenate([a, b])
    has_ties = np.unique(pooled).size < pooled.size

    if min(n_a, n_b) <= EXACT_U_MAX_N and not has_ties:
        u_min = int(round(min(u_a, n_a * n_b - u_a)))
        count = _exact_count_le(n_a, n_b, u_min)
        total = math.comb(n_a + n_b, n_a)
        p = min(1.0, (2 * count) / total)
        detail = "exact"
    else:
        n = n_a + n_b
        mu = n_a * n_b / 2.0
        _, tie_counts = np.unique(pooled, return_counts=True)
        tie_term = float(np.sum(tie_counts**3 - tie_counts))
        var = n_a * n_b / 12.0 * ((n + 1) - tie_term / (n * (n - 1)))
        if var <= 0.0:
            p = 1.0
        else:
            z = max(0.0, (abs(u_a - mu) - 0.5)) / math.sqrt(var)
            p = math.erfc(z / math.sqrt(2.0))
        detail = "normal_approx"

    return GroupComparison(
        variable=variable,
        test="mann_whitney_u",
        statistic=float(u_a),
        p_value=float(p),
        method_detail=detail,
        n_faller=n_a,
        n_nonfaller=n_b,
        mean_faller=float(a.mean()),
        sd_faller=float(a.std(ddof=1)),
        mean_nonfaller=float(b.mean()),
        sd_nonfaller=float(b.std(ddof=1)),
    )


def welch_t_test(group_a, group_b, variable: str = "") -> GroupComparison:
    """Two-sided Welch unequal-variance t-test; group_a fills the faller slots."""
    a = np.asarray(group_a, dtype=float)
    b = np.asarray(group_b, dtype=float)
    if a.size < 2 or b.size < 2:
        raise ValidationError("each group needs >= 2 observations")

    var_a, var_b = a.var(ddof=1), b.var(ddof=1)
    if var_a == 0.0 and var_b == 0.0:
        # degenerate: no within-group spread at all
        t_stat, p = 0.0, (1.0 if a.mean() == b.mean() else 0.0)
        detail = "degenerate_zero_variance"
    else:
        with warnings.catch_warnings():
            # near-constant columns trip scipy's precision-loss warning;
            # the exactly-degenerate case is guarded above
            warnings.filterwarnings("ignore", message="Precision loss", category=RuntimeWarning)
            t_stat, p = sps.ttest_ind(a, b, equal_var=False)
        detail = "welch_satterthwaite"
    return GroupComparison(
        variable=variable,
        test="welch_t",
        statistic=float(t_stat),
        p_value=float(p),
        method_detail=detail,
        n_faller=a.size,
        n_nonfaller=b.size,
        mean_faller=float(a.mean()),
        sd_faller=float(a.std(ddof=1)),
        mean_nonfaller=float(b.mean()),
        sd_nonfaller=float(b.std(ddof=1)),
    )


def fisher_exact(table, variable: str = "") -> GroupComparison:
    """Two-sided Fisher exact test on a 2x2 count table.

    Enumerates every table with the observed margins and sums the
    probabilities of those no more likely than the observed one.  The
    comparison runs on integer table weights ``C(r1, a) * C(r2, c1 - a)``,
    so inclusion is decided exactly.
    """
    t = np.asarray(table)
    if t.shape != (2, 2):
        raise ValidationError(f"expected a 2x2 table, got shape {t.shape}")
    if not np.issubdtype(t.dtype, np.integer):
        if not np.all(t == np.floor(t)):
            raise ValidationError("counts must be integers")
        t = t.astype(int)
    if (t < 0).any():
        raise ValidationError("counts must be non-negative")
    a, b = int(t[0, 0]), int(t[0, 1])
    c, d = int(t[1, 0]), int(t[1, 1])
    r1, r2, c1 = a + b, c + d, a + c
    if r1 == 0 or r2 == 0 or c1 == 0 or (b + d) == 0:
        raise ValidationError("all margins must be positive")

    observed = math.comb(r1, a) * math.comb(r2, c)
    total = math.comb(r1 + r2, c1)
    lo, hi = max(0, c1 - r2), min(r1, c1)
    num = 0
    for x in range(lo, hi + 1):
        w = math.comb(r1, x) * math.comb(r2, c1 - x)
        if w <= observed:
            num += w
    p = num / total

    odds = math.inf if b * c == 0 else (a * d) / (b * c)
    return GroupComparison(
        variable=variable,
        test="fisher_exact",
        statistic=float(odds),
        p_value=float(p),
        method_detail="exact_enumeration",
        n_faller=r1,
        n_nonfaller=r2,
    )


# ---------------------------------------------------------------------------
# ROC


def _rank_auc(score: np.ndarray, labels: np.ndarray) -> float:
    """Midrank AUC: P(faller score > non-faller score) + 0.5 P(tie)."""
    ranks = _midranks(score)
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    r_pos = float(ranks[labels == 1].sum())
    return (r_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def _validate_roc_input(values: np.ndarray, labels: np.ndarray):
    if values.size != labels.size:
        raise ValidationError("values and labels must have equal length")
    if not np.isin(labels, (0, 1)).all():
        raise ValidationError("labels must be 0/1")
    if not np.isfinite(values).all():
        raise ValidationError("values must be finite")
    if labels.sum() in (0, labels.size):
        raise ValidationError("both classes must be present")


def roc_curve(values, labels, variable: str = "") -> RocResult:
    """Build the tie-grouped ROC curve with auto-oriented polarity.

    Thresholds are the distinct observed values (descending in oriented
    score); each adds one point.  The trapezoid area over these points
    equals the midrank AUC identity by construction.
    """
    v = np.asarray(values, dtype=float)
    y = np.asarray(labels, dtype=int)
    _validate_roc_input(v, y)

    raw_auc = _rank_auc(v, y)
    if raw_auc >= 0.5:
        polarity, score = "higher_is_faller", v
    else:
        polarity, score = "lower_is_faller", -v

    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    order = np.argsort(-score, kind="stable")
    s_sorted, y_sorted = score[order], y[order]

    points = [(0.0, 0.0)]
    counts = [(0, 0)]
    thresholds = []
    tp = fp = 0
    i = 0
    while i < s_sorted.size:
        j = i
        while j < s_sorted.size and s_sorted[j] == s_sorted[i]:
            j += 1
        tp += int(y_sorted[i:j].sum())
        fp += (j - i) - int(y_sorted[i:j].sum())
        points.append((fp / n_neg, tp / n_pos))
        counts.append((tp, fp))
        # report thresholds in the variable's original units
        thr = s_sorted[i] if polarity == "higher_is_faller" else -s_sorted[i]
        thresholds.append(float(thr))
        i = j

    auc = 0.0
    for (x0, y0), (x1, y1) in zip(points[:-1], points[1:]):
        auc += (x1 - x0) * (y0 + y1) / 2.0

    return RocResult(
        variable=variable,
        polarity=polarity,
        points=tuple(points),
        thresholds=tuple(thresholds),
        auc=float(auc),
        counts=tuple(counts),
        n_faller=n_pos,
        n_nonfaller=n_neg,
    )


def _point_metrics(roc: RocResult, idx: int) -> tuple[float, float, float]:
    """(sensitivity, specificity, f1) at curve point ``idx``."""
    fpr, tpr = roc.points[idx]
    tp, fp = roc.counts[idx]
    sens = tpr
    spec = 1.0 - fpr
    if tp + fp == 0:
        f1 = 0.0  # nothing predicted positive -> precision undefined, score 0
    else:
        precision = tp / (tp + fp)
        f1 = 0.0 if precision + sens == 0 else 2 * precision * sens / (precision + sens)
    return sens, spec, f1


def _cutoff_value(roc: RocResult, idx: int) -> float:
    """Original-unit decision value for curve point ``idx``.

    The cutoff is placed mid-gap between the oriented scores the point
    separates, so any value in the open interval classifies identically;
    sentinel points extend the last gap (or unit, for a single distinct
    value) outward.
    """
    sign = 1.0 if roc.polarity == "higher_is_faller" else -1.0
    su = [sign * t for t in roc.thresholds]  # oriented scores, descending
    m = len(su)
    if idx == 0:
        gap = (su[0] - su[1]) / 2.0 if m >= 2 else 1.0
        cut = su[0] + gap
    elif idx < m:
        cut = (su[idx - 1] + su[idx]) / 2.0
    else:  # classify-everything point
        gap = (su[m - 2] - su[m - 1]) / 2.0 if m >= 2 else 1.0
        cut = su[m - 1] - gap
    return sign * cut


def optimal_cutoff(roc: RocResult) -> tuple[float, float, float, float, float]:
    """Pick the cutoff equalizing sensitivity and specificity.

    Minimizes ``|sens - spec|``; ties break toward the larger Youden
    J = sens + spec - 1, then toward the stricter threshold.  Returns
    ``(prob_cutoff, value_cutoff, sensitivity, specificity, f1)`` where
    prob_cutoff is the min-max-normalized position of the value cutoff
    within the variable's observed range, clamped to [0, 1].
    """
    best_idx, best_key = None, None
    for idx in range(len(roc.points)):
        sens, spec, _ = _point_metrics(roc, idx)
        key = (abs(sens - spec), -(sens + spec - 1.0))
        if best_key is None or key < best_key:
            best_idx, best_key = idx, key

    sens, spec, f1 = _point_metrics(roc, best_idx)
    value_cutoff = _cutoff_value(roc, best_idx)

    # thresholds enumerate every distinct observed value, in original units
    lo, hi = min(roc.thresholds), max(roc.thresholds)
    if hi == lo:
        prob = 0.5
    else:
        prob = (value_cutoff - lo) / (hi - lo)
    prob = min(1.0, max(0.0, prob))
    return float(prob), float(value_cutoff), float(sens), float(spec), float(f1)


def variable_seed(base_seed: int, variable: str) -> int:
    """Stable per-variable bootstrap seed, independent of analysis order."""
    return (int(base_seed) & 0xFFFFFFFF) ^ zlib.crc32(variable.encode("utf-8"))


def bootstrap_auc_ci(
    values, labels, resamples: int = 2000, seed: int = 0
) -> tuple[float, float]:
    """Stratified percentile bootstrap 95% CI of the AUC.

    Resamples within each class (class sizes preserved), recomputes the
    midrank AUC with the polarity fixed from the full sample, and takes
    the 2.5/97.5 percentiles.  The interval is widened, if needed, to
    contain the full-sample point estimate (a percentile interval can
    otherwise exclude it on skewed resample distributions).
    """
    v = np.asarray(values, dtype=float)
    y = np.asarray(labels, dtype=int)
    _validate_roc_input(v, y)

    score = v if _rank_auc(v, y) >= 0.5 else -v
    pos, neg = score[y == 1], score[y == 0]
    point = _rank_auc(score, y)

    rng = np.random.default_rng(seed)
    aucs = np.empty(resamples)
    ones = np.ones(pos.size, dtype=int)
    zeros = np.zeros(neg.size, dtype=int)
    lab = np.concatenate([ones, zeros])
    for r in range(resamples):
        sp = pos[rng.integers(0, pos.size, size=pos.size)]
        sn = neg[rng.integers(0, neg.size, size=neg.size)]
        aucs[r] = _rank_auc(np.concatenate([sp, sn]), lab)
    low, high = np.percentile(aucs, [2.5, 97.5])
    return float(min(low, point)), float(max(high, point))


def analyze_variable(
    values, labels, variable: str, resamples: int = 2000, seed: int = 0
) -> RocResult:
    """Full single-variable ROC analysis: curve, optimal cutoff, bootstrap CI."""
    roc = roc_curve(values, labels, variable=variable)
    prob, cut, sens, spec, f1 = optimal_cutoff(roc)
    var_seed = variable_seed(seed, variable)
    ci = bootstrap_auc_ci(values, labels, resamples=resamples, seed=var_seed)
    return replace(
        roc,
        sensitivity=sens,
        specificity=spec,
        f1=f1,
        prob_cutoff=prob,
        value_cutoff=cut,
        auc_ci_95=ci,
        bootstrap={"resamples": int(resamples), "seed": int(var_seed)},
    )
