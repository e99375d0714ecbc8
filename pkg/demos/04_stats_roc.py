"""Group statistics and ROC analysis on a synthetic cohort column.

Walks one variable through the full statistical treatment: U test
(exact vs normal-approximation paths), ROC curve with tie grouping,
the sensitivity=specificity cutoff, and the stratified bootstrap CI.
"""

import numpy as np

from tugait.stats import (
    analyze_variable,
    fisher_exact,
    mann_whitney_u,
    optimal_cutoff,
    roc_curve,
    welch_t_test,
)

rng = np.random.default_rng(11)
fallers = rng.normal(1.0, 1.0, size=18)
nonfallers = rng.normal(0.0, 1.0, size=18)

# --- group comparisons -------------------------------------------------------
u = mann_whitney_u(fallers, nonfallers, variable="demo_feature")
print(f"U test      : U={u.statistic:.0f}  p={u.p_value:.4f}  ({u.method_detail})")

small = mann_whitney_u([1.2, 3.4, 2.2], [4.1, 5.0, 6.3])
print(f"U test small: p={small.p_value:.4f}  ({small.method_detail} — full enumeration)")

w = welch_t_test(fallers, nonfallers, variable="demo_feature")
print(f"Welch t     : t={w.statistic:.3f}  p={w.p_value:.4f}")

g = fisher_exact([[10, 8], [15, 3]], variable="gender")
print(f"Fisher      : odds={g.statistic:.3f}  p={g.p_value:.4f}")

# --- ROC ---------------------------------------------------------------------
values = np.concatenate([fallers, nonfallers])
labels = np.array([1] * 18 + [0] * 18)
roc = roc_curve(values, labels, variable="demo_feature")
print(f"\nROC: AUC={roc.auc:.3f}  polarity={roc.polarity}  {len(roc.points)} curve points")
print("  first points:", " ".join(f"({f:.2f},{t:.2f})" for f, t in roc.points[:5]), "...")

prob, cut, sens, spec, f1 = optimal_cutoff(roc)
print(
    f"cutoff: value={cut:.3f} (prob position {prob:.2f})  "
    f"sens={sens:.2f} spec={spec:.2f} f1={f1:.2f}"
)

# --- bootstrap ----------------------------------------------------------------
full = analyze_variable(values, labels, "demo_feature", resamples=2000, seed=0)
lo, hi = full.auc_ci_95
print(f"bootstrap 95% CI: ({lo:.3f}, {hi:.3f})  [{full.bootstrap['resamples']} resamples]")
rerun = analyze_variable(values, labels, "demo_feature", resamples=2000, seed=0)
print(f"deterministic under fixed seed: {full.auc_ci_95 == rerun.auc_ci_95}")
