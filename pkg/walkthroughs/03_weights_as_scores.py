"""
What a weight function does to patient scores
=============================================

Any weighted log-rank test is a permutation test on derived scores. The
Fleming-Harrington-(0,1) weights give an early death a better (lower) score
than a later one; the modestly-weighted weights keep event scores
nonincreasing in time.
"""

# %%
from pathlib import Path

from permsurv import FlemingHarrington, LogRank, Modest, arm1_score_sum, read_dataset, weighted_scores, wlrt

data = read_dataset(Path(__file__).with_name("toy.csv"))
specs = [LogRank(), FlemingHarrington(0, 1), Modest(12.0), Modest(float("inf"))]

# %%
print("  time  " + "  ".join(f"{s.describe():>10s}" for s in specs))
scores = [weighted_scores(data, s).scores for s in specs]
for i in range(data.n):
    flag = "" if data.event[i] else "+"
    print(f"{data.time[i]:5.0f}{flag:1s} " + "  ".join(f"{a[i]:10.4f}" for a in scores))

# %%
# The arm-1 score sum reproduces the observed-minus-expected statistic.
for spec, a in zip(specs, scores):
    print(f"{spec.describe():10s} sum over arm 1 = {arm1_score_sum(a, data.arm):+.6f}"
          f"  weighted O-E = {wlrt(data, spec).statistic:+.6f}")

# %%
# Plot-ready CSV for score-versus-rank panels.
print(weighted_scores(data, FlemingHarrington(0, 1)).to_csv(data)[:200])
