"""
Observed minus expected on the toy trial
========================================

Tabulate the twelve-patient toy trial at each event time, then run the
log-rank and Fleming-Harrington-(0,1) tests in their observed-minus-expected
form.
"""

# %%
from pathlib import Path

from permsurv import FlemingHarrington, LogRank, build_event_table, read_dataset, wlrt
from permsurv.wlrt import moment_rows

data = read_dataset(Path(__file__).with_name("toy.csv"))
print(f"{data.n0} control and {data.n1} experimental patients")

# %%
# One row per distinct event time: risk sets, events and the hypergeometric
# mean and variance of the arm-1 event count.
table = build_event_table(data)
print(" t   n  n1  O1    E1    V1")
for row, m in zip(table, moment_rows(data)):
    print(f"{row.t:3.0f} {row.n:3d} {row.n1:3d} {m.o1:3d} {m.e1:5.2f} {m.v1:5.2f}")

# %%
# The unweighted sum is the log-rank statistic. A negative value means fewer
# arm-1 events than expected, and the one-sided p-value is Phi(z).
for spec in (LogRank(), FlemingHarrington(0, 1)):
    res = wlrt(data, spec)
    print(f"{res.method:8s} U={res.statistic:+.3f} var={res.variance:.3f} p={res.p:.3f}")
