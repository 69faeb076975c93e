"""Weighted log-rank tests in observed-minus-expected form.

At each distinct event time the arm-1 event count is hypergeometric given the
table margins. The weighted statistic is ``sum_j w_j (O_j - E_j)`` with
variance ``sum_j w_j**2 V_j``, and the one-sided p-value is ``Phi(z)``: a
negative statistic (fewer arm-1 events than expected) favours arm 1.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.stats import norm

from .data import EventTable, EventTableRow, TwoArmDataset, build_event_table
from .errors import DegenerateError, PermSurvError
from .estimators import StepFunction, kaplan_meier

__all__ = [
    "WeightSpec",
    "LogRank",
    "FlemingHarrington",
    "Modest",
    "Custom",
    "MomentRow",
    "TestResult",
    "IntervalEstimate",
    "HazardRatioSummary",
    "hypergeometric_moments",
    "moments",
    "compute_weights",
    "moment_rows",
    "wlrt",
    "peto_hazard_ratio",
    "interval_decomposition",
]

Z975 = 1.959963984540054


class WeightSpec:
    """Base class for weight-function choices."""

    def describe(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class LogRank(WeightSpec):
    def describe(self) -> str:
        return "logrank"


@dataclass(frozen=True)
class FlemingHarrington(WeightSpec):
    """``w_j = S(t_j-)**rho * (1 - S(t_j-))**gamma`` with pooled Kaplan-Meier ``S``."""

    rho: float = 0.0
    gamma: float = 1.0

    def __post_init__(self):
        if not (self.rho >= 0 and self.gamma >= 0):
            raise PermSurvError("Fleming-Harrington parameters must be nonnegative")

    def describe(self) -> str:
        return f"fh:{self.rho:g},{self.gamma:g}"


@dataclass(frozen=True)
class Modest(WeightSpec):
    """Modestly-weighted log-rank weights ``1 / max(S(t_j-), S(t_star))``.

    ``t_star = inf`` gives ``1 / S(t_j-)``.
    """

    t_star: float

    def __post_init__(self):
        if not (self.t_star > 0) or math.isnan(self.t_star):
            raise PermSurvError("t_star must be positive")

    def describe(self) -> str:
        return f"mwlrt:{self.t_star:g}"


@dataclass(frozen=True)
class Custom(WeightSpec):
    weights: tuple

    def __init__(self, weights):
        object.__setattr__(self, "weights", tuple(float(w) for w in weights))

    def describe(self) -> str:
        return "custom"


@dataclass(frozen=True)
class MomentRow:
    t: float
    o1: int
    e1: float
    v1: float
    w: float


@dataclass(frozen=True)
class TestResult:
    statistic: float
    variance: float
    z: float
    p: float
    method: str

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class IntervalEstimate:
    lower: float
    upper: float
    theta: float | None
    info: float
    events: int
    empty: bool


@dataclass(frozen=True)
class HazardRatioSummary:
    theta_hat: float
    log_hr: float
    ci_low: float
    ci_high: float
    intervals: list[IntervalEstimate] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def hypergeometric_moments(row: EventTableRow) -> tuple[float, float]:
    """Mean and variance of the arm-1 event count at one event time."""
    e1 = row.d * row.n1 / row.n
    if row.n <= 1:
        return e1, 0.0
    v1 = row.n0 * row.n1 * row.d * (row.n - row.d) / (row.n ** 2 * (row.n - 1))
    return e1, v1


def moments(table: EventTable) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised ``(O1, E1, V1)`` over all rows of ``table``."""
    n = table.n.astype(float)
    d = table.d.astype(float)
    e1 = d * table.n1 / n
    with np.errstate(divide="ignore", invalid="ignore"):
        v1 = np.where(n > 1, table.n0 * table.n1 * d * (n - d) / (n * n * (n - 1)), 0.0)
    return table.d1.astype(float), e1, v1


def compute_weights(spec: WeightSpec, table: EventTable, pooled_km: StepFunction) -> np.ndarray:
    """Per-event-time weights for ``spec``.

    ``pooled_km`` must be the pooled Kaplan-Meier estimate of the dataset that
    produced ``table``; weights use its left limits ``S(t_j-)``.
    """
    k = len(table)
    if isinstance(spec, LogRank):
        return np.ones(k)
    if isinstance(spec, Custom):
        w = np.asarray(spec.weights, dtype=float)
        if w.size != k:
            raise PermSurvError(f"custom weights have length {w.size}, expected {k}")
        return w
    s_minus = np.asarray(pooled_km.left(table.t), dtype=float)
    if isinstance(spec, FlemingHarrington):
        return np.power(s_minus, spec.rho) * np.power(1.0 - s_minus, spec.gamma)
    if isinstance(spec, Modest):
        floor = 0.0 if math.isinf(spec.t_star) else pooled_km(spec.t_star)
        return 1.0 / np.maximum(s_minus, floor)
    raise TypeError(f"unknown weight spec {spec!r}")


def moment_rows(data: TwoArmDataset, spec: WeightSpec = LogRank()) -> list[MomentRow]:
    table = build_event_table(data)
    w = compute_weights(spec, table, kaplan_meier(data))
    o1, e1, v1 = moments(table)
    return [
        MomentRow(float(t), int(o), float(e), float(v), float(wj))
        for t, o, e, v, wj in zip(table.t, o1, e1, v1, w)
    ]


def _finish(statistic: float, variance: float, method: str) -> TestResult:
    if not variance > 0:
        raise DegenerateError("degenerate variance")
    z = statistic / math.sqrt(variance)
    return TestResult(statistic, variance, z, float(norm.cdf(z)), method)


def wlrt_from_table(table: EventTable, weights: np.ndarray, method: str = "custom") -> TestResult:
    o1, e1, v1 = moments(table)
    statistic = math.fsum(weights * (o1 - e1))
    variance = math.fsum(weights * weights * v1)
    return _finish(statistic, variance, method)


def wlrt(data: TwoArmDataset, spec: WeightSpec = LogRank()) -> TestResult:
    """Weighted log-rank test with one-sided p-value ``Phi(z)``.

    Raises
    ------
    DegenerateError
        If ``sum w**2 V`` is zero.
    """
    table = build_event_table(data)
    w = compute_weights(spec, table, kaplan_meier(data))
    return wlrt_from_table(table, w, spec.describe())


def peto_hazard_ratio(data: TwoArmDataset, level: float = 0.95) -> HazardRatioSummary:
    """Peto one-step hazard ratio ``exp(sum(O - E) / sum V)`` with a Wald interval."""
    o1, e1, v1 = moments(build_event_table(data))
    info = math.fsum(v1)
    if not info > 0:
        raise DegenerateError("degenerate variance: sum of V is zero")
    log_hr = math.fsum(o1 - e1) / info
    q = Z975 if level == 0.95 else float(norm.ppf(0.5 + level / 2))
    half = q / math.sqrt(info)
    return HazardRatioSummary(
        math.exp(log_hr), log_hr, math.exp(log_hr - half), math.exp(log_hr + half)
    )


def interval_decomposition(data: TwoArmDataset, cutpoints=(), level: float = 0.95) -> HazardRatioSummary:
    """Split the Peto estimate into per-interval hazard ratios.

    ``cutpoints`` are the interior boundaries ``tau_1 < ... < tau_m``; the
    intervals are ``(0, tau_1], ..., (tau_m, inf)``. The overall log hazard
    ratio is the information-weighted mean of the interval log hazard ratios.
    Intervals with zero information are flagged ``empty`` and left out of the
    weighted mean.
    """
    cuts = np.asarray(cutpoints, dtype=float).ravel()
    if cuts.size and (np.any(np.diff(cuts) <= 0) or cuts[0] <= 0):
        raise PermSurvError("cutpoints must be positive and strictly increasing")
    table = build_event_table(data)
    o1, e1, v1 = moments(table)
    summary = peto_hazard_ratio(data, level)
    bounds = np.concatenate([[0.0], cuts, [np.inf]])
    which = np.searchsorted(cuts, table.t, side="left")
    intervals = []
    for k in range(bounds.size - 1):
        sel = which == k
        info = math.fsum(v1[sel])
        events = int(table.d[sel].sum())
        if info > 0:
            theta = math.exp(math.fsum(o1[sel] - e1[sel]) / info)
            intervals.append(IntervalEstimate(float(bounds[k]), float(bounds[k + 1]), theta, info, events, False))
        else:
            warnings.warn(f"interval ({bounds[k]:g}, {bounds[k + 1]:g}] has zero information; excluded")
            intervals.append(IntervalEstimate(float(bounds[k]), float(bounds[k + 1]), None, 0.0, events, True))
    return HazardRatioSummary(summary.theta_hat, summary.log_hr, summary.ci_low, summary.ci_high, intervals)


def reconstruct_theta(intervals: list[IntervalEstimate]) -> float:
    """Information-weighted geometric mean of the non-empty interval estimates."""
    used = [iv for iv in intervals if not iv.empty]
    num = math.fsum(iv.info * math.log(iv.theta) for iv in used)
    return math.exp(num / math.fsum(iv.info for iv in used))
