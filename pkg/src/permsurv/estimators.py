"""Kaplan-Meier and Nelson-Aalen survival estimates, and the milestone test."""
from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .data import TwoArmDataset
from .errors import DegenerateError, NoEventsError, NotEstimableError

__all__ = [
    "StepFunction",
    "MilestoneResult",
    "kaplan_meier",
    "nelson_aalen_survival",
    "greenwood_variance",
    "milestone_test",
]


@dataclass(frozen=True, eq=False)
class StepFunction:
    """Right-continuous nonincreasing step function starting at 1.

    ``values[i]`` holds on ``[times[i], times[i+1])``; before ``times[0]`` the
    function equals 1.
    """

    times: np.ndarray
    values: np.ndarray

    def __call__(self, t):
        idx = np.searchsorted(self.times, t, side="right") - 1
        out = np.where(idx >= 0, self.values[np.maximum(idx, 0)], 1.0)
        return out if np.ndim(out) else float(out)

    def left(self, t):
        """Left limit ``S(t-)``."""
        idx = np.searchsorted(self.times, t, side="left") - 1
        out = np.where(idx >= 0, self.values[np.maximum(idx, 0)], 1.0)
        return out if np.ndim(out) else float(out)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("time,value\n")
        buf.write("0,1\n")
        for t, v in zip(self.times, self.values):
            buf.write(f"{t:.17g},{v:.17g}\n")
        return buf.getvalue()


def _risk_counts(time: np.ndarray, event: np.ndarray):
    t = np.unique(time[event])
    if t.size == 0:
        raise NoEventsError("no events")
    x = np.sort(time)
    n = x.size - np.searchsorted(x, t, side="left")
    d = np.bincount(np.searchsorted(t, time[event]), minlength=t.size)
    return t, n, d


def _select(data, arm):
    if isinstance(data, TwoArmDataset):
        if arm is None:
            return data.time, data.event
        return data.subset(arm)
    time, event = data
    return np.asarray(time, dtype=float), np.asarray(event, dtype=bool)


def kaplan_meier(data, arm: int | None = None) -> StepFunction:
    """Product-limit estimate of the survival function.

    Parameters
    ----------
    data : TwoArmDataset or (time, event) tuple
    arm : {None, 0, 1}
        Restrict to one arm; ``None`` pools both arms.
    """
    time, event = _select(data, arm)
    t, n, d = _risk_counts(time, event)
    return StepFunction(t, np.cumprod(1.0 - d / n))


def nelson_aalen_survival(data, arm: int | None = None) -> StepFunction:
    """Survival function ``exp(-H(t))`` with ``H`` the Nelson-Aalen cumulative hazard."""
    time, event = _select(data, arm)
    t, n, d = _risk_counts(time, event)
    return StepFunction(t, np.exp(-np.cumsum(d / n)))


def greenwood_variance(data, tau: float, arm: int | None = None) -> tuple[float, float]:
    """Kaplan-Meier estimate at ``tau`` and its Greenwood variance.

    The variance is taken as 0 when the estimate itself is 0.
    """
    time, event = _select(data, arm)
    t, n, d = _risk_counts(time, event)
    upto = t <= tau
    s = float(np.prod(1.0 - d[upto] / n[upto]))
    if s == 0.0:
        return 0.0, 0.0
    nn, dd = n[upto], d[upto]
    return s, s * s * float(np.sum(dd / (nn * (nn - dd))))


@dataclass(frozen=True)
class MilestoneResult:
    tau: float
    s0_hat: float
    s1_hat: float
    se: float
    z: float
    p: float


def milestone_test(data: TwoArmDataset, tau: float) -> MilestoneResult:
    """Compare per-arm Kaplan-Meier survival at a fixed timepoint.

    ``z = (S1(tau) - S0(tau)) / se`` with Greenwood variances summed over arms
    and ``p = 1 - Phi(z)``, so a small p favours arm 1.

    Raises
    ------
    NotEstimableError
        If either arm has nobody at risk at ``tau-``.
    DegenerateError
        If the standard error is zero.
    """
    est = []
    for arm in (0, 1):
        time, event = data.subset(arm)
        if not np.any(time >= tau):
            raise NotEstimableError(f"milestone not estimable: arm {arm} has no follow-up at {tau}")
        if not np.any(event):
            est.append((1.0, 0.0))
        else:
            est.append(greenwood_variance((time, event), tau))
    (s0, v0), (s1, v1) = est
    se = math.sqrt(v0 + v1)
    if se == 0.0:
        raise DegenerateError("degenerate variance: milestone standard error is zero")
    z = (s1 - s0) / se
    return MilestoneResult(float(tau), s0, s1, se, z, float(norm.sf(z)))
