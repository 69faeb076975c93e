"""Closed-form design quantities for a 1:1 log-rank trial."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from scipy.stats import norm

from .errors import PermSurvError

__all__ = [
    "DesignInputs",
    "required_events",
    "events_for_log_hr",
    "minimal_detectable_hr",
    "relative_efficiency",
]


@dataclass(frozen=True)
class DesignInputs:
    """Exponential working assumptions: control median ``mu0`` and target median ``mu1``."""

    mu0: float
    mu1: float
    alpha: float = 0.025
    power: float = 0.9

    def __post_init__(self):
        if self.mu0 == self.mu1:
            raise PermSurvError("zero effect: mu0 equals mu1")
        if not 0 < self.mu0 < self.mu1:
            raise PermSurvError("need 0 < mu0 < mu1")
        if not 0 < self.alpha < 0.5:
            raise PermSurvError("alpha must lie in (0, 0.5)")
        if not 0.5 < self.power < 1:
            raise PermSurvError("power must lie in (0.5, 1)")

    def to_dict(self) -> dict:
        return asdict(self)


def events_for_log_hr(log_hr: float, alpha: float, power: float) -> float:
    """Events needed for a one-sided level-``alpha`` log-rank test to reach ``power``."""
    if log_hr == 0:
        raise PermSurvError("zero effect")
    return 4.0 * ((norm.ppf(power) + norm.isf(alpha)) / log_hr) ** 2


def required_events(inputs: DesignInputs) -> float:
    return events_for_log_hr(-math.log(inputs.mu0 / inputs.mu1), inputs.alpha, inputs.power)


def minimal_detectable_hr(n_events: float, alpha: float = 0.025) -> float:
    """Hazard ratio estimate that would just reach significance with ``n_events`` events."""
    if not n_events > 0:
        raise PermSurvError("n_events must be positive")
    return math.exp(norm.ppf(alpha) * math.sqrt(4.0 / n_events))


def relative_efficiency(power_a: float, power_b: float, alpha: float = 0.025) -> float:
    """Sample-size ratio, in percent, for test B to match test A's power."""
    for p in (power_a, power_b):
        if not alpha < p < 1:
            raise PermSurvError("powers must lie in (alpha, 1)")
    za = norm.isf(alpha)
    return 100.0 * ((za + norm.ppf(power_a)) / (za + norm.ppf(power_b))) ** 2
