"""Flat string grammar naming a test method.

``logrank``, ``fh:RHO,GAMMA``, ``mwlrt:TSTAR`` (``inf`` allowed),
``milestone:TAU``, ``gehan``, ``wilcoxon``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import PermSurvError
from .wlrt import FlemingHarrington, LogRank, Modest, WeightSpec

__all__ = ["MilestoneSpec", "RankScores", "parse_method", "method_name"]


@dataclass(frozen=True)
class MilestoneSpec:
    tau: float

    def describe(self) -> str:
        return f"milestone:{self.tau:g}"


@dataclass(frozen=True)
class RankScores:
    name: str  # "gehan" or "wilcoxon"

    def describe(self) -> str:
        return self.name


def _num(text: str, method: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise PermSurvError(f"bad number {text!r} in method {method!r}") from None


def parse_method(text: str) -> WeightSpec | MilestoneSpec | RankScores:
    raw = text.strip().lower()
    name, _, arg = raw.partition(":")
    if name == "logrank" and not arg:
        return LogRank()
    if name in ("gehan", "wilcoxon") and not arg:
        return RankScores(name)
    if name == "fh":
        parts = arg.split(",")
        if len(parts) != 2:
            raise PermSurvError(f"fh needs two parameters, e.g. fh:0,1 (got {text!r})")
        return FlemingHarrington(_num(parts[0], text), _num(parts[1], text))
    if name == "mwlrt" and arg:
        t_star = math.inf if arg == "inf" else _num(arg, text)
        return Modest(t_star)
    if name == "milestone" and arg:
        return MilestoneSpec(_num(arg, text))
    raise PermSurvError(f"unknown method {text!r}")


def method_name(method) -> str:
    return method.describe()
