"""Two-arm trial simulation and Monte Carlo power.

Survival on each arm is piecewise exponential. Patients enter uniformly over
the accrual period and everyone still event-free at the cutoff is censored.
Replicate ``r`` draws from its own stream ``SeedSequence(seed, spawn_key=(r,))``
so results do not depend on how replicates are split across workers.
"""
from __future__ import annotations

import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .data import TwoArmDataset, _tabulate
from .errors import PermSurvError
from .estimators import StepFunction, milestone_test
from .methods import MilestoneSpec, RankScores, parse_method
from .wlrt import WeightSpec, compute_weights, wlrt_from_table

__all__ = [
    "PiecewiseExponential",
    "TrialDesign",
    "Scenario",
    "PowerResult",
    "SCENARIOS",
    "sample_event_time",
    "simulate_trial",
    "power_study",
    "power_table_csv",
    "load_config",
    "run_config",
]

LN2 = math.log(2.0)


@dataclass(frozen=True)
class PiecewiseExponential:
    """Hazard ``rates[k]`` on ``[changepoints[k-1], changepoints[k])``, per month."""

    changepoints: tuple = ()
    rates: tuple = (LN2 / 15,)

    def __post_init__(self):
        cp = tuple(float(c) for c in self.changepoints)
        rates = tuple(float(r) for r in self.rates)
        if len(rates) != len(cp) + 1:
            raise PermSurvError("need exactly one more rate than changepoints")
        if any(r <= 0 or not math.isfinite(r) for r in rates):
            raise PermSurvError("rates must be positive and finite")
        if any(b <= a for a, b in zip((0.0,) + cp, cp)):
            raise PermSurvError("changepoints must be positive and increasing")
        object.__setattr__(self, "changepoints", cp)
        object.__setattr__(self, "rates", rates)

    @classmethod
    def from_medians(cls, medians: Sequence[float], changepoints: Sequence[float] = ()):
        return cls(tuple(changepoints), tuple(LN2 / m for m in medians))

    def _breaks(self):
        b = np.concatenate([[0.0], self.changepoints])
        r = np.asarray(self.rates)
        cum = np.concatenate([[0.0], np.cumsum(r[:-1] * np.diff(b))])
        return b, r, cum

    def cumulative_hazard(self, t):
        b, r, cum = self._breaks()
        t = np.asarray(t, dtype=float)
        seg = np.searchsorted(b, t, side="right") - 1
        return cum[seg] + r[seg] * (t - b[seg])

    def survival(self, t):
        return np.exp(-self.cumulative_hazard(t))

    def invert_cumulative_hazard(self, h):
        """Time at which the cumulative hazard reaches ``h``."""
        b, r, cum = self._breaks()
        h = np.asarray(h, dtype=float)
        seg = np.searchsorted(cum, h, side="right") - 1
        return b[seg] + (h - cum[seg]) / r[seg]

    def to_dict(self) -> dict:
        return {"changepoints": list(self.changepoints), "rates": list(self.rates)}


def sample_event_time(dist: PiecewiseExponential, u):
    """Inverse-CDF draw: the time ``t`` with ``S(t) = u``."""
    u = np.asarray(u, dtype=float)
    if np.any((u <= 0) | (u >= 1)):
        raise PermSurvError("u must lie in (0, 1)")
    out = dist.invert_cumulative_hazard(-np.log(u))
    return out if np.ndim(out) else float(out)


@dataclass(frozen=True)
class TrialDesign:
    n_per_arm: int = 500
    accrual_duration: float = 12.0
    cutoff: float = 36.0
    accrual: str = "uniform"  # or "grid": entries at (i + 0.5) * accrual / n

    def __post_init__(self):
        if self.n_per_arm < 1:
            raise PermSurvError("n_per_arm must be at least 1")
        if not 0 < self.accrual_duration <= self.cutoff:
            raise PermSurvError("need 0 < accrual_duration <= cutoff")
        if self.accrual not in ("uniform", "grid"):
            raise PermSurvError("accrual must be 'uniform' or 'grid'")


@dataclass(frozen=True)
class Scenario:
    name: str
    control: PiecewiseExponential
    experimental: PiecewiseExponential

    def to_dict(self) -> dict:
        return {"name": self.name, "control": self.control.to_dict(), "experimental": self.experimental.to_dict()}


_EXP15 = PiecewiseExponential.from_medians([15])

SCENARIOS = {
    "A": Scenario("(A) Delayed Effect", _EXP15, PiecewiseExponential.from_medians([15, 21], [6])),
    "B": Scenario("(B) Identical", _EXP15, _EXP15),
    "C": Scenario(
        "(C) Worse than Control",
        PiecewiseExponential.from_medians([15, 25], [27]),
        PiecewiseExponential.from_medians([11, 17, 25], [7, 27]),
    ),
    "D": Scenario("(D) Proportional Hazards", _EXP15, PiecewiseExponential.from_medians([19])),
    "E": Scenario("(E) Diminishing Effect", _EXP15, PiecewiseExponential.from_medians([25, 18, 13], [9, 18])),
}


def replicate_rng(seed: int, rep: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(rep,))))


def _entry_times(design: TrialDesign, rng: np.random.Generator) -> np.ndarray:
    n = design.n_per_arm
    if design.accrual == "grid":
        return (np.arange(n) + 0.5) * design.accrual_duration / n
    return rng.uniform(0.0, design.accrual_duration, n)


def simulate_trial(design: TrialDesign, scenario: Scenario, rng: np.random.Generator) -> TwoArmDataset:
    """One trial: control subjects first, then experimental subjects."""
    times, events = [], []
    for dist in (scenario.control, scenario.experimental):
        entry = _entry_times(design, rng)
        latent = dist.invert_cumulative_hazard(rng.standard_exponential(design.n_per_arm))
        follow = design.cutoff - entry
        times.append(np.minimum(latent, follow))
        events.append(latent <= follow)
    arm = np.repeat([0, 1], design.n_per_arm)
    return TwoArmDataset(np.concatenate(times), np.concatenate(events), arm)


@dataclass
class PowerResult:
    scenario: str
    tests: list
    rates: dict
    se: dict
    reps: int
    alpha: float
    seed: int
    errors: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def _reject_all(data: TwoArmDataset, tests, alpha: float) -> tuple[list[bool], list[bool]]:
    table = _tabulate(data.time, data.event, data.arm)
    km = StepFunction(table.t, np.cumprod(1.0 - table.d / table.n))
    rejected, failed = [], []
    for spec in tests:
        try:
            if isinstance(spec, MilestoneSpec):
                p = milestone_test(data, spec.tau).p
            elif isinstance(spec, WeightSpec):
                p = wlrt_from_table(table, compute_weights(spec, table, km)).p
            else:
                raise PermSurvError(f"power_study does not support {spec!r}")
        except PermSurvError:
            rejected.append(False)
            failed.append(True)
            continue
        rejected.append(p < alpha)
        failed.append(False)
    return rejected, failed


def _count_chunk(design, scenario, tests, alpha, seed, reps) -> tuple[np.ndarray, np.ndarray]:
    hits = np.zeros(len(tests), dtype=np.int64)
    errs = np.zeros(len(tests), dtype=np.int64)
    for rep in reps:
        data = simulate_trial(design, scenario, replicate_rng(seed, rep))
        r, f = _reject_all(data, tests, alpha)
        hits += r
        errs += f
    return hits, errs


def _as_spec(test):
    spec = parse_method(test) if isinstance(test, str) else test
    if isinstance(spec, RankScores):
        raise PermSurvError("power_study supports weighted log-rank and milestone tests only")
    return spec


def power_study(
    design: TrialDesign,
    scenario: Scenario | str,
    tests: Sequence,
    reps: int = 1000,
    alpha: float = 0.025,
    seed: int = 0,
    n_jobs: int = 1,
) -> PowerResult:
    """Rejection rates ``P(p < alpha)`` of each test over simulated trials.

    ``tests`` holds method strings (``"logrank"``, ``"fh:0,1"``,
    ``"mwlrt:12"``, ``"milestone:27"``) or parsed specs. A replicate where a
    test cannot be computed counts as a non-rejection and is tallied in
    ``errors``. Asymptotic p-values are used for the log-rank family.
    """
    if reps < 1:
        raise PermSurvError("reps must be at least 1")
    if isinstance(scenario, str):
        scenario = SCENARIOS[scenario]
    specs = [_as_spec(t) for t in tests]
    names = [s.describe() for s in specs]
    if n_jobs == 1:
        hits, errs = _count_chunk(design, scenario, specs, alpha, seed, range(reps))
    else:
        chunks = [range(i, reps, n_jobs) for i in range(n_jobs)]
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            parts = list(pool.map(_count_chunk, *zip(*[(design, scenario, specs, alpha, seed, c) for c in chunks])))
        hits = sum(p[0] for p in parts)
        errs = sum(p[1] for p in parts)
    rates = {nm: float(h) / reps for nm, h in zip(names, hits)}
    se = {nm: math.sqrt(r * (1 - r) / reps) for nm, r in rates.items()}
    errors = {nm: int(e) for nm, e in zip(names, errs) if e}
    return PowerResult(scenario.name, names, rates, se, int(reps), float(alpha), int(seed), errors)


def power_table_csv(results: Sequence[PowerResult]) -> str:
    """Scenarios as rows, tests as columns, rates to two decimals."""
    if not results:
        return ""
    names = results[0].tests
    buf = io.StringIO()
    buf.write(",".join(["scenario"] + names) + "\n")
    for res in results:
        cells = [f'"{res.scenario}"'] + [f"{res.rates[nm]:.2f}" for nm in names]
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()


def _scenario_from(obj) -> Scenario:
    if isinstance(obj, str):
        if obj not in SCENARIOS:
            raise PermSurvError(f"unknown scenario {obj!r}; presets are {sorted(SCENARIOS)}")
        return SCENARIOS[obj]

    def dist(d):
        if "medians" in d:
            return PiecewiseExponential.from_medians(d["medians"], d.get("changepoints", ()))
        return PiecewiseExponential(tuple(d.get("changepoints", ())), tuple(d["rates"]))

    return Scenario(obj["name"], dist(obj["control"]), dist(obj["experimental"]))


def load_config(source) -> dict:
    """Read a simulation config (JSON text, path, or dict).

    Keys: ``design`` (``n_per_arm``, ``accrual_duration``, ``cutoff``,
    ``accrual``), ``scenarios`` (preset letters or inline objects),
    ``tests`` (method strings), and optional ``alpha``, ``reps``, ``seed``.
    """
    if isinstance(source, dict):
        cfg = source
    else:
        text = str(source)
        if text.lstrip().startswith("{"):
            cfg = json.loads(text)
        else:
            with open(text, encoding="utf-8") as fh:
                cfg = json.load(fh)
    try:
        design = TrialDesign(**cfg.get("design", {}))
        scenarios = [_scenario_from(s) for s in cfg.get("scenarios", list(SCENARIOS))]
        tests = [_as_spec(t) for t in cfg["tests"]]
    except (KeyError, TypeError) as exc:
        raise PermSurvError(f"invalid config: {exc}") from None
    return {
        "design": design,
        "scenarios": scenarios,
        "tests": tests,
        "alpha": float(cfg.get("alpha", 0.025)),
        "reps": int(cfg.get("reps", 1000)),
        "seed": int(cfg.get("seed", 0)),
    }


def run_config(cfg: dict, reps: int | None = None, seed: int | None = None, n_jobs: int = 1) -> list[PowerResult]:
    reps = cfg["reps"] if reps is None else reps
    seed = cfg["seed"] if seed is None else seed
    return [
        power_study(cfg["design"], sc, cfg["tests"], reps, cfg["alpha"], seed, n_jobs)
        for sc in cfg["scenarios"]
    ]
