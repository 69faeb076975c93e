"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 file not found, 4 malformed input,
5 statistical precondition violated, 6 enumeration cap exceeded. On failure a
JSON object ``{"error": ..., "kind": ..., "exit_code": ...}`` goes to stderr.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict

from .data import read_dataset
from .design import DesignInputs, minimal_detectable_hr, required_events
from .errors import DataError, EnumerationCapError, PermSurvError
from .estimators import milestone_test
from .methods import MilestoneSpec, RankScores, parse_method
from .permutation import (
    DEFAULT_CAP,
    distribution_csv,
    exact_distribution,
    exact_permutation_test,
    monte_carlo_permutation_test,
)
from .scores import gehan_scores, wilcoxon_scores, weighted_scores
from .simulation import load_config, power_table_csv, run_config
from .wlrt import wlrt

EXIT_OK, EXIT_USAGE, EXIT_NOFILE, EXIT_PARSE, EXIT_PRECONDITION, EXIT_CAP = 0, 2, 3, 4, 5, 6

EPILOG = """exit codes:
  0  success
  2  usage error
  3  file not found
  4  malformed input (dataset CSV or config)
  5  statistical precondition violated (no events, degenerate variance, ...)
  6  exact enumeration cap exceeded (use --inference mc)
"""


def _dump(obj) -> str:
    def clean(v):
        if isinstance(v, float) and not math.isfinite(v):
            return str(v)
        if isinstance(v, dict):
            return {k: clean(x) for k, x in v.items()}
        if isinstance(v, (list, tuple)):
            return [clean(x) for x in v]
        return v

    return json.dumps(clean(obj), indent=2, sort_keys=True)


def _score_vector(data, method):
    if isinstance(method, RankScores):
        return wilcoxon_scores(data) if method.name == "wilcoxon" else gehan_scores(data)
    if isinstance(method, MilestoneSpec):
        raise PermSurvError("milestone has no score representation")
    return weighted_scores(data, method)


def cmd_test(args) -> dict:
    data = read_dataset(args.dataset)
    method = parse_method(args.method)
    inference = args.inference
    if inference == "auto":
        inference = "asymptotic" if not isinstance(method, RankScores) else (
            "exact" if math.comb(data.n, data.n1) <= args.cap else "mc"
        )
    out = {"method": method.describe(), "inference": inference, "n0": data.n0, "n1": data.n1}
    if inference == "asymptotic":
        if isinstance(method, RankScores):
            raise PermSurvError(f"{method.name} supports permutation inference only")
        if isinstance(method, MilestoneSpec):
            out["result"] = asdict(milestone_test(data, method.tau))
        else:
            out["result"] = wlrt(data, method).to_dict()
        return out
    scores = _score_vector(data, method)
    if inference == "exact":
        res = exact_permutation_test(scores, data.arm, cap=args.cap)
        if args.dump:
            with open(args.dump, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(distribution_csv(exact_distribution(scores, data.arm, cap=args.cap)))
    else:
        res = monte_carlo_permutation_test(scores, data.arm, B=args.B, seed=args.seed)
    out["result"] = res.to_dict()
    return out


def cmd_scores(args):
    data = read_dataset(args.dataset)
    text = _score_vector(data, parse_method(args.method)).to_csv(data)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        return None
    return text


def cmd_simulate(args) -> dict:
    try:
        cfg = load_config(args.config)
    except ValueError as exc:
        if isinstance(exc, PermSurvError):
            raise DataError(str(exc)) from None
        raise DataError(f"invalid config: {exc}") from None
    results = run_config(cfg, reps=args.reps, seed=args.seed, n_jobs=args.n_jobs)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(power_table_csv(results))
    return {
        "design": asdict(cfg["design"]),
        "results": [r.to_dict() for r in results],
    }


def cmd_design(args) -> dict:
    inputs = DesignInputs(args.mu0, args.mu1, args.alpha, args.power)
    n_e = required_events(inputs)
    return {
        "inputs": inputs.to_dict(),
        "required_events": n_e,
        "minimal_detectable_hr": minimal_detectable_hr(n_e, args.alpha),
    }


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="permsurv",
        description="Weighted log-rank and permutation-of-scores survival tests.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    method_help = "logrank | fh:RHO,GAMMA | mwlrt:TSTAR | milestone:TAU | gehan | wilcoxon"

    p = sub.add_parser("test", help="run a two-sample test on a CSV dataset", epilog=EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("dataset")
    p.add_argument("--method", default="logrank", help=method_help)
    p.add_argument("--inference", choices=["auto", "asymptotic", "exact", "mc"], default="auto")
    p.add_argument("--B", type=int, default=100_000, help="Monte Carlo permutations")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="exact enumeration cap")
    p.add_argument("--dump", help="write the exact permutation distribution to this CSV")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("scores", help="write per-subject scores as CSV", epilog=EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("dataset")
    p.add_argument("--method", default="logrank", help=method_help)
    p.add_argument("--out")
    p.set_defaults(func=cmd_scores)

    p = sub.add_parser("simulate", help="Monte Carlo power from a JSON config", epilog=EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("config")
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--n-jobs", type=int, default=1)
    p.add_argument("--out", help="write the power table CSV here")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("design", help="required events and minimal detectable HR", epilog=EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--mu0", type=float, required=True)
    p.add_argument("--mu1", type=float, required=True)
    p.add_argument("--alpha", type=float, default=0.025)
    p.add_argument("--power", type=float, default=0.9)
    p.set_defaults(func=cmd_design)
    return parser


def _fail(exc: Exception, kind: str, code: int) -> int:
    sys.stderr.write(_dump({"error": str(exc), "kind": kind, "exit_code": code}) + "\n")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out = args.func(args)
    except FileNotFoundError as exc:
        return _fail(exc, "file_not_found", EXIT_NOFILE)
    except DataError as exc:
        return _fail(exc, "parse_error", EXIT_PARSE)
    except EnumerationCapError as exc:
        return _fail(exc, "enumeration_cap", EXIT_CAP)
    except PermSurvError as exc:
        return _fail(exc, "precondition", EXIT_PRECONDITION)
    if isinstance(out, str):
        sys.stdout.write(out)
    elif out is not None:
        sys.stdout.write(_dump(out) + "\n")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
