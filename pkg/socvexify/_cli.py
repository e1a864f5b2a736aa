from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile

import numpy as np
import pandas as pd

from socvexify._bruteforce import solve_bruteforce
from socvexify._config import (
    DEFAULT_ALPHA,
    DEFAULT_SEED,
    get_tolerances,
    set_tolerances,
    tolerances_from_environment,
)
from socvexify._conic_set import ConicSet
from socvexify._envelope import concave_envelope
from socvexify._errors import SocvexifyError
from socvexify._hull_verify import (
    HullNumericalLimit,
    example1_fixture,
    example2_fixture,
    membership_conv_perspective,
    membership_W,
    run_hull_suite,
    verify_hull_equivalence,
)
from socvexify._knapsack import KnapsackInstance, build_ccp, build_soc, generate_kp, generate_mkp
from socvexify._model_ir import export_model
from socvexify._norms import NormKind
from socvexify._reformulate import normalize_assumption2
from socvexify._relaxation import default_grid, verify_prop1
from socvexify._solve_result import SolveStatus

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_INPUT_ERROR = 2
EXIT_NUMERICAL_LIMIT = 3

FORMULATIONS = {"ccp": build_ccp, "soc": build_soc}


def atomic_write(path: str, text: str) -> None:
    """Write text to path through a temporary file in the same directory and a rename."""
    directory = os.path.dirname(os.path.abspath(path))
    handle, temporary = tempfile.mkstemp(dir=directory, prefix=".socvexify-", suffix=".tmp")
    try:
        with os.fdopen(handle, "w", newline="") as f:
            f.write(text)
        os.replace(temporary, path)
    except BaseException:
        if os.path.exists(temporary):
            os.remove(temporary)
        raise


def write_frame(path: str, frame: pd.DataFrame) -> None:
    atomic_write(path, frame.to_csv(index=False))


def _print_json(data) -> None:
    print(json.dumps(data, indent=2))


def _parse_query(text: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise CliError(f"Query has to be comma separated numbers, got {text!r}.")


def _gen_kp(args) -> int:
    instance = generate_kp(args.n, args.type, args.index, args.seed, alpha=args.alpha)
    atomic_write(args.out, instance.to_json())
    return EXIT_OK


def _gen_mkp(args) -> int:
    instance = generate_mkp(args.n, args.resources, args.seed, alpha=args.alpha)
    atomic_write(args.out, instance.to_json())
    return EXIT_OK


def _build(args) -> int:
    instance = KnapsackInstance.from_file(args.input)
    model = FORMULATIONS[args.formulation](instance)
    atomic_write(args.out, export_model(model, "json"))
    if args.lp_text:
        atomic_write(args.lp_text, export_model(model, "lp_text"))
    return EXIT_OK


def _solve(args) -> int:
    instance = KnapsackInstance.from_file(args.input)
    model = FORMULATIONS[args.formulation](instance)
    solution = solve_bruteforce(model)
    data = {
        "formulation": args.formulation,
        "method": args.method,
        "status": solution.status.value,
        "value": solution.value,
        "assignment": solution.assignment,
        "explored": solution.explored,
        "pruned": solution.pruned,
        "residuals": solution.result.residuals,
    }
    atomic_write(args.out, json.dumps(data, indent=2))
    if solution.status is SolveStatus.NUMERICAL_LIMIT:
        return EXIT_NUMERICAL_LIMIT
    return EXIT_OK


def _normalize(args) -> int:
    conic_set = ConicSet.from_file(args.set)
    normalized, report = normalize_assumption2(conic_set)
    atomic_write(args.out, normalized.to_json())
    _print_json(report.to_dict())
    return EXIT_OK


def _envelope(args) -> int:
    conic_set = ConicSet.from_file(args.set)
    certificate = concave_envelope(conic_set.domain, conic_set.f_values(), _parse_query(args.query))
    _print_json(
        {
            "value": certificate.value,
            "support": [
                {"index": s.index, "point": list(s.point), "weight": s.weight, "value": s.value}
                for s in certificate.support
            ],
        }
    )
    return EXIT_OK


def _verify_hull(args) -> int:
    suite = run_hull_suite(
        args.sets, args.n, args.m, args.p, NormKind(args.norm), args.trials, args.seed, args.method
    )
    if args.report:
        write_frame(args.report, suite.to_data_frame())
    _print_json([report.summary() for report in suite.reports])
    if suite.disagreements:
        return EXIT_VERIFICATION_FAILED
    if suite.errors:
        return EXIT_NUMERICAL_LIMIT
    return EXIT_OK


def _gap_check(args) -> int:
    conic_set = ConicSet.from_file(args.set)
    grid = default_grid(conic_set.domain, np.random.default_rng(args.seed), args.grid)
    report = verify_prop1(conic_set.domain, conic_set.f_values(), grid)
    if args.report:
        write_frame(args.report, report.frame)
    _print_json(report.summary())
    return EXIT_OK if report.holds else EXIT_VERIFICATION_FAILED


def _verdicts(conic_set: ConicSet, points) -> list[dict]:
    rows = []
    for x, y in points:
        W = membership_W(conic_set, x, y)
        hull = membership_conv_perspective(conic_set, x, y)
        rows.append(
            {
                "x": list(x),
                "y": list(y),
                "W": W.status.value,
                "hull": hull.status.value,
                "W_margin": W.margin,
                "hull_margin": hull.margin,
            }
        )
    return rows


def _example(args) -> int:
    if args.id == 1:
        conic_set = example1_fixture()
        normalized, _ = normalize_assumption2(conic_set)
        f = normalized.f_values()
        intercept = concave_envelope(normalized.domain, f, [0.0]).value
        slope = concave_envelope(normalized.domain, f, [1.0]).value - intercept
        points = [([0.5], [1.0]), ([0.5], [1.2]), ([0.5], [1.3])]
        data = {
            "set": conic_set.to_dict(),
            "normalized_f_hat": {"slope": slope, "intercept": intercept},
            "original": _verdicts(conic_set, points),
            "normalized": _verdicts(normalized, points),
        }
        disagreements = sum(1 for row in data["original"] if row["W"] != row["hull"])
    else:
        conic_set = example2_fixture()
        report = verify_hull_equivalence(conic_set, args.trials, np.random.default_rng(args.seed))
        data = {"set": conic_set.to_dict(), "report": report.summary()}
        disagreements = len(report.disagreements)
    print(json.dumps(data, indent=2, default=float))
    if disagreements:
        logger.info("example %d: %d disagreements between W and conv(Z)", args.id, disagreements)
        return EXIT_VERIFICATION_FAILED
    return EXIT_OK


def parse_args(argv=None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="socvexify",
        description="Convex hulls of mixed-binary conic sets and DRCC knapsack formulations.",
    )
    parser.add_argument("--tol", type=float, default=None, help="base feasibility tolerance")
    parser.add_argument(
        "--log-level",
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="logging level of the messages written to stderr",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    command = commands.add_parser("gen-kp", help="generate a single resource knapsack instance")
    command.add_argument("--type", type=int, required=True, choices=[1, 2, 3, 4])
    command.add_argument("--n", type=int, required=True, help="total number of items")
    command.add_argument("--index", type=int, default=1, choices=range(1, 6))
    command.add_argument("--seed", type=int, default=DEFAULT_SEED)
    command.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    command.add_argument("--out", required=True)
    command.set_defaults(handler=_gen_kp)

    command = commands.add_parser("gen-mkp", help="generate a multi resource knapsack instance")
    command.add_argument("--n", type=int, required=True, help="number of binary items")
    command.add_argument("--resources", type=int, required=True)
    command.add_argument("--seed", type=int, default=DEFAULT_SEED)
    command.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    command.add_argument("--out", required=True)
    command.set_defaults(handler=_gen_mkp)

    command = commands.add_parser("build", help="write the CCP or SOC model of an instance")
    command.add_argument("--formulation", required=True, choices=sorted(FORMULATIONS))
    command.add_argument("--in", dest="input", required=True)
    command.add_argument("--out", required=True)
    command.add_argument("--lp-text", default=None)
    command.set_defaults(handler=_build)

    command = commands.add_parser("solve", help="solve an instance by enumeration")
    command.add_argument("--in", dest="input", required=True)
    command.add_argument("--formulation", required=True, choices=sorted(FORMULATIONS))
    command.add_argument("--method", default="brute", choices=["brute"])
    command.add_argument("--out", required=True)
    command.set_defaults(handler=_solve)

    command = commands.add_parser("normalize", help="enforce col(A), d in col(B)")
    command.add_argument("--set", required=True)
    command.add_argument("--out", required=True)
    command.set_defaults(handler=_normalize)

    command = commands.add_parser("envelope", help="concave envelope of f at a query point")
    command.add_argument("--set", required=True)
    command.add_argument("--query", required=True, help="comma separated coordinates")
    command.set_defaults(handler=_envelope)

    command = commands.add_parser("verify-hull", help="compare the two hull oracles")
    command.add_argument("--trials", type=int, default=200)
    command.add_argument("--n", type=int, default=3)
    command.add_argument("--m", type=int, default=2)
    command.add_argument("--p", type=int, default=3)
    command.add_argument("--norm", default="l2", choices=[k.value for k in NormKind])
    command.add_argument("--sets", type=int, default=1)
    command.add_argument("--method", default="auto", choices=["auto", "lp", "barrier"])
    command.add_argument("--seed", type=int, default=DEFAULT_SEED)
    command.add_argument("--report", default=None)
    command.set_defaults(handler=_verify_hull)

    command = commands.add_parser("gap-check", help="check the sqrt(q_hat) gap bound")
    command.add_argument("--set", required=True)
    command.add_argument("--grid", type=int, default=200)
    command.add_argument("--seed", type=int, default=DEFAULT_SEED)
    command.add_argument("--report", default=None)
    command.set_defaults(handler=_gap_check)

    command = commands.add_parser("example", help="print a fixture and its verdicts")
    command.add_argument("--id", type=int, required=True, choices=[1, 2])
    command.add_argument("--trials", type=int, default=200)
    command.add_argument("--seed", type=int, default=DEFAULT_SEED)
    command.set_defaults(handler=_example)

    return parser.parse_args(argv)


def main(argv=None) -> int:
    args = parse_args(argv)
    logging.basicConfig(
        level=args.log_level,
        stream=sys.stderr,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )
    try:
        set_tolerances(tolerances_from_environment(args.tol))
        logger.debug("running %s with %s", args.command, get_tolerances())
        return args.handler(args)
    except HullNumericalLimit as e:
        print(f"socvexify: {e}", file=sys.stderr)
        return EXIT_NUMERICAL_LIMIT
    except SocvexifyError as e:
        print(f"socvexify: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except OSError as e:
        print(f"socvexify: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR


class CliError(SocvexifyError):
    """Custom error for malformed command line values."""

    pass
