"""Command-line front end.

Subcommands:
    solve     draw one channel realization for a scenario and solve it
    sweep     Monte Carlo sweep over a threshold or weight axis
    validate  cross-check the closed-form solver against the oracle
    leakage   dump the leakage-factor matrix for a scenario

Exit codes: 0 success, 1 usage or config parse error, 2 solver failure,
3 validation gap exceeded (or too many oracle non-convergences).
"""

from __future__ import annotations

import argparse
import sys
from contextlib import contextmanager

import numpy as np

from .csvio import write_csv
from .leakage import build_leakage_matrix
from .montecarlo import SWEEP_AXES, build_instance, run_sweep
from .channel import draw_realization
from .scenario import load_scenario
from .solver import SolverError, solve_op1, solve_op2
from .validation import run_validation

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_SOLVER = 2
EXIT_VALIDATION = 3


@contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def _parse_values(raw: str) -> list:
    try:
        return [float(part) for part in raw.split(",") if part.strip() != ""]
    except ValueError:
        raise ValueError(f"--values: cannot parse '{raw}' as a comma-separated list")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cogofdm",
        description="OFDM power allocation under co- and adjacent-channel "
        "interference budgets: solvers, sweeps, and validation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve one realization of a scenario")
    solve.add_argument("--config", required=True, help="scenario config file")
    solve.add_argument("--out", default=None, help="output CSV path (default stdout)")
    solve.add_argument("--tol", type=float, default=None, help="solver tolerance")
    solve.add_argument("--seed", type=int, default=None, help="override mc.root_seed")
    solve.add_argument("--problem", choices=("op1", "op2"), default=None)

    sweep = sub.add_parser("sweep", help="Monte Carlo sweep along one axis")
    sweep.add_argument("--config", required=True)
    sweep.add_argument("--axis", choices=("cci", "aci", "alpha"), required=True)
    sweep.add_argument("--values", required=True, help="comma-separated axis values")
    sweep.add_argument("--out", default=None)
    sweep.add_argument("--trials", type=int, default=None, help="override mc.trials")
    sweep.add_argument("--seed", type=int, default=None, help="override mc.root_seed")
    sweep.add_argument("--problem", choices=("op1", "op2"), default=None)
    sweep.add_argument("--tol", type=float, default=None)
    sweep.add_argument(
        "--trial-out", default=None, help="also write a per-trial long-format CSV"
    )

    validate = sub.add_parser("validate", help="compare solver against the oracle")
    validate.add_argument("--count", type=int, default=100)
    validate.add_argument("--n", type=int, default=8, help="subcarriers (<= 64)")
    validate.add_argument("--l", type=int, default=2, help="adjacent PUs")
    validate.add_argument("--seed", type=int, default=0)
    validate.add_argument("--problem", choices=("op1", "op2", "both"), default="both")
    validate.add_argument(
        "--tol", type=float, default=1e-5, help="max admissible relative gap"
    )
    validate.add_argument("--out", default=None, help="write the report to a file")

    leakage = sub.add_parser("leakage", help="dump the leakage-factor matrix")
    leakage.add_argument("--config", required=True)
    leakage.add_argument("--out", default=None)
    leakage.add_argument("--tol", type=float, default=None, help="quadrature tolerance")
    return parser


_AXIS_NAMES = {"cci": "cci_threshold", "aci": "aci_threshold", "alpha": "alpha"}


def _cmd_solve(args) -> int:
    config = load_scenario(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["root_seed"] = args.seed
    if args.problem is not None:
        overrides["problem"] = args.problem
    if args.tol is not None:
        overrides["solver_tol"] = args.tol
    if overrides:
        import dataclasses

        config = dataclasses.replace(config, **overrides)
    leakage_matrix = build_leakage_matrix(config)
    realization = draw_realization(config.root_seed, config)
    instance = build_instance(config, realization, leakage_matrix)
    solver = solve_op1 if config.problem == "op1" else solve_op2
    outcome = solver(instance, tol=config.solver_tol)
    record = outcome.to_record()
    with _output(args.out) as fh:
        write_csv(fh, list(record), [list(record.values())])
    return EXIT_OK


def _cmd_sweep(args) -> int:
    config = load_scenario(args.config)
    overrides = {}
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.seed is not None:
        overrides["root_seed"] = args.seed
    if args.problem is not None:
        overrides["problem"] = args.problem
    if args.tol is not None:
        overrides["solver_tol"] = args.tol
    if overrides:
        import dataclasses

        config = dataclasses.replace(config, **overrides)
    values = _parse_values(args.values)
    result = run_sweep(
        config,
        _AXIS_NAMES[args.axis],
        values,
        collect_trials=args.trial_out is not None,
    )
    with _output(args.out) as fh:
        result.to_csv(fh)
    if args.trial_out is not None:
        with open(args.trial_out, "w", encoding="utf-8", newline="\n") as fh:
            result.trials_to_csv(fh)
    if np.any(result.failed > 0):
        print(f"warning: {int(result.failed.sum())} failed trials", file=sys.stderr)
    return EXIT_OK


def _cmd_validate(args) -> int:
    report = run_validation(
        count=args.count, n=args.n, n_pu=args.l, seed=args.seed, problem=args.problem
    )
    text = report.summary()
    if args.out is not None:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if report.solver_failures > 0:
        return EXIT_SOLVER
    if report.count > 0 and report.max_gap > args.tol:
        print(
            f"validation failed: gap {report.max_gap:.3e} > {args.tol:.1e}",
            file=sys.stderr,
        )
        return EXIT_VALIDATION
    if report.count > 0 and report.nonconverged > 0.01 * report.count:
        print(
            f"validation failed: {report.nonconverged} oracle non-convergences",
            file=sys.stderr,
        )
        return EXIT_VALIDATION
    return EXIT_OK


def _cmd_leakage(args) -> int:
    config = load_scenario(args.config)
    if args.tol is not None:
        matrix = build_leakage_matrix(config, tol=args.tol)
    else:
        matrix = build_leakage_matrix(config)
    with _output(args.out) as fh:
        matrix.to_csv(fh)
    return EXIT_OK


_COMMANDS = {
    "solve": _cmd_solve,
    "sweep": _cmd_sweep,
    "validate": _cmd_validate,
    "leakage": _cmd_leakage,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; fold into the documented code 1
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        if exc.residuals:
            print(f"residuals: {exc.residuals}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
