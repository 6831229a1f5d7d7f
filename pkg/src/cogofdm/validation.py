"""Randomized cross-checks of the closed-form solver against the oracle."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .oracle import OracleSettings, feasibility_violation, oracle_solve
from .solver import (
    ProblemInstance,
    SolverError,
    op1_objective,
    op2_objective,
    solve_op1,
    solve_op2,
)

ALPHA_GRID = (0.0, 0.1, 0.5, 0.9)


def random_instance(
    rng: np.random.Generator,
    n: int,
    n_pu: int,
    alpha=None,
    problem: str = "op1",
) -> ProblemInstance:
    """Draw a solvable instance with a mix of active and slack constraints.

    Channel ratios are log-uniform over about [0.3, 10] 1/W and budgets
    log-uniform around the scale where they sometimes bind, so repeated
    draws exercise all four dispatch cases.
    """
    gamma = np.exp(rng.uniform(np.log(0.3), np.log(10.0), size=n))
    leakage = rng.uniform(0.01, 1.0, size=(n, n_pu))
    cci_budget = float(n) * 10.0 ** rng.uniform(-1.5, 0.5)
    aci_budgets = (
        float(leakage.mean()) * cci_budget * 10.0 ** rng.uniform(-1.0, 0.7, size=n_pu)
    )
    if alpha is None:
        alpha = float(rng.choice(ALPHA_GRID))
    if problem == "op2":
        split = rng.dirichlet(np.ones(n_pu))
        alpha = float(alpha) * split
    return ProblemInstance(
        gamma=gamma,
        alpha=alpha,
        cci_budget=cci_budget,
        aci_budgets=aci_budgets,
        leakage=leakage,
    )


@dataclass(eq=False)
class ComparisonRecord:
    problem: str
    n: int
    n_pu: int
    gap: float
    closed_objective: float
    oracle_objective: float
    closed_violation: float
    oracle_converged: bool
    stationarity_residual: float
    compslack_residual: float


@dataclass(eq=False)
class ValidationReport:
    """Aggregate of closed-form versus oracle runs."""

    records: list = field(default_factory=list)
    solver_failures: int = 0

    @property
    def count(self) -> int:
        return len(self.records)

    @property
    def max_gap(self) -> float:
        return max((r.gap for r in self.records), default=0.0)

    @property
    def max_violation(self) -> float:
        return max((r.closed_violation for r in self.records), default=0.0)

    @property
    def nonconverged(self) -> int:
        return sum(1 for r in self.records if not r.oracle_converged)

    def summary(self) -> str:
        lines = [
            f"instances compared: {self.count}",
            f"max relative objective gap: {self.max_gap:.3e}",
            f"max constraint violation: {self.max_violation:.3e}",
            f"oracle non-convergences: {self.nonconverged}",
            f"closed-form solver failures: {self.solver_failures}",
        ]
        return "\n".join(lines)


def relative_gap(closed: float, oracle: float) -> float:
    return abs(closed - oracle) / (1.0 + abs(closed))


def compare_instance(
    instance: ProblemInstance,
    problem: str,
    settings: Optional[OracleSettings] = None,
    tol: float = 1e-8,
) -> ComparisonRecord:
    """Solve one instance both ways and report the objective gap."""
    if problem == "op1":
        outcome = solve_op1(instance, tol=tol)
        closed_obj = op1_objective(instance, outcome.powers)
    else:
        outcome = solve_op2(instance, tol=tol)
        closed_obj = op2_objective(instance, outcome.powers)
    oracle = oracle_solve(instance, objective=problem, settings=settings)
    return ComparisonRecord(
        problem=problem,
        n=instance.n,
        n_pu=instance.n_pu,
        gap=relative_gap(closed_obj, oracle.objective),
        closed_objective=closed_obj,
        oracle_objective=oracle.objective,
        closed_violation=feasibility_violation(instance, outcome.powers),
        oracle_converged=oracle.converged,
        stationarity_residual=outcome.stationarity_residual,
        compslack_residual=outcome.kkt_residual,
    )


def run_validation(
    count: int,
    n: int,
    n_pu: int,
    seed: int,
    problem: str = "both",
    settings: Optional[OracleSettings] = None,
    tol: float = 1e-8,
) -> ValidationReport:
    """Compare ``count`` random instances; deterministic in the seed."""
    if n > 64:
        raise ValueError("validation instances must have N <= 64")
    rng = np.random.default_rng(seed)
    problems = ("op1", "op2") if problem == "both" else (problem,)
    report = ValidationReport()
    for _ in range(count):
        for prob in problems:
            instance = random_instance(rng, n, n_pu, problem=prob)
            try:
                report.records.append(
                    compare_instance(instance, prob, settings=settings, tol=tol)
                )
            except SolverError:
                report.solver_failures += 1
    return report
