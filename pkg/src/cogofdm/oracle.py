"""Independent verification solver: projected gradient descent.

Minimizes the same scalarized objectives as the closed-form solver, but
by first-order iterations with projection onto the feasible polyhedron
{p >= 0, sum p <= cci_budget, leakage' p <= aci_budgets} via Dykstra's
alternating projections.  It deliberately shares no water-filling code
with the closed-form path, so agreement between the two is meaningful
evidence.  Intended for small instances (N <= 64).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .solver import LN2, ProblemInstance

_FEAS_SLACK = 1e-12


@dataclass
class OracleSettings:
    """Iteration controls.

    ``step_size`` of None picks 1/L with L the global Lipschitz bound of
    the rate gradient, (1 - alpha) * max(gamma)^2 / ln2; the step is
    halved whenever a move would increase the objective, and optionally
    regrown by ``step_growth`` (> 1) on accepted moves.  Momentum
    (Nesterov extrapolation with restart on increase) is on by default;
    it only changes how fast the same limit is reached.
    """

    step_size: Optional[float] = None
    max_iters: int = 60000
    feas_tol: float = 1e-9
    obj_tol: float = 1e-11
    use_momentum: bool = True
    step_growth: float = 1.0
    patience: int = 30


@dataclass(eq=False)
class OracleResult:
    powers: np.ndarray
    objective: float
    converged: bool
    iterations: int
    feasibility: float


def _objective_terms(instance: ProblemInstance, objective: str):
    gamma = instance.gamma
    if objective == "op1":
        alpha = float(instance.alpha)
        num = 1.0 - alpha
        linear = np.full(instance.n, alpha)
    elif objective == "op2":
        weights = np.asarray(instance.alpha, dtype=float)
        num = 1.0 - float(weights.sum())
        linear = instance.leakage @ weights
    else:
        raise ValueError(f"objective must be 'op1' or 'op2', got {objective!r}")

    def fun(p: np.ndarray) -> float:
        return float(linear @ p) - num * float(np.sum(np.log2(1.0 + gamma * p)))

    def grad(p: np.ndarray) -> np.ndarray:
        return linear - num * gamma / (LN2 * (1.0 + gamma * p))

    return fun, grad, num


def feasibility_violation(instance: ProblemInstance, p: np.ndarray) -> float:
    """Worst relative constraint violation (0 when feasible)."""
    viol = max(0.0, (float(p.sum()) - instance.cci_budget) / instance.cci_budget)
    leaks = p @ instance.leakage
    rel = (leaks - instance.aci_budgets) / instance.aci_budgets
    viol = max(viol, float(np.max(rel, initial=0.0)))
    viol = max(viol, float(np.max(-p, initial=0.0)) / max(instance.cci_budget, 1.0))
    return viol


class _Projector:
    """Dykstra projection onto the constraint polyhedron of one instance.

    Alternates projections onto each budget halfspace and onto the
    non-negative orthant (last, so the output is exactly non-negative),
    with Dykstra's correction terms so the limit is the true projection
    rather than just some feasible point.  When clipping to the orthant
    already lands inside every halfspace, that clip *is* the projection
    (it minimizes the distance over the orthant, a superset) and the
    alternating loop is skipped.
    """

    def __init__(self, instance: ProblemInstance, tol: float = 1e-13,
                 max_cycles: int = 2000):
        self.tol = tol
        self.max_cycles = max_cycles
        ones = np.ones(instance.n)
        self.halfspaces = [(ones, instance.cci_budget, float(instance.n))]
        for l in range(instance.n_pu):
            col = np.ascontiguousarray(instance.leakage[:, l])
            self.halfspaces.append(
                (col, float(instance.aci_budgets[l]), max(float(col @ col), 1e-300))
            )

    def _feasible(self, x: np.ndarray) -> bool:
        for a, b, _ in self.halfspaces:
            if float(a @ x) > b * (1.0 + _FEAS_SLACK):
                return False
        return True

    def __call__(self, p: np.ndarray) -> np.ndarray:
        clipped = np.maximum(p, 0.0)
        if self._feasible(clipped):
            return clipped

        x = p.copy()
        n = p.size
        increments = [np.zeros(n) for _ in range(len(self.halfspaces) + 1)]
        touched = [False] * (len(self.halfspaces) + 1)
        scale = max(1.0, float(np.max(np.abs(p))))
        for _ in range(self.max_cycles):
            shift = 0.0
            for k, (a, b, aa) in enumerate(self.halfspaces):
                if not touched[k]:
                    # zero increment and satisfied constraint: identity step
                    if float(a @ x) <= b:
                        continue
                    touched[k] = True
                y = x + increments[k]
                excess = float(a @ y) - b
                x_new = y - (excess / aa) * a if excess > 0.0 else y
                increments[k] = y - x_new
                shift = max(shift, float(np.max(np.abs(x_new - x))))
                x = x_new
            if touched[-1] or np.any(x < 0.0):
                touched[-1] = True
                y = x + increments[-1]
                x_new = np.maximum(y, 0.0)
                increments[-1] = y - x_new
                shift = max(shift, float(np.max(np.abs(x_new - x))))
                x = x_new
            # Dykstra approaches the projection from outside the polyhedron,
            # so exit on the displacement alone; the residual infeasibility is
            # of the same order as the displacement.
            if shift <= self.tol * scale:
                break
        return x


def project_feasible(
    p: np.ndarray,
    instance: ProblemInstance,
    tol: float = 1e-13,
    max_cycles: int = 2000,
) -> np.ndarray:
    """Euclidean projection of ``p`` onto the instance's feasible polyhedron."""
    return _Projector(instance, tol=tol, max_cycles=max_cycles)(p)


def oracle_solve(
    instance: ProblemInstance,
    objective: str = "op1",
    settings: Optional[OracleSettings] = None,
) -> OracleResult:
    """Projected gradient descent on the chosen objective.

    Starts from zero (always feasible), takes gradient steps followed by
    Dykstra projection, halves the step whenever the objective would
    increase, and stops once the relative objective improvement has
    stayed below ``obj_tol`` for ``patience`` accepted steps while the
    iterate is feasible within ``feas_tol``.  Hitting ``max_iters``
    returns the best feasible iterate with ``converged=False``.
    """
    if instance.n > 64:
        raise ValueError("oracle is intended for small instances (N <= 64)")
    settings = settings or OracleSettings()
    fun, grad, num = _objective_terms(instance, objective)
    project = _Projector(instance)

    gmax = float(instance.gamma.max(initial=0.0))
    lipschitz = num * gmax * gmax / LN2
    step = settings.step_size
    if step is None:
        step = 1.0 / lipschitz if lipschitz > 0.0 else 1.0
    step0 = step

    x = np.zeros(instance.n)
    f_x = fun(x)
    y = x
    t = 1.0
    stall = 0
    converged = False
    iterations = 0

    for iterations in range(1, settings.max_iters + 1):
        candidate = project(y - step * grad(y))
        f_cand = fun(candidate)
        if f_cand <= f_x + 1e-13 * (1.0 + abs(f_x)):
            improvement = f_x - f_cand
            if settings.use_momentum:
                t_next = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
                y = candidate + ((t - 1.0) / t_next) * (candidate - x)
                t = t_next
            else:
                y = candidate
            x, f_x = candidate, f_cand
            if settings.step_growth > 1.0:
                step = min(step * settings.step_growth, 1e6 * step0)
            if improvement <= settings.obj_tol * (1.0 + abs(f_cand)):
                stall += 1
            else:
                stall = 0
            if stall >= settings.patience:
                if feasibility_violation(instance, x) <= settings.feas_tol:
                    converged = True
                    break
                stall = 0
        else:
            if t > 1.0:
                # momentum overshot: restart the extrapolation
                t = 1.0
                y = x
            else:
                step *= 0.5
                if step < 1e-14 * step0:
                    converged = feasibility_violation(instance, x) <= settings.feas_tol
                    break

    return OracleResult(
        powers=x,
        objective=f_x,
        converged=converged,
        iterations=iterations,
        feasibility=feasibility_violation(instance, x),
    )


def gradient_check(
    instance: ProblemInstance, objective: str, point: np.ndarray
) -> float:
    """Max |analytic - central finite difference| over the gradient entries.

    The finite-difference step for coordinate i is 1e-6 * (1 + |p_i|);
    the point should be strictly feasible with positive powers so the
    perturbed points stay in the objective's smooth region.
    """
    fun, grad, _ = _objective_terms(instance, objective)
    point = np.asarray(point, dtype=float)
    analytic = grad(point)
    worst = 0.0
    for i in range(point.size):
        h = 1e-6 * (1.0 + abs(point[i]))
        plus = point.copy()
        minus = point.copy()
        plus[i] += h
        minus[i] -= h
        numeric = (fun(plus) - fun(minus)) / (2.0 * h)
        worst = max(worst, abs(numeric - analytic[i]))
    return worst
