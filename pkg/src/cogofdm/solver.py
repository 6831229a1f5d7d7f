"""Closed-form water-filling solvers for the two scalarized allocation problems.

Both problems allocate per-subcarrier powers p_i >= 0 subject to a total
co-channel interference (CCI) power budget and per-PU adjacent-channel
interference (ACI) budgets:

    C1:  sum_i p_i              <= cci_budget
    C2:  sum_i p_i * w_i[l]     <= aci_budgets[l]   for every PU l
    C3:  p_i >= 0

where w_i[l] are the spectral leakage factors.  The objectives are

    OP1:  minimize  alpha * sum_i p_i - (1 - alpha) * sum_i log2(1 + gamma_i p_i)
    OP2:  minimize  sum_l alpha_l * (sum_i p_i w_i[l])
                    - (1 - sum_l alpha_l) * sum_i log2(1 + gamma_i p_i)

Both are convex with water-filling optima: p_i = [num / (ln2 * D_i) - 1/gamma_i]^+
where num is the rate weight (1 - alpha resp. 1 - sum alpha_l) and D_i
collects the power weight plus the Lagrange multipliers of whichever
budget constraints are active.  Multipliers are found by bisection on
each active constraint, cyclically when several constraints couple.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

LN2 = math.log(2.0)

DEFAULT_TOL = 1e-8

# Complementary-slackness quality enforced on every returned outcome:
# lambda * |constraint - budget| <= _COMP_TOL * budget for each multiplier.
_COMP_TOL = 1e-8

_MAX_SWEEPS = 200


class CaseLabel(enum.Enum):
    """Which budget constraints the returned solution saturates."""

    UNCONSTRAINED = "unconstrained"
    CCI_ACTIVE = "cci_active"
    ACI_ACTIVE = "aci_active"
    BOTH_ACTIVE = "both_active"


class SolverError(RuntimeError):
    """Multiplier search failed; carries the residuals seen at the last sweep."""

    def __init__(self, message: str, residuals: Optional[dict] = None):
        super().__init__(message)
        self.residuals = residuals or {}


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """One allocation problem: channel quality, weights, budgets, leakage.

    Attributes:
        gamma: per-subcarrier gain to noise-plus-interference ratio, 1/W,
            shape (N,), entries >= 0.
        alpha: scalar weight in [0, 1] for OP1, or per-PU weights (shape
            (L,), non-negative, summing to at most 1) for OP2.
        cci_budget: admissible total power, W (> 0).
        aci_budgets: admissible leaked power per PU, W, shape (L,), > 0.
        leakage: leakage factors, shape (N, L), entries in [0, 1].
    """

    gamma: np.ndarray
    alpha: object
    cci_budget: float
    aci_budgets: np.ndarray
    leakage: np.ndarray

    def __post_init__(self):
        gamma = np.asarray(self.gamma, dtype=float)
        aci = np.atleast_1d(np.asarray(self.aci_budgets, dtype=float))
        leak = np.asarray(self.leakage, dtype=float)
        if leak.ndim == 1:
            leak = leak[:, None]
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "aci_budgets", aci)
        object.__setattr__(self, "leakage", leak)
        alpha = self.alpha
        if np.ndim(alpha) == 0:
            alpha = float(alpha)
            if not 0.0 <= alpha <= 1.0:
                raise ValueError("alpha must lie in [0, 1]")
        else:
            alpha = np.asarray(alpha, dtype=float)
            if alpha.shape != (leak.shape[1],):
                raise ValueError("per-PU weights need one entry per PU")
            if np.any(alpha < 0):
                raise ValueError("per-PU weights must be non-negative")
            if alpha.sum() > 1.0 + 1e-12:
                raise ValueError("per-PU weights must sum to at most 1")
        object.__setattr__(self, "alpha", alpha)
        if gamma.ndim != 1 or gamma.size == 0:
            raise ValueError("gamma must be a non-empty vector")
        if np.any(gamma < 0) or not np.all(np.isfinite(gamma)):
            raise ValueError("gamma entries must be finite and non-negative")
        if leak.shape[0] != gamma.size:
            raise ValueError("leakage must have one row per subcarrier")
        if np.any(leak < -1e-12) or np.any(leak > 1.0 + 1e-12):
            raise ValueError("leakage factors must lie in [0, 1]")
        if not self.cci_budget > 0:
            raise ValueError("cci budget must be positive")
        if aci.shape != (leak.shape[1],) or np.any(aci <= 0):
            raise ValueError("aci budgets must be positive, one per PU")

    @property
    def n(self) -> int:
        return self.gamma.size

    @property
    def n_pu(self) -> int:
        return self.leakage.shape[1]


@dataclass(frozen=True, eq=False)
class SolverOutcome:
    """Optimal powers with the multipliers and KKT quality measures.

    ``kkt_residual`` is the worst relative complementary-slackness product,
    max over budget constraints of lambda * |value - budget| / budget.
    ``stationarity_residual`` is the worst violation of the first-order
    condition: |D_i - num * gamma_i / (ln2 (1 + gamma_i p_i))| over active
    subcarriers, and the negative part of the same expression (the implied
    multiplier of p_i >= 0) over inactive ones.
    """

    powers: np.ndarray
    case: CaseLabel
    lambda_cci: float
    lambda_aci: np.ndarray
    kkt_residual: float
    stationarity_residual: float
    objective: float

    def to_record(self) -> dict:
        """Flat record for CSV export; key order is the export column order."""
        record = {
            "case": self.case.value,
            "objective": self.objective,
            "total_power_w": float(self.powers.sum()),
            "lambda_cci": self.lambda_cci,
        }
        for l, lam in enumerate(self.lambda_aci):
            record[f"lambda_aci_{l + 1}"] = float(lam)
        record["stationarity_residual"] = self.stationarity_residual
        record["compslack_residual"] = self.kkt_residual
        for i, p in enumerate(self.powers):
            record[f"p{i + 1}_w"] = float(p)
        return record


def op1_objective(instance: ProblemInstance, powers: np.ndarray) -> float:
    """alpha * total power minus (1 - alpha) * rate in bits/symbol."""
    alpha = float(instance.alpha)
    rate = float(np.sum(np.log2(1.0 + instance.gamma * powers)))
    return alpha * float(np.sum(powers)) - (1.0 - alpha) * rate


def op2_objective(instance: ProblemInstance, powers: np.ndarray) -> float:
    """Weighted leaked interference minus weighted rate."""
    weights = np.asarray(instance.alpha, dtype=float)
    leaked = powers @ instance.leakage
    rate = float(np.sum(np.log2(1.0 + instance.gamma * powers)))
    return float(leaked @ weights) - (1.0 - weights.sum()) * rate


# -- water-filling machinery ----------------------------------------------------


def _inv_gamma(gamma: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.where(gamma > 0.0, 1.0 / np.maximum(gamma, 1e-300), np.inf)


def _clipped_powers(num: float, denom: np.ndarray, inv_gamma: np.ndarray,
                    gamma_pos: np.ndarray) -> np.ndarray:
    """p_i = [num / (ln2 * denom_i) - 1/gamma_i]^+ with zero-gamma handling.

    A non-positive denominator means an unbounded water level on that
    subcarrier; the power is reported as +inf so that constraint sums
    compare correctly during multiplier bracketing.
    """
    if num == 0.0:
        return np.zeros_like(denom)
    level = num / (LN2 * np.maximum(denom, 1e-300))
    level = np.where(denom > 0.0, level, np.inf)
    p = np.maximum(level - inv_gamma, 0.0)
    return np.where(gamma_pos, p, 0.0)


def _bisect_multiplier(value_at, budget: float, hi_start: float) -> float:
    """Smallest lambda >= 0 with value_at(lambda) <= budget, by bisection.

    ``value_at`` must be non-increasing and continuous with limit 0; the
    caller guarantees value_at(0) > budget.  Returns the feasible end of
    the final bracket, so the constraint holds within float resolution.
    """
    lo = 0.0
    hi = max(hi_start, 1e-12)
    while value_at(hi) > budget:
        lo = hi
        hi *= 2.0
        if hi > 1e200:
            raise SolverError("multiplier bracketing diverged; budget unreachable")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        value = value_at(mid)
        if value > budget:
            lo = mid
        else:
            hi = mid
            if budget - value <= 1e-15 * budget:
                break
    return hi


def _solve_active_set(
    num: float,
    d0: np.ndarray,
    gamma: np.ndarray,
    leakage: np.ndarray,
    cci_budget: float,
    aci_budgets: np.ndarray,
    with_cci: bool,
    with_aci: bool,
    tol: float,
):
    """Cyclic per-constraint bisection for the requested constraint families.

    Repeatedly rebisects each included multiplier so its own constraint is
    met with equality (or clamps it to zero when already slack), until all
    included constraints satisfy feasibility within ``tol`` relative and
    the complementarity products are below _COMP_TOL.  Raises SolverError
    with the residuals if the sweep limit is hit.
    """
    n_pu = leakage.shape[1]
    inv_gamma = _inv_gamma(gamma)
    gamma_pos = gamma > 0.0
    lam_cci = 0.0
    lam_aci = np.zeros(n_pu)
    gmax = float(gamma.max(initial=0.0))
    hi_guess = max(num * gmax / LN2 + 1.0, 1.0)

    def powers_at(lc: float, la: np.ndarray) -> np.ndarray:
        denom = d0 + lc + leakage @ la
        return _clipped_powers(num, denom, inv_gamma, gamma_pos)

    for _ in range(_MAX_SWEEPS):
        if with_cci:
            rest = d0 + leakage @ lam_aci

            def total(lam: float) -> float:
                p = _clipped_powers(num, rest + lam, inv_gamma, gamma_pos)
                return float(p.sum())

            if total(0.0) <= cci_budget:
                lam_cci = 0.0
            else:
                lam_cci = _bisect_multiplier(
                    total, cci_budget, max(hi_guess, 2.0 * lam_cci)
                )
        if with_aci:
            for l in range(n_pu):
                others = lam_aci.copy()
                others[l] = 0.0
                rest = d0 + lam_cci + leakage @ others
                col = leakage[:, l]

                def leaked(lam: float, rest=rest, col=col) -> float:
                    p = _clipped_powers(num, rest + lam * col, inv_gamma, gamma_pos)
                    return float(p @ col)

                if leaked(0.0) <= aci_budgets[l]:
                    lam_aci[l] = 0.0
                else:
                    lam_aci[l] = _bisect_multiplier(
                        leaked, aci_budgets[l], max(hi_guess, 2.0 * lam_aci[l])
                    )

        p = powers_at(lam_cci, lam_aci)
        total_power = float(p.sum())
        leaks = p @ leakage
        feasible = total_power <= cci_budget * (1.0 + tol) and np.all(
            leaks <= aci_budgets * (1.0 + tol)
        )
        slack_cci = abs(total_power - cci_budget)
        slack_aci = np.abs(leaks - aci_budgets)
        active_ok = (lam_cci == 0.0 or slack_cci <= tol * cci_budget) and np.all(
            (lam_aci == 0.0) | (slack_aci <= tol * aci_budgets)
        )
        products_ok = lam_cci * slack_cci <= _COMP_TOL * cci_budget and np.all(
            lam_aci * slack_aci <= _COMP_TOL * aci_budgets
        )
        if feasible and active_ok and products_ok:
            return p, lam_cci, lam_aci

    residuals = {
        "total_power": total_power,
        "cci_budget": cci_budget,
        "leaked": leaks,
        "aci_budgets": aci_budgets,
        "lambda_cci": lam_cci,
        "lambda_aci": lam_aci,
    }
    raise SolverError(
        "multiplier search did not converge within "
        f"{_MAX_SWEEPS} sweeps (max relative violation "
        f"{max(slack_cci / cci_budget, float(np.max(slack_aci / aci_budgets))):.3e})",
        residuals,
    )


# -- OP1 closed forms ------------------------------------------------------------


def _op1_base(instance: ProblemInstance):
    alpha = instance.alpha
    if np.ndim(alpha) != 0:
        raise ValueError("OP1 needs a scalar weight alpha")
    alpha = float(alpha)
    return 1.0 - alpha, np.full(instance.n, alpha)


def unconstrained_op1(instance: ProblemInstance) -> np.ndarray:
    """Water-filling optimum ignoring both budget constraints.

    p_i = [(1 - alpha) / (ln2 * alpha) - 1/gamma_i]^+, for 0 < alpha < 1.

    Raises:
        ValueError: for alpha = 0 (infinite water level; the dispatcher
            routes that case to the budget-limited solutions) and
            alpha = 1 (handled by the dispatcher as the all-zero solution).
    """
    num, d0 = _op1_base(instance)
    alpha = float(instance.alpha)
    if alpha == 0.0:
        raise ValueError("alpha = 0 has an unbounded unconstrained solution")
    if alpha == 1.0:
        raise ValueError("alpha = 1 is handled by the dispatcher (zero powers)")
    return _clipped_powers(num, d0, _inv_gamma(instance.gamma), instance.gamma > 0)


def cci_active_op1(instance: ProblemInstance, tol: float = DEFAULT_TOL):
    """Powers and multiplier when only the total-power budget binds.

    Returns (powers, lambda_cci) with sum(powers) equal to the budget
    within tol relative, or lambda_cci = 0 if the budget is already slack.
    """
    num, d0 = _op1_base(instance)
    p, lam_cci, _ = _solve_active_set(
        num, d0, instance.gamma, instance.leakage, instance.cci_budget,
        instance.aci_budgets, with_cci=True, with_aci=False, tol=tol,
    )
    return p, lam_cci


def aci_active_op1(instance: ProblemInstance, tol: float = DEFAULT_TOL):
    """Powers and per-PU multipliers when only leakage budgets bind.

    Every PU ends with either a zero multiplier and slack constraint, or a
    positive multiplier and a constraint met within tol relative.
    """
    num, d0 = _op1_base(instance)
    if float(instance.alpha) == 0.0:
        raise ValueError("alpha = 0 must route through the jointly-active case")
    p, _, lam_aci = _solve_active_set(
        num, d0, instance.gamma, instance.leakage, instance.cci_budget,
        instance.aci_budgets, with_cci=False, with_aci=True, tol=tol,
    )
    return p, lam_aci


def both_active_op1(instance: ProblemInstance, tol: float = DEFAULT_TOL):
    """Powers and all multipliers when both constraint families may bind."""
    num, d0 = _op1_base(instance)
    p, lam_cci, lam_aci = _solve_active_set(
        num, d0, instance.gamma, instance.leakage, instance.cci_budget,
        instance.aci_budgets, with_cci=True, with_aci=True, tol=tol,
    )
    return p, lam_cci, lam_aci


# -- OP2 closed forms ------------------------------------------------------------


def _op2_base(instance: ProblemInstance):
    weights = np.asarray(instance.alpha, dtype=float)
    if weights.ndim != 1:
        raise ValueError("OP2 needs per-PU weights")
    num = 1.0 - float(weights.sum())
    d0 = instance.leakage @ weights
    return num, d0, weights


def unconstrained_op2(instance: ProblemInstance) -> np.ndarray:
    """Water-filling optimum of OP2 ignoring both budget constraints.

    p_i = [(1 - sum alpha_l) / (ln2 * sum_l alpha_l w_i[l]) - 1/gamma_i]^+.

    Raises:
        ValueError: when some subcarrier with usable gamma has zero
            weighted leakage (its water level would be unbounded; the
            dispatcher routes such instances to the budget-limited cases).
    """
    num, d0, _ = _op2_base(instance)
    if num <= 0.0:
        raise ValueError("weights summing to 1 give the all-zero solution")
    unbounded = (d0 <= 0.0) & (instance.gamma > 0.0)
    if np.any(unbounded):
        idx = int(np.argmax(unbounded))
        raise ValueError(
            f"subcarrier {idx} has zero weighted leakage; "
            "unconstrained water level is unbounded"
        )
    return _clipped_powers(num, d0, _inv_gamma(instance.gamma), instance.gamma > 0)


# -- dispatch --------------------------------------------------------------------


def _residuals(num, d0, instance, p, lam_cci, lam_aci):
    gamma = instance.gamma
    denom = d0 + lam_cci + instance.leakage @ lam_aci
    grad_rate = np.where(
        gamma > 0.0, num * gamma / (LN2 * (1.0 + gamma * p)), 0.0
    )
    res = denom - grad_rate
    active = p > 0.0
    stationarity = 0.0
    if np.any(active):
        stationarity = float(np.max(np.abs(res[active])))
    if np.any(~active):
        stationarity = max(stationarity, float(np.max(-np.minimum(res[~active], 0.0))))

    total_power = float(p.sum())
    leaks = p @ instance.leakage
    prod_cci = lam_cci * abs(total_power - instance.cci_budget) / instance.cci_budget
    prod_aci = lam_aci * np.abs(leaks - instance.aci_budgets) / instance.aci_budgets
    kkt = max(prod_cci, float(prod_aci.max(initial=0.0)))
    return stationarity, kkt


def _label(lam_cci: float, lam_aci: np.ndarray) -> CaseLabel:
    cci = lam_cci > 0.0
    aci = bool(np.any(lam_aci > 0.0))
    if cci and aci:
        return CaseLabel.BOTH_ACTIVE
    if cci:
        return CaseLabel.CCI_ACTIVE
    if aci:
        return CaseLabel.ACI_ACTIVE
    return CaseLabel.UNCONSTRAINED


def _constraints_ok(instance: ProblemInstance, p: np.ndarray, tol: float) -> bool:
    if float(p.sum()) > instance.cci_budget * (1.0 + tol):
        return False
    return bool(np.all(p @ instance.leakage <= instance.aci_budgets * (1.0 + tol)))


def _dispatch(instance: ProblemInstance, num, d0, objective_fn, tol: float) -> SolverOutcome:
    """Shared four-case dispatch: test the unconstrained solution against the
    budgets, route to the matching active-set solve, then re-verify every
    constraint on the returned powers (re-dispatching once to the jointly
    active case if a family the branch ignored turns out violated)."""
    gamma = instance.gamma
    lam_cci = 0.0
    lam_aci = np.zeros(instance.n_pu)

    unbounded = num > 0.0 and bool(np.any((d0 <= 0.0) & (gamma > 0.0)))
    if num == 0.0:
        p = np.zeros(instance.n)
        dispatched_both = False
    elif unbounded:
        # Infinite unconstrained water level somewhere: budget-limited for sure.
        p, lam_cci, lam_aci = _solve_active_set(
            num, d0, gamma, instance.leakage, instance.cci_budget,
            instance.aci_budgets, with_cci=True, with_aci=True, tol=tol,
        )
        dispatched_both = True
    else:
        p = _clipped_powers(num, d0, _inv_gamma(gamma), gamma > 0)
        total = float(p.sum())
        leaks = p @ instance.leakage
        cci_hit = total >= instance.cci_budget
        aci_hit = bool(np.any(leaks >= instance.aci_budgets))
        dispatched_both = False
        if cci_hit and not aci_hit:
            p, lam_cci, lam_aci = _solve_active_set(
                num, d0, gamma, instance.leakage, instance.cci_budget,
                instance.aci_budgets, with_cci=True, with_aci=False, tol=tol,
            )
        elif aci_hit and not cci_hit:
            p, lam_cci, lam_aci = _solve_active_set(
                num, d0, gamma, instance.leakage, instance.cci_budget,
                instance.aci_budgets, with_cci=False, with_aci=True, tol=tol,
            )
        elif cci_hit and aci_hit:
            p, lam_cci, lam_aci = _solve_active_set(
                num, d0, gamma, instance.leakage, instance.cci_budget,
                instance.aci_budgets, with_cci=True, with_aci=True, tol=tol,
            )
            dispatched_both = True

    if not _constraints_ok(instance, p, tol):
        # Activating one family cannot raise the other family's left-hand side
        # (multipliers only shrink powers), so this is defensive: fall through
        # to the jointly active case once, then fail loudly.
        if dispatched_both:
            raise SolverError("returned powers violate a budget constraint")
        p, lam_cci, lam_aci = _solve_active_set(
            num, d0, gamma, instance.leakage, instance.cci_budget,
            instance.aci_budgets, with_cci=True, with_aci=True, tol=tol,
        )
        if not _constraints_ok(instance, p, tol):
            raise SolverError("returned powers violate a budget constraint")

    stationarity, kkt = _residuals(num, d0, instance, p, lam_cci, lam_aci)
    return SolverOutcome(
        powers=p,
        case=_label(lam_cci, lam_aci),
        lambda_cci=lam_cci,
        lambda_aci=lam_aci,
        kkt_residual=kkt,
        stationarity_residual=stationarity,
        objective=objective_fn(instance, p),
    )


def solve_op1(instance: ProblemInstance, tol: float = DEFAULT_TOL) -> SolverOutcome:
    """Solve OP1: rate-versus-transmit-power tradeoff under C1-C3.

    alpha = 1 returns zero powers (the objective only penalizes power);
    alpha = 0 is pure rate maximization and goes straight to the
    budget-limited cases.  Every returned outcome satisfies all budget
    constraints within ``tol`` relative and carries its KKT residuals.
    """
    num, d0 = _op1_base(instance)
    return _dispatch(instance, num, d0, op1_objective, tol)


def solve_op2(instance: ProblemInstance, tol: float = DEFAULT_TOL) -> SolverOutcome:
    """Solve OP2: rate-versus-leaked-interference tradeoff under C1-C3.

    Weights summing to 1 return zero powers.  Subcarriers with zero
    weighted leakage make the unconstrained solution unbounded, in which
    case the dispatch goes straight to the budget-limited cases.
    """
    num, d0, _ = _op2_base(instance)
    return _dispatch(instance, num, d0, op2_objective, tol)
