"""Monte Carlo trials and parameter sweeps over random channel draws.

A trial draws one channel realization, converts the scenario's thresholds
into solver budgets through the configured CSI regime, solves the chosen
problem, and evaluates the outcome with the *true* drawn gains: the
interference a PU actually receives uses the realized fading gain, not
the knowledge coefficient the solver budgeted with.  Sweeps repeat the
trials across axis values with common random numbers (the same per-trial
seeds at every axis point) for variance reduction.

Seeding rule: trial ``i`` of a sweep point uses
``numpy.random.SeedSequence([root_seed, i])``, so trials are independent,
reproducible, and indexable in any execution order.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import IO, Optional

import numpy as np

from .channel import (
    ChannelRealization,
    CsiMode,
    draw_realization,
    knowledge_coefficient,
    path_loss_db,
)
from .csvio import write_csv
from .leakage import LeakageMatrix, build_leakage_matrix
from .scenario import ScenarioConfig
from .solver import ProblemInstance, SolverError, SolverOutcome, solve_op1, solve_op2

SWEEP_AXES = ("cci_threshold", "aci_threshold", "alpha")

_METRIC_BASE = ("rate_bits_per_symbol", "rate_bps", "power_w", "leaked_cci_w")


@dataclass(eq=False)
class TrialMetrics:
    """Evaluated outcome of one channel trial."""

    rate_bits_per_symbol: float
    rate_bps: float
    power_w: float
    leaked_cci_w: float
    leaked_aci_w: np.ndarray
    energy_efficiency_bpj: float  # nan when no power is transmitted
    case: str
    stationarity_residual: float
    compslack_residual: float
    failed: bool = False


def trial_seed(root_seed: int, trial_index: int) -> np.random.SeedSequence:
    """Per-trial seed: SeedSequence([root_seed, trial_index])."""
    return np.random.SeedSequence([root_seed, trial_index])


def build_instance(
    config: ScenarioConfig,
    realization: ChannelRealization,
    leakage_matrix: LeakageMatrix,
) -> ProblemInstance:
    """Convert thresholds into budgets via the CSI regime and assemble the problem.

    The co-channel budget is additionally capped by the regulatory total
    power limit when one is configured.
    """
    pl_m = path_loss_db(config.path_loss, config.cochannel_distance_m)
    gain_sq_m = None
    if config.csi.mode is CsiMode.FULL_CSI:
        gain_sq_m = abs(realization.pu_cochannel_gain) ** 2
    x_m = knowledge_coefficient(config.csi, pl_m, gain_sq_m)
    cci_budget = min(config.regulatory_power_cap_w, config.cci_threshold_w * x_m)

    aci_budgets = np.empty(config.n_pu)
    for l, band in enumerate(config.adjacent_pus):
        pl_l = path_loss_db(config.path_loss, band.distance_m)
        gain_sq_l = None
        if config.csi.mode is CsiMode.FULL_CSI:
            gain_sq_l = abs(realization.pu_adjacent_gains[l]) ** 2
        aci_budgets[l] = band.threshold_w * knowledge_coefficient(
            config.csi, pl_l, gain_sq_l
        )

    alpha = config.alpha if config.problem == "op1" else np.asarray(config.alpha_per_pu)
    return ProblemInstance(
        gamma=realization.gamma,
        alpha=alpha,
        cci_budget=cci_budget,
        aci_budgets=aci_budgets,
        leakage=leakage_matrix.values,
    )


def _evaluate(
    config: ScenarioConfig,
    realization: ChannelRealization,
    leakage_matrix: LeakageMatrix,
    outcome: SolverOutcome,
) -> TrialMetrics:
    p = outcome.powers
    rate_symbol = float(np.sum(np.log2(1.0 + realization.gamma * p)))
    rate_bps = rate_symbol * config.subcarrier_spacing_hz
    power = float(p.sum())

    gain_m = abs(realization.pu_cochannel_gain) ** 2 * 10.0 ** (
        -0.1 * path_loss_db(config.path_loss, config.cochannel_distance_m)
    )
    leaked_cci = gain_m * power
    leaked_aci = np.empty(config.n_pu)
    weighted = p @ leakage_matrix.values
    for l, band in enumerate(config.adjacent_pus):
        gain_l = abs(realization.pu_adjacent_gains[l]) ** 2 * 10.0 ** (
            -0.1 * path_loss_db(config.path_loss, band.distance_m)
        )
        leaked_aci[l] = gain_l * weighted[l]

    efficiency = rate_bps / power if power > 0.0 else math.nan
    return TrialMetrics(
        rate_bits_per_symbol=rate_symbol,
        rate_bps=rate_bps,
        power_w=power,
        leaked_cci_w=leaked_cci,
        leaked_aci_w=leaked_aci,
        energy_efficiency_bpj=efficiency,
        case=outcome.case.value,
        stationarity_residual=outcome.stationarity_residual,
        compslack_residual=outcome.kkt_residual,
    )


def _failed_metrics(n_pu: int) -> TrialMetrics:
    return TrialMetrics(
        rate_bits_per_symbol=math.nan,
        rate_bps=math.nan,
        power_w=math.nan,
        leaked_cci_w=math.nan,
        leaked_aci_w=np.full(n_pu, math.nan),
        energy_efficiency_bpj=math.nan,
        case="failed",
        stationarity_residual=math.nan,
        compslack_residual=math.nan,
        failed=True,
    )


def run_trial(
    config: ScenarioConfig,
    seed,
    leakage_matrix: Optional[LeakageMatrix] = None,
) -> TrialMetrics:
    """One draw-build-solve-evaluate cycle; failures are recorded, not raised."""
    if leakage_matrix is None:
        leakage_matrix = build_leakage_matrix(config)
    realization = draw_realization(seed, config)
    instance = build_instance(config, realization, leakage_matrix)
    try:
        if config.problem == "op1":
            outcome = solve_op1(instance, tol=config.solver_tol)
        else:
            outcome = solve_op2(instance, tol=config.solver_tol)
    except SolverError:
        return _failed_metrics(config.n_pu)
    return _evaluate(config, realization, leakage_matrix, outcome)


def _metric_names(n_pu: int) -> list:
    names = list(_METRIC_BASE)
    names += [f"leaked_aci_{l + 1}_w" for l in range(n_pu)]
    names.append("energy_efficiency_bpj")
    return names


def _metric_values(metrics: TrialMetrics) -> list:
    values = [
        metrics.rate_bits_per_symbol,
        metrics.rate_bps,
        metrics.power_w,
        metrics.leaked_cci_w,
    ]
    values += [float(v) for v in metrics.leaked_aci_w]
    values.append(metrics.energy_efficiency_bpj)
    return values


@dataclass(eq=False)
class SweepResult:
    """Per-axis-point means and standard errors of every trial metric.

    ``means[name]`` and ``sems[name]`` are arrays aligned with ``values``.
    Failed trials are excluded from the statistics and counted in
    ``failed``; undefined energy efficiencies (zero power) are likewise
    excluded from that metric only.
    """

    axis: str
    values: np.ndarray
    trials: int
    means: dict = field(default_factory=dict)
    sems: dict = field(default_factory=dict)
    failed: np.ndarray = None
    per_trial: Optional[list] = None  # (axis_value, trial_index, TrialMetrics)

    def metric_names(self) -> list:
        return list(self.means)

    def to_csv(self, stream: IO[str]) -> None:
        header = ["axis", "value", "trials", "failed"]
        for name in self.metric_names():
            header += [f"{name}_mean", f"{name}_sem"]
        rows = []
        for j, value in enumerate(self.values):
            row = [self.axis, float(value), self.trials, int(self.failed[j])]
            for name in self.metric_names():
                row += [self.means[name][j], self.sems[name][j]]
            rows.append(row)
        write_csv(stream, header, rows)

    def trials_to_csv(self, stream: IO[str]) -> None:
        """Long-format per-trial dump (only when collected)."""
        if self.per_trial is None:
            raise ValueError("sweep was run without collect_trials=True")
        n_pu = len(self.per_trial[0][2].leaked_aci_w) if self.per_trial else 0
        header = ["axis", "value", "trial", "case", "failed"] + _metric_names(n_pu)
        rows = []
        for value, index, metrics in self.per_trial:
            rows.append(
                [self.axis, float(value), index, metrics.case, metrics.failed]
                + _metric_values(metrics)
            )
        write_csv(stream, header, rows)


def _apply_axis(config: ScenarioConfig, axis: str, value: float) -> ScenarioConfig:
    if axis == "cci_threshold":
        return dataclasses.replace(config, cci_threshold_w=float(value))
    if axis == "aci_threshold":
        bands = tuple(
            dataclasses.replace(band, threshold_w=float(value))
            for band in config.adjacent_pus
        )
        return dataclasses.replace(config, adjacent_pus=bands)
    if axis == "alpha":
        return dataclasses.replace(config, alpha=float(value))
    raise ValueError(f"unknown sweep axis '{axis}' (expected one of {SWEEP_AXES})")


def run_sweep(
    config: ScenarioConfig,
    axis: str,
    values,
    collect_trials: bool = False,
) -> SweepResult:
    """Run ``config.trials`` trials at each axis value with common random numbers.

    Results are aggregated per metric into means and standard errors of
    the mean.  Identical config and root seed give bit-identical results.
    """
    values = np.asarray(list(values), dtype=float)
    if values.size == 0:
        raise ValueError("sweep needs at least one axis value")
    if np.any(np.diff(values) < 0):
        raise ValueError("sweep values must be sorted ascending")

    # The axes never change the band geometry, so one matrix serves all points.
    leakage_matrix = build_leakage_matrix(config)
    names = _metric_names(config.n_pu)
    means = {name: np.empty(values.size) for name in names}
    sems = {name: np.empty(values.size) for name in names}
    failed = np.zeros(values.size, dtype=int)
    per_trial = [] if collect_trials else None

    seeds = [trial_seed(config.root_seed, i) for i in range(config.trials)]
    for j, value in enumerate(values):
        point_config = _apply_axis(config, axis, value)
        samples = {name: [] for name in names}
        for i, seed in enumerate(seeds):
            metrics = run_trial(point_config, seed, leakage_matrix)
            if collect_trials:
                per_trial.append((float(value), i, metrics))
            if metrics.failed:
                failed[j] += 1
                continue
            for name, sample in zip(names, _metric_values(metrics)):
                samples[name].append(sample)
        for name in names:
            data = np.asarray(samples[name], dtype=float)
            data = data[~np.isnan(data)]
            if data.size == 0:
                means[name][j] = math.nan
                sems[name][j] = math.nan
            else:
                means[name][j] = data.mean()
                sems[name][j] = (
                    data.std(ddof=1) / math.sqrt(data.size) if data.size > 1 else 0.0
                )

    return SweepResult(
        axis=axis,
        values=values,
        trials=config.trials,
        means=means,
        sems=sems,
        failed=failed,
        per_trial=per_trial,
    )


def violation_rate(config: ScenarioConfig, trials: Optional[int] = None) -> float:
    """Fraction of trials whose true leaked CCI stays below the threshold.

    Only meaningful under the statistical CSI regime, whose budget is
    designed to keep this fraction at or above the configured confidence.
    """
    if config.csi.mode is not CsiMode.PATH_LOSS_AND_STATISTICS:
        raise ValueError("violation_rate requires the statistical CSI regime")
    trials = trials if trials is not None else config.trials
    leakage_matrix = build_leakage_matrix(config)
    satisfied = 0
    counted = 0
    for i in range(trials):
        metrics = run_trial(config, trial_seed(config.root_seed, i), leakage_matrix)
        if metrics.failed:
            continue
        counted += 1
        if metrics.leaked_cci_w <= config.cci_threshold_w:
            satisfied += 1
    if counted == 0:
        raise SolverError("all trials failed; no violation statistics available")
    return satisfied / counted
