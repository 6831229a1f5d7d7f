"""Scenario description and its flat key-value config file format.

A scenario bundles everything one simulation needs: the SU OFDM grid,
the PU layout with interference thresholds, noise and fading statistics,
the CSI regime, the objective weights, and the Monte Carlo controls.

The on-disk format is deliberately plain: one ``key = value`` pair per
line, ``#`` comments, dotted section names, and explicit unit suffixes
in key names (``*_w``, ``*_hz``, ``*_m``, ``*_s``) to keep units
unambiguous.  Defaults describe the bundled reference scenario: a
128-subcarrier SU link sharing spectrum with one frequency-adjacent PU
and one distant co-channel PU.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .channel import CsiMode, CsiSpec, PathLossModel


@dataclass(frozen=True)
class PuBand:
    """One frequency-adjacent PU: band geometry, distance, and ACI threshold.

    ``center_offset_hz`` positions the PU band center relative to the SU
    band center (the SU band spans ``[-N*df/2, +N*df/2]`` around zero).
    """

    center_offset_hz: float
    bandwidth_hz: float
    distance_m: float
    threshold_w: float


def _default_adjacent() -> tuple:
    # One 312.5 kHz PU band abutting the upper SU band edge (625 kHz),
    # i.e. centered 781.25 kHz above the SU band center.
    return (
        PuBand(
            center_offset_hz=781250.0,
            bandwidth_hz=312500.0,
            distance_m=1200.0,
            threshold_w=1e-11,
        ),
    )


@dataclass(frozen=True)
class ScenarioConfig:
    """Full problem description for solves and Monte Carlo sweeps."""

    # SU OFDM grid
    n_subcarriers: int = 128
    subcarrier_spacing_hz: float = 1.25e6 / 128
    symbol_duration_s: Optional[float] = None  # None -> 1/spacing (no cyclic prefix)

    # Noise, fading and PU interference at the SU receiver
    noise_variance_w: float = 1e-15
    su_mean_gain: float = 1.0  # E|H|^2 of the SU link (0 dB)
    pu_mean_gain: float = 1.0  # E|H|^2 of the SU->PU links (0 dB)
    pu_signal_variance_w: Optional[float] = None  # None -> noise_variance_w
    pu_interference_includes_path_gain: bool = True

    # Propagation and PU layout
    path_loss: PathLossModel = field(default_factory=PathLossModel)
    cochannel_distance_m: float = 5000.0
    cci_threshold_w: float = 1e-11
    regulatory_power_cap_w: float = math.inf
    adjacent_pus: tuple = field(default_factory=_default_adjacent)

    # Knowledge regime and objective weights
    csi: CsiSpec = field(default_factory=CsiSpec)
    problem: str = "op1"
    alpha: float = 0.1
    alpha_per_pu: Optional[tuple] = None  # op2 weights, one per adjacent PU

    # Numerics
    solver_tol: float = 1e-8
    leakage_reference: str = "center"

    # Monte Carlo controls
    trials: int = 1000
    root_seed: int = 20260810

    def __post_init__(self):
        self.validate()

    # -- derived quantities -------------------------------------------------

    @property
    def n_pu(self) -> int:
        return len(self.adjacent_pus)

    @property
    def su_bandwidth_hz(self) -> float:
        return self.n_subcarriers * self.subcarrier_spacing_hz

    @property
    def resolved_symbol_duration_s(self) -> float:
        if self.symbol_duration_s is not None:
            return self.symbol_duration_s
        return 1.0 / self.subcarrier_spacing_hz

    @property
    def resolved_pu_signal_variance_w(self) -> float:
        if self.pu_signal_variance_w is not None:
            return self.pu_signal_variance_w
        return self.noise_variance_w

    def subcarrier_centers_hz(self) -> np.ndarray:
        """Subcarrier centers relative to the SU band center."""
        idx = np.arange(self.n_subcarriers, dtype=float)
        return (idx - (self.n_subcarriers - 1) / 2.0) * self.subcarrier_spacing_hz

    # -- validation ----------------------------------------------------------

    def validate(self) -> None:
        if self.n_subcarriers < 1:
            raise ValueError("channel.n_subcarriers: must be at least 1")
        if self.subcarrier_spacing_hz <= 0:
            raise ValueError("channel.subcarrier_spacing_hz: must be positive")
        if self.symbol_duration_s is not None and self.symbol_duration_s <= 0:
            raise ValueError("channel.symbol_duration_s: must be positive")
        if self.noise_variance_w <= 0:
            raise ValueError("channel.noise_variance_w: must be positive")
        if self.su_mean_gain <= 0 or self.pu_mean_gain <= 0:
            raise ValueError("mean channel power gains must be positive")
        if self.pu_signal_variance_w is not None and self.pu_signal_variance_w < 0:
            raise ValueError("pu.signal_variance_w: must be non-negative")
        d0 = self.path_loss.reference_distance_m
        if self.cochannel_distance_m < d0:
            raise ValueError(
                "pu.cochannel.distance_m: below the path loss reference distance"
            )
        if self.cci_threshold_w <= 0:
            raise ValueError("pu.cochannel.threshold_w: budget must be positive")
        if self.regulatory_power_cap_w <= 0:
            raise ValueError("regulatory.power_cap_w: budget must be positive")
        for k, band in enumerate(self.adjacent_pus):
            prefix = f"pu.adjacent.{k}"
            if band.bandwidth_hz <= 0:
                raise ValueError(f"{prefix}.bandwidth_hz: must be positive")
            if band.distance_m < d0:
                raise ValueError(
                    f"{prefix}.distance_m: below the path loss reference distance"
                )
            if band.threshold_w <= 0:
                raise ValueError(f"{prefix}.threshold_w: budget must be positive")
        if self.problem not in ("op1", "op2"):
            raise ValueError("solver.problem: must be 'op1' or 'op2'")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("solver.alpha: must lie in [0, 1]")
        if self.alpha_per_pu is not None:
            if len(self.alpha_per_pu) != self.n_pu:
                raise ValueError(
                    "solver.alpha_per_pu: needs one weight per adjacent PU"
                )
            if any(a < 0 for a in self.alpha_per_pu):
                raise ValueError("solver.alpha_per_pu: weights must be non-negative")
            if sum(self.alpha_per_pu) > 1.0 + 1e-12:
                raise ValueError("solver.alpha_per_pu: weights must sum to at most 1")
        if self.problem == "op2" and self.alpha_per_pu is None:
            raise ValueError("solver.alpha_per_pu: required when solver.problem=op2")
        if self.solver_tol <= 0:
            raise ValueError("solver.tol: must be positive")
        if self.leakage_reference not in ("center", "edge"):
            raise ValueError("solver.leakage_reference: must be 'center' or 'edge'")
        if self.trials < 1:
            raise ValueError("mc.trials: must be at least 1")


def default_scenario(**overrides) -> ScenarioConfig:
    """The bundled reference scenario, optionally with field overrides."""
    return dataclasses.replace(ScenarioConfig(), **overrides) if overrides else ScenarioConfig()


# -- config file round trip ----------------------------------------------------

_CSI_NAMES = {
    "path_loss": CsiMode.PATH_LOSS_ONLY,
    "statistics": CsiMode.PATH_LOSS_AND_STATISTICS,
    "full": CsiMode.FULL_CSI,
}


def _parse_float(key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ValueError(f"config key '{key}': cannot parse '{raw}' as a number")


def _parse_int(key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"config key '{key}': cannot parse '{raw}' as an integer")


def _parse_bool(key: str, raw: str) -> bool:
    lowered = raw.lower()
    if lowered in ("true", "1", "yes"):
        return True
    if lowered in ("false", "0", "no"):
        return False
    raise ValueError(f"config key '{key}': cannot parse '{raw}' as a boolean")


def load_scenario(path: str) -> ScenarioConfig:
    """Parse a scenario config file; unknown or malformed keys are named."""
    pairs = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise ValueError(f"line {lineno}: expected 'key = value', got '{stripped}'")
            key, raw = (part.strip() for part in stripped.split("=", 1))
            if key in pairs:
                raise ValueError(f"config key '{key}': given more than once")
            pairs[key] = raw
    return scenario_from_pairs(pairs)


def scenario_from_pairs(pairs: dict) -> ScenarioConfig:
    pairs = dict(pairs)
    kwargs = {}

    def take(key):
        return pairs.pop(key, None)

    simple_float = {
        "channel.subcarrier_spacing_hz": "subcarrier_spacing_hz",
        "channel.noise_variance_w": "noise_variance_w",
        "channel.su_mean_gain": "su_mean_gain",
        "channel.pu_mean_gain": "pu_mean_gain",
        "pu.cochannel.distance_m": "cochannel_distance_m",
        "pu.cochannel.threshold_w": "cci_threshold_w",
        "regulatory.power_cap_w": "regulatory_power_cap_w",
        "solver.alpha": "alpha",
        "solver.tol": "solver_tol",
    }
    for key, fieldname in simple_float.items():
        raw = take(key)
        if raw is not None:
            kwargs[fieldname] = _parse_float(key, raw)

    raw = take("channel.n_subcarriers")
    if raw is not None:
        kwargs["n_subcarriers"] = _parse_int("channel.n_subcarriers", raw)
    raw = take("channel.symbol_duration_s")
    if raw is not None and raw.lower() != "auto":
        kwargs["symbol_duration_s"] = _parse_float("channel.symbol_duration_s", raw)
    raw = take("pu.signal_variance_w")
    if raw is not None:
        kwargs["pu_signal_variance_w"] = _parse_float("pu.signal_variance_w", raw)
    raw = take("pu.interference_includes_path_gain")
    if raw is not None:
        kwargs["pu_interference_includes_path_gain"] = _parse_bool(
            "pu.interference_includes_path_gain", raw
        )

    pl_kwargs = {}
    for key, fieldname in (
        ("pathloss.exponent", "exponent"),
        ("pathloss.wavelength_m", "wavelength_m"),
        ("pathloss.reference_distance_m", "reference_distance_m"),
    ):
        raw = take(key)
        if raw is not None:
            pl_kwargs[fieldname] = _parse_float(key, raw)
    if pl_kwargs:
        try:
            kwargs["path_loss"] = PathLossModel(**{**dataclasses.asdict(PathLossModel()), **pl_kwargs})
        except ValueError as exc:
            raise ValueError(f"pathloss.*: {exc}")

    # Adjacent PU bands: contiguous indices starting at 0.
    band_fields = ("center_offset_hz", "bandwidth_hz", "distance_m", "threshold_w")
    band_keys = [k for k in pairs if k.startswith("pu.adjacent.")]
    if band_keys:
        indices = set()
        for key in band_keys:
            parts = key.split(".")
            if len(parts) != 4 or parts[3] not in band_fields:
                raise ValueError(f"config key '{key}': unknown adjacent PU field")
            try:
                indices.add(int(parts[2]))
            except ValueError:
                raise ValueError(f"config key '{key}': PU index must be an integer")
        if indices != set(range(len(indices))):
            raise ValueError("pu.adjacent.*: PU indices must be contiguous from 0")
        bands = []
        for k in range(len(indices)):
            values = {}
            for name in band_fields:
                key = f"pu.adjacent.{k}.{name}"
                raw = take(key)
                if raw is None:
                    raise ValueError(f"config key '{key}': missing")
                values[name] = _parse_float(key, raw)
            bands.append(PuBand(**values))
        kwargs["adjacent_pus"] = tuple(bands)

    raw_mode = take("csi.mode")
    raw_psi = take("csi.psi_th")
    raw_nu = take("csi.nu")
    if raw_mode is not None or raw_psi is not None or raw_nu is not None:
        mode_name = raw_mode if raw_mode is not None else "path_loss"
        if mode_name not in _CSI_NAMES:
            raise ValueError(
                f"config key 'csi.mode': unknown mode '{mode_name}' "
                f"(expected one of {sorted(_CSI_NAMES)})"
            )
        psi = _parse_float("csi.psi_th", raw_psi) if raw_psi is not None else None
        nu = _parse_float("csi.nu", raw_nu) if raw_nu is not None else None
        try:
            kwargs["csi"] = CsiSpec(mode=_CSI_NAMES[mode_name], psi_th=psi, nu=nu)
        except ValueError as exc:
            raise ValueError(str(exc))

    raw = take("solver.problem")
    if raw is not None:
        kwargs["problem"] = raw
    raw = take("solver.alpha_per_pu")
    if raw is not None:
        try:
            kwargs["alpha_per_pu"] = tuple(float(part) for part in raw.split(","))
        except ValueError:
            raise ValueError(
                "config key 'solver.alpha_per_pu': expected a comma-separated list"
            )
    raw = take("solver.leakage_reference")
    if raw is not None:
        kwargs["leakage_reference"] = raw
    raw = take("mc.trials")
    if raw is not None:
        kwargs["trials"] = _parse_int("mc.trials", raw)
    raw = take("mc.root_seed")
    if raw is not None:
        kwargs["root_seed"] = _parse_int("mc.root_seed", raw)

    if pairs:
        unknown = sorted(pairs)[0]
        raise ValueError(f"config key '{unknown}': unknown key")
    return ScenarioConfig(**kwargs)


def save_scenario(config: ScenarioConfig, path: str) -> None:
    """Write a config file that round-trips through load_scenario."""
    lines = [
        f"channel.n_subcarriers = {config.n_subcarriers}",
        f"channel.subcarrier_spacing_hz = {config.subcarrier_spacing_hz!r}",
    ]
    if config.symbol_duration_s is not None:
        lines.append(f"channel.symbol_duration_s = {config.symbol_duration_s!r}")
    lines += [
        f"channel.noise_variance_w = {config.noise_variance_w!r}",
        f"channel.su_mean_gain = {config.su_mean_gain!r}",
        f"channel.pu_mean_gain = {config.pu_mean_gain!r}",
        f"pathloss.exponent = {config.path_loss.exponent!r}",
        f"pathloss.wavelength_m = {config.path_loss.wavelength_m!r}",
        f"pathloss.reference_distance_m = {config.path_loss.reference_distance_m!r}",
        f"pu.cochannel.distance_m = {config.cochannel_distance_m!r}",
        f"pu.cochannel.threshold_w = {config.cci_threshold_w!r}",
    ]
    if config.pu_signal_variance_w is not None:
        lines.append(f"pu.signal_variance_w = {config.pu_signal_variance_w!r}")
    lines.append(
        "pu.interference_includes_path_gain = "
        + ("true" if config.pu_interference_includes_path_gain else "false")
    )
    for k, band in enumerate(config.adjacent_pus):
        lines += [
            f"pu.adjacent.{k}.center_offset_hz = {band.center_offset_hz!r}",
            f"pu.adjacent.{k}.bandwidth_hz = {band.bandwidth_hz!r}",
            f"pu.adjacent.{k}.distance_m = {band.distance_m!r}",
            f"pu.adjacent.{k}.threshold_w = {band.threshold_w!r}",
        ]
    lines.append(f"csi.mode = {config.csi.mode.value}")
    if config.csi.psi_th is not None:
        lines.append(f"csi.psi_th = {config.csi.psi_th!r}")
    if config.csi.nu is not None:
        lines.append(f"csi.nu = {config.csi.nu!r}")
    lines.append(f"solver.problem = {config.problem}")
    lines.append(f"solver.alpha = {config.alpha!r}")
    if config.alpha_per_pu is not None:
        lines.append(
            "solver.alpha_per_pu = " + ",".join(repr(a) for a in config.alpha_per_pu)
        )
    lines += [
        f"solver.tol = {config.solver_tol!r}",
        f"solver.leakage_reference = {config.leakage_reference}",
        f"regulatory.power_cap_w = {config.regulatory_power_cap_w!r}",
        f"mc.trials = {config.trials}",
        f"mc.root_seed = {config.root_seed}",
    ]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
