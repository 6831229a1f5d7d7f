"""Channel model: path loss, Rayleigh fading draws, and partial-CSI coefficients.

The secondary user (SU) link and the SU-to-primary-user (PU) links are
Rayleigh faded with configurable average power gains.  Large-scale
attenuation follows a log-distance path loss anchored at the free-space
loss of a reference distance.  Depending on how much the SU transmitter
knows about an SU-to-PU link, an interference threshold at the PU
translates into an SU transmit-power budget through a channel knowledge
coefficient:

* path loss only: the budget inverts the deterministic attenuation;
* path loss and fading statistics: the budget additionally guarantees
  that the instantaneous interference stays below the threshold with a
  configurable probability, using the exponential law of the squared
  Rayleigh gain;
* full CSI: the budget inverts the realized instantaneous gain, an
  upper bound used for comparison.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

import numpy as np

if TYPE_CHECKING:  # pragma: no cover
    from .scenario import ScenarioConfig


@dataclass(frozen=True)
class PathLossModel:
    """Log-distance path loss with a free-space anchor at the reference distance.

    Attributes:
        exponent: decay exponent of the distance term (> 0).
        wavelength_m: carrier wavelength in meters.
        reference_distance_m: anchor distance d0 in meters (> 0).
    """

    exponent: float = 4.0
    wavelength_m: float = 1.0 / 3.0
    reference_distance_m: float = 100.0

    def __post_init__(self):
        if self.exponent <= 0:
            raise ValueError("path loss exponent must be positive")
        if self.wavelength_m <= 0:
            raise ValueError("wavelength must be positive")
        if self.reference_distance_m <= 0:
            raise ValueError("reference distance must be positive")

    @property
    def free_space_reference_db(self) -> float:
        """Free-space loss at the reference distance, 20*log10(4*pi*d0/lambda)."""
        return 20.0 * math.log10(
            4.0 * math.pi * self.reference_distance_m / self.wavelength_m
        )


def path_loss_db(model: PathLossModel, distance_m: float) -> float:
    """Path loss in dB at ``distance_m``.

    PL(d) = PL(d0) + 10 * exponent * log10(d / d0), valid for d >= d0.

    Raises:
        ValueError: if the distance is below the reference distance.
    """
    if not math.isfinite(distance_m) or distance_m < model.reference_distance_m:
        raise ValueError(
            f"distance {distance_m} m is below the reference distance "
            f"{model.reference_distance_m} m"
        )
    return model.free_space_reference_db + 10.0 * model.exponent * math.log10(
        distance_m / model.reference_distance_m
    )


def path_gain(model: PathLossModel, distance_m: float) -> float:
    """Linear power gain 10**(-0.1 * PL(d))."""
    return 10.0 ** (-0.1 * path_loss_db(model, distance_m))


class CsiMode(enum.Enum):
    """How much the SU transmitter knows about its links to PU receivers."""

    PATH_LOSS_ONLY = "path_loss"
    PATH_LOSS_AND_STATISTICS = "statistics"
    FULL_CSI = "full"


@dataclass(frozen=True)
class CsiSpec:
    """CSI regime plus the parameters the statistical regime needs.

    Attributes:
        mode: the knowledge regime.
        psi_th: confidence level in (0, 1) with which interference must stay
            below its threshold (statistics mode only).
        nu: rate parameter of the exponential squared-gain law, i.e. the
            reciprocal of the mean squared gain (statistics mode only).
    """

    mode: CsiMode = CsiMode.PATH_LOSS_ONLY
    psi_th: Optional[float] = None
    nu: Optional[float] = None

    def __post_init__(self):
        if self.mode is CsiMode.PATH_LOSS_AND_STATISTICS:
            if self.psi_th is None or not 0.0 < self.psi_th < 1.0:
                raise ValueError("csi.psi_th must lie strictly between 0 and 1")
            if self.nu is None or self.nu <= 0.0:
                raise ValueError("csi.nu must be positive")


def knowledge_coefficient(
    csi: CsiSpec, pl_db: float, instantaneous_gain_sq: Optional[float] = None
) -> float:
    """Coefficient X turning a PU interference threshold into an SU power budget.

    The admissible total SU power toward a PU with threshold P_th is
    P_th * X, where X depends on the CSI regime:

    * path loss only:   X = 1 / 10**(-0.1 * pl_db)
    * with statistics:  X = nu / ((-ln(1 - psi_th)) * 10**(-0.1 * pl_db))
    * full CSI:         X = 1 / (gain_sq * 10**(-0.1 * pl_db))

    Raises:
        ValueError: on non-finite path loss, or a missing/zero instantaneous
            gain under full CSI (a zero gain would make the constraint
            vacuous, which is reported rather than returned as infinity).
    """
    if not math.isfinite(pl_db):
        raise ValueError("path loss must be finite")
    attenuation = 10.0 ** (-0.1 * pl_db)
    if csi.mode is CsiMode.PATH_LOSS_ONLY:
        return 1.0 / attenuation
    if csi.mode is CsiMode.PATH_LOSS_AND_STATISTICS:
        return csi.nu / ((-math.log(1.0 - csi.psi_th)) * attenuation)
    if instantaneous_gain_sq is None or instantaneous_gain_sq <= 0.0:
        raise ValueError(
            "full CSI requires a positive instantaneous squared gain; "
            f"got {instantaneous_gain_sq}"
        )
    return 1.0 / (instantaneous_gain_sq * attenuation)


def compute_gamma(
    su_gain_sq: np.ndarray, noise_variance_w: float, interference_w: np.ndarray
) -> np.ndarray:
    """Per-subcarrier gain to noise-plus-interference ratio, in 1/W."""
    if noise_variance_w <= 0:
        raise ValueError("noise variance must be positive")
    return np.asarray(su_gain_sq, dtype=float) / (
        noise_variance_w + np.asarray(interference_w, dtype=float)
    )


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """One fading draw for every link the scenario involves.

    Attributes:
        su_gains: complex gain per SU subcarrier, shape (N,).
        pu_cochannel_gain: complex gain toward the co-channel PU receiver.
        pu_adjacent_gains: complex gain toward each adjacent PU, shape (L,).
        gamma: |su_gains|^2 / (noise + interference) per subcarrier, 1/W.
    """

    su_gains: np.ndarray
    pu_cochannel_gain: complex
    pu_adjacent_gains: np.ndarray
    gamma: np.ndarray


def _band_overlap_hz(lo1: np.ndarray, hi1: np.ndarray, lo2: float, hi2: float):
    return np.maximum(0.0, np.minimum(hi1, hi2) - np.maximum(lo1, lo2))


def pu_interference_profile(config: "ScenarioConfig") -> np.ndarray:
    """Interference power J_i each PU deposits into every SU subcarrier, in W.

    Each PU transmits a band-limited process modeled with a flat power
    spectral density: its total variance spread uniformly over its band.
    A subcarrier picks up the fraction of that variance proportional to
    the spectral overlap with its own (spacing-wide) slot, attenuated by
    the PU-to-SU path gain when the config enables it.  The co-channel PU
    occupies the whole SU band; adjacent PUs sit at their configured
    offsets and only contribute where their bands overlap SU subcarriers.
    """
    centers = config.subcarrier_centers_hz()
    half_slot = 0.5 * config.subcarrier_spacing_hz
    slot_lo = centers - half_slot
    slot_hi = centers + half_slot
    variance = config.resolved_pu_signal_variance_w
    profile = np.zeros(config.n_subcarriers)

    # (band center, bandwidth, distance) for the co-channel PU and each adjacent PU
    bands = [(0.0, config.su_bandwidth_hz, config.cochannel_distance_m)]
    bands += [
        (band.center_offset_hz, band.bandwidth_hz, band.distance_m)
        for band in config.adjacent_pus
    ]
    for center, width, distance in bands:
        overlap = _band_overlap_hz(
            slot_lo, slot_hi, center - 0.5 * width, center + 0.5 * width
        )
        gain = 1.0
        if config.pu_interference_includes_path_gain:
            gain = path_gain(config.path_loss, distance)
        profile += variance * (overlap / width) * gain
    return profile


def pu_interference(config: "ScenarioConfig", subcarrier: int) -> float:
    """J_i for a single subcarrier index."""
    return float(pu_interference_profile(config)[subcarrier])


def _complex_gains(rng: np.random.Generator, size, mean_power: float) -> np.ndarray:
    scale = math.sqrt(mean_power / 2.0)
    return scale * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


def draw_realization(rng_seed, config: "ScenarioConfig") -> ChannelRealization:
    """Draw one Rayleigh realization of all links; pure function of the seed.

    Gains are circularly-symmetric complex Gaussians, so squared magnitudes
    are exponential with the configured means.  The SU gains are i.i.d.
    across subcarriers.
    """
    rng = np.random.default_rng(rng_seed)
    n = config.n_subcarriers
    su = _complex_gains(rng, n, config.su_mean_gain)
    pu_m = complex(_complex_gains(rng, (), config.pu_mean_gain))
    pu_adj = _complex_gains(rng, len(config.adjacent_pus), config.pu_mean_gain)
    interference = pu_interference_profile(config)
    gamma = compute_gamma(np.abs(su) ** 2, config.noise_variance_w, interference)
    return ChannelRealization(
        su_gains=su,
        pu_cochannel_gain=pu_m,
        pu_adjacent_gains=pu_adj,
        gamma=gamma,
    )
