"""Spectral leakage of OFDM subcarriers into primary-user bands.

A subcarrier with symbol duration T_s has the power spectrum
T_s * sinc^2(T_s * f), with sinc(x) = sin(pi x) / (pi x).  The leakage
factor toward a PU band of width B at spectral distance f is the
integral of that spectrum over [f - B/2, f + B/2]; it is the fraction
of the subcarrier's power landing inside the band, hence always in
[0, 1].

Quadrature strategy: after substituting u = T_s * f the integrand is
sinc^2(u), which oscillates with period-1 lobes.  The integration range
is split at the lobe boundaries (integer u) and each piece is handled
by Simpson's rule with interval doubling until the Richardson error
estimate meets the piece's share of the tolerance.  Far tails are
truncated once the analytic bound on the remaining mass
(integral of 1/(pi u)^2) drops below half the requested tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO, TYPE_CHECKING, Sequence

import numpy as np

from .csvio import write_csv

if TYPE_CHECKING:  # pragma: no cover
    from .scenario import PuBand, ScenarioConfig

DEFAULT_TOL = 1e-9

_PI_SQ = math.pi**2


def _sinc_sq(u: np.ndarray) -> np.ndarray:
    s = np.sinc(u)
    return s * s


def _simpson_chunk(a: float, b: float, tol: float) -> float:
    """Simpson's rule on one lobe-free piece, doubling until converged."""
    n = 8
    x = np.linspace(a, b, n + 1)
    y = _sinc_sq(x)
    h = (b - a) / n
    prev = (h / 3.0) * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum())
    while n < 1 << 16:
        n *= 2
        x = np.linspace(a, b, n + 1)
        y = _sinc_sq(x)
        h = (b - a) / n
        cur = (h / 3.0) * (
            y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum()
        )
        err = (cur - prev) / 15.0
        if abs(err) <= tol:
            return cur + err
        prev = cur
    return prev


def _tail_mass(a: float, b: float) -> float:
    """Upper bound on the integral of sinc^2 over [a, b], for a > 0."""
    return (1.0 / a - 1.0 / b) / _PI_SQ if b > a else 0.0


def _integral_nonneg(a: float, b: float, tol: float) -> float:
    """Integral of sinc^2(u) over [a, b] with 0 <= a <= b, error <= tol."""
    if b <= a:
        return 0.0
    # Truncate where the remaining mass is provably below half the budget.
    cutoff = b
    if b > 1.0:
        cutoff = 1.0 / (_PI_SQ * (tol / 2.0) + 1.0 / b)
        cutoff = min(b, max(cutoff, a))
    if cutoff <= a:
        return 0.0
    n_chunks = max(1, int(math.ceil(cutoff - a)) + 1)
    chunk_tol = (tol / 2.0) / n_chunks
    total = 0.0
    x = a
    while x < cutoff:
        nxt = min(cutoff, math.floor(x) + 1.0)
        if nxt <= x:
            nxt = min(cutoff, x + 1.0)
        total += _simpson_chunk(x, nxt, chunk_tol)
        x = nxt
    return total


def leakage_factor(
    symbol_duration_s: float,
    spectral_distance_hz: float,
    bandwidth_hz: float,
    tol: float = DEFAULT_TOL,
) -> float:
    """Fraction of a subcarrier's power landing in a band of width
    ``bandwidth_hz`` centered ``spectral_distance_hz`` away.

    Args:
        symbol_duration_s: OFDM symbol duration T_s (> 0).
        spectral_distance_hz: subcarrier center to band center offset; the
            spectrum is even, so the sign is irrelevant.
        bandwidth_hz: band width (> 0).
        tol: absolute quadrature error budget (> 0).

    Raises:
        ValueError: on non-positive duration, bandwidth, or tolerance.
    """
    if symbol_duration_s <= 0:
        raise ValueError("symbol duration must be positive")
    if bandwidth_hz <= 0:
        raise ValueError("bandwidth must be positive")
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    lo = symbol_duration_s * (spectral_distance_hz - 0.5 * bandwidth_hz)
    hi = symbol_duration_s * (spectral_distance_hz + 0.5 * bandwidth_hz)
    if hi <= 0.0:
        lo, hi = -hi, -lo
    if lo < 0.0:
        value = _integral_nonneg(0.0, -lo, tol / 2.0) + _integral_nonneg(
            0.0, hi, tol / 2.0
        )
    else:
        value = _integral_nonneg(lo, hi, tol)
    return min(1.0, max(0.0, value))


@dataclass(frozen=True, eq=False)
class LeakageMatrix:
    """Leakage factors of every subcarrier toward every adjacent PU band.

    Attributes:
        values: (N, L) matrix, values[i][l] in [0, 1].
        symbol_duration_s: T_s used for the spectra.
        pu_bands: the adjacent PU band layout the matrix was built for.
    """

    values: np.ndarray
    symbol_duration_s: float
    pu_bands: Sequence["PuBand"]

    @property
    def n_subcarriers(self) -> int:
        return self.values.shape[0]

    @property
    def n_pu(self) -> int:
        return self.values.shape[1]

    def to_csv(self, stream: IO[str]) -> None:
        """One row per subcarrier, one column per PU."""
        header = ["subcarrier"] + [f"pu_{l + 1}" for l in range(self.n_pu)]
        rows = (
            [i + 1] + list(self.values[i]) for i in range(self.n_subcarriers)
        )
        write_csv(stream, header, rows)


def build_leakage_matrix(
    config: "ScenarioConfig", tol: float = DEFAULT_TOL
) -> LeakageMatrix:
    """Evaluate the leakage factor for every (subcarrier, adjacent PU) pair.

    The spectral distance is measured between the subcarrier center and
    the PU band center by default.  With ``config.leakage_reference`` set
    to ``"edge"`` the configured offset is instead read as the distance
    from the subcarrier center to the nearest band edge, shifting the
    integration window outward by half a bandwidth.
    """
    centers = config.subcarrier_centers_hz()
    ts = config.resolved_symbol_duration_s
    n = config.n_subcarriers
    bands = config.adjacent_pus
    for band in bands:
        if band.bandwidth_hz <= 0:
            raise ValueError("PU bandwidth must be positive")
    values = np.empty((n, len(bands)))
    for l, band in enumerate(bands):
        for i in range(n):
            distance = abs(band.center_offset_hz - centers[i])
            if config.leakage_reference == "edge":
                distance += 0.5 * band.bandwidth_hz
            values[i, l] = leakage_factor(ts, distance, band.bandwidth_hz, tol)
    return LeakageMatrix(values=values, symbol_duration_s=ts, pu_bands=tuple(bands))
