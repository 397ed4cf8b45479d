"""Spectral function ``A(w) = -Im G(w + i delta) / pi`` from a time series.

Frequencies are in cycles per unit time, matching the ``exp(i 2pi w t)``
form of the poles in ``G(t)``.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.integrate import trapezoid
from scipy.signal import find_peaks

from ..exact.ed_oracle import LehmannData
from ..model.series import GreensSeries, TimeGrid
from ..utils.exceptions import DomainError

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi
DEFAULT_DELTA = 0.1
DEFAULT_PADDING = 4


@dataclass
class SpectralSeries:
    """Broadened spectral function on a frequency grid."""

    omega: np.ndarray
    a: np.ndarray
    delta: float
    padding: int
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def bin_width(self) -> float:
        """Frequency spacing (uniform grids only)."""
        if self.omega.size < 2:
            return 0.0
        return float(self.omega[1] - self.omega[0])

    def sum_rule(self) -> float:
        """Trapezoidal integral of ``A`` over the grid."""
        return float(trapezoid(self.a, self.omega))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"omega": self.omega, "a": self.a})

    def __add__(self, other: "SpectralSeries") -> "SpectralSeries":
        if self.omega.shape != other.omega.shape or not np.allclose(self.omega, other.omega):
            raise DomainError("Spectral series are sampled on different frequency grids")
        return SpectralSeries(self.omega, self.a + other.a, self.delta, self.padding, dict(self.metadata))


def _damped_samples(series: GreensSeries, delta: float) -> Tuple[TimeGrid, np.ndarray]:
    grid = series.grid
    # conj maps the exp(+i 2pi w t) poles onto the forward transform
    x = np.conj(series.total) * np.exp(-TWO_PI * delta * grid.times)
    x[0] *= 0.5
    return grid, x


def spectral_function(
    series: GreensSeries,
    delta: float = DEFAULT_DELTA,
    omega_grid: Optional[Sequence[float]] = None,
    padding: int = DEFAULT_PADDING,
) -> SpectralSeries:
    """Fourier transform of the damped series.

    ``G(w + i delta) = -i 2pi dt sum_n' conj(G(t_n)) exp(-2pi delta t_n) exp(i 2pi w t_n)``
    with the first sample halved. Without ``omega_grid`` the sum is evaluated
    by a zero-padded FFT on ``padding * n_points`` frequencies; otherwise
    directly on the given frequencies.

    Args:
        series: Green's function on a uniform grid starting at 0
        delta: Broadening (half-width of each Lorentzian)
        omega_grid: Optional explicit frequencies
        padding: Zero-padding factor for the FFT path

    Returns:
        SpectralSeries

    Raises:
        DomainError: For a non-uniform grid, ``delta <= 0`` or ``padding < 1``
    """
    if not delta > 0:
        raise DomainError(f"Broadening must be positive, got {delta}")
    if int(padding) != padding or padding < 1:
        raise DomainError(f"Padding factor must be a positive integer, got {padding}")
    grid, x = _damped_samples(series, delta)
    if grid.n_points < 2:
        raise DomainError("Spectral function needs at least two time samples")

    if omega_grid is None:
        size = int(padding) * grid.n_points
        transformed = size * np.fft.ifft(x, size)
        omega = np.fft.fftshift(np.fft.fftfreq(size, d=grid.dt))
        transformed = np.fft.fftshift(transformed)
    else:
        omega = np.asarray(omega_grid, dtype=float)
        transformed = np.exp(1j * TWO_PI * np.outer(omega, grid.times)) @ x

    g_omega = -1j * TWO_PI * grid.dt * transformed
    a = -g_omega.imag / np.pi
    spectral = SpectralSeries(
        omega=omega,
        a=a,
        delta=float(delta),
        padding=int(padding),
        metadata={
            "dt": grid.dt,
            "n_points": grid.n_points,
            "horizon": grid.horizon,
            "method": "fft" if omega_grid is None else "direct",
        },
    )
    logger.debug(f"Spectral function on {omega.size} frequencies, integral {spectral.sum_rule():.6f}")
    return spectral


def find_peak_positions(
    spectral: SpectralSeries,
    window: Optional[Tuple[float, float]] = None,
    rel_prominence: float = 0.05,
) -> Optional[np.ndarray]:
    """Frequencies of local maxima with prominence above a fraction of the maximum.

    Returns:
        Sorted peak frequencies, or None if the window holds no samples
    """
    omega, a = spectral.omega, spectral.a
    if window is not None:
        mask = (omega >= window[0]) & (omega <= window[1])
        omega, a = omega[mask], a[mask]
    if omega.size == 0:
        logger.warning(f"No frequency samples in window {window}")
        return None
    if np.max(a) <= 0:
        return np.array([])
    indices, _ = find_peaks(a, prominence=rel_prominence * float(np.max(a)))
    return np.sort(omega[indices])


def lehmann_curve(lehmann: LehmannData, omega: Sequence[float], delta: float = DEFAULT_DELTA) -> np.ndarray:
    """Lorentzian-broadened pole sum ``sum_j w_j (delta/pi) / ((w - e_j)^2 + delta^2)``."""
    omega = np.asarray(omega, dtype=float)
    curve = np.zeros_like(omega)
    for energy, weight in lehmann.poles:
        curve += weight * (delta / np.pi) / ((omega - energy) ** 2 + delta ** 2)
    return curve


def match_peaks(peaks: Sequence[float], poles: Sequence[float], tolerance: float) -> bool:
    """True if every pole has a peak within ``tolerance``."""
    peaks = np.asarray(peaks, dtype=float)
    if peaks.size == 0:
        return len(poles) == 0
    return all(np.min(np.abs(peaks - pole)) <= tolerance for pole in poles)
