"""Time grids and Green's-function series."""

from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence

import numpy as np
import pandas as pd

from ..utils.exceptions import DomainError

GRID_TOLERANCE = 1e-9


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid ``t_n = n * dt`` starting at zero."""

    dt: float
    n_points: int

    def __post_init__(self):
        if not self.dt > 0:
            raise DomainError(f"Time step must be positive, got {self.dt}")
        if self.n_points < 1:
            raise DomainError(f"Grid needs at least one point, got {self.n_points}")

    @classmethod
    def from_horizon(cls, dt: float, horizon: float) -> "TimeGrid":
        """Grid covering ``[0, horizon]`` inclusive."""
        if horizon < 0:
            raise DomainError(f"Horizon must be non-negative, got {horizon}")
        return cls(dt=float(dt), n_points=int(round(horizon / dt)) + 1)

    @classmethod
    def from_times(cls, times: Sequence[float]) -> "TimeGrid":
        """Recover a grid from explicit samples.

        Raises:
            DomainError: If the samples are not uniform or do not start at 0
        """
        times = np.asarray(times, dtype=float)
        if times.ndim != 1 or times.size == 0:
            raise DomainError("Times must be a non-empty 1-D sequence")
        if abs(times[0]) > GRID_TOLERANCE:
            raise DomainError(f"Time grid must start at 0, starts at {times[0]}")
        if times.size == 1:
            return cls(dt=1.0, n_points=1)
        steps = np.diff(times)
        dt = float(steps.mean())
        if np.max(np.abs(steps - dt)) > GRID_TOLERANCE * max(1.0, abs(dt)):
            raise DomainError("Time grid is not uniform")
        return cls(dt=dt, n_points=times.size)

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_points) * self.dt

    @property
    def horizon(self) -> float:
        return (self.n_points - 1) * self.dt


@dataclass
class GreensSeries:
    """Complex ``G(t) = G<(t) + G>(t)`` sampled on a time grid."""

    times: np.ndarray
    lesser: np.ndarray
    greater: np.ndarray
    stderr_re: Optional[np.ndarray] = None
    stderr_im: Optional[np.ndarray] = None
    provenance: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.lesser = np.asarray(self.lesser, dtype=complex)
        self.greater = np.asarray(self.greater, dtype=complex)
        if not (self.times.shape == self.lesser.shape == self.greater.shape):
            raise DomainError("times, lesser and greater must have the same length")

    @property
    def total(self) -> np.ndarray:
        return self.lesser + self.greater

    @property
    def grid(self) -> TimeGrid:
        return TimeGrid.from_times(self.times)

    def max_deviation(self, other: "GreensSeries") -> float:
        """Largest pointwise ``|G - G_other|``."""
        if self.times.shape != other.times.shape or not np.allclose(self.times, other.times):
            raise DomainError("Series are sampled on different grids")
        return float(np.max(np.abs(self.total - other.total)))

    def to_frame(self) -> pd.DataFrame:
        """Tabular form with one row per time point."""
        total = self.total
        nan = np.full(self.times.shape, np.nan)
        return pd.DataFrame({
            "t": self.times,
            "re_g": total.real,
            "im_g": total.imag,
            "re_g_lesser": self.lesser.real,
            "im_g_lesser": self.lesser.imag,
            "re_g_greater": self.greater.real,
            "im_g_greater": self.greater.imag,
            "stderr_re": self.stderr_re if self.stderr_re is not None else nan,
            "stderr_im": self.stderr_im if self.stderr_im is not None else nan,
        })
