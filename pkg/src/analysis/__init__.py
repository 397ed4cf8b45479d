"""Spectral analysis, error bounds and resource estimates."""

from .resources import (
    LcuStats,
    ResourceMethod,
    ResourceReport,
    TrotterErrorSeries,
    default_trotter_steps,
    lcu_failure_bound,
    resource_table,
    tgate_estimate,
    trotter_error_ratio,
    upsilon,
)
from .spectral import SpectralSeries, find_peak_positions, lehmann_curve, spectral_function

__all__ = [
    "LcuStats",
    "ResourceMethod",
    "ResourceReport",
    "SpectralSeries",
    "TrotterErrorSeries",
    "default_trotter_steps",
    "find_peak_positions",
    "lcu_failure_bound",
    "lehmann_curve",
    "resource_table",
    "spectral_function",
    "tgate_estimate",
    "trotter_error_ratio",
    "upsilon",
]
