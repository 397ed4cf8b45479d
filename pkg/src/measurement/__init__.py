"""Measurement emulation and Green's-function assembly."""

from .estimators import (
    Estimate,
    LcuCircuit,
    MeasurementConfig,
    MeasurementMode,
    combination_success_rate,
    hadamard_test,
    prepare_unitary,
    term_rng,
)
from .greens import GreensFunctionEstimator, exact_expectation, greens_series, lcu_estimate

__all__ = [
    "Estimate",
    "GreensFunctionEstimator",
    "LcuCircuit",
    "MeasurementConfig",
    "MeasurementMode",
    "combination_success_rate",
    "exact_expectation",
    "greens_series",
    "hadamard_test",
    "lcu_estimate",
    "prepare_unitary",
    "term_rng",
]
