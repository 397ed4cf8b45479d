"""Exact-diagonalization reference results."""

from .ed_oracle import (
    EdSolution,
    ExactDiagonalizationSolver,
    LehmannData,
    exact_greens,
    ground_state,
    lehmann_spectrum,
)

__all__ = [
    "EdSolution",
    "ExactDiagonalizationSolver",
    "LehmannData",
    "exact_greens",
    "ground_state",
    "lehmann_spectrum",
]
