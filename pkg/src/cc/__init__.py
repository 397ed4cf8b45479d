"""Coupled-cluster amplitudes, cluster operators and the amplitude solver."""

from .amplitudes import CCAmplitudes, Excitation, enumerate_excitations
from .operators import ClusterOperator, cluster_exponential_state
from .solver import (
    CoupledClusterSolver,
    cc_energy,
    noninteracting_determinant,
    solve_lambda_amplitudes,
    solve_t_amplitudes,
)

__all__ = [
    "CCAmplitudes",
    "ClusterOperator",
    "CoupledClusterSolver",
    "Excitation",
    "cc_energy",
    "cluster_exponential_state",
    "enumerate_excitations",
    "noninteracting_determinant",
    "solve_lambda_amplitudes",
    "solve_t_amplitudes",
]
