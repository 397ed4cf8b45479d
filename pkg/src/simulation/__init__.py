"""Statevector emulation and time evolution."""

from .circuit_sim import (
    EvolutionConfig,
    EvolutionMode,
    ExactEvolution,
    StateVector,
    TrotterEvolution,
    TrotterSplit,
    apply_pauli,
    controlled,
    exact_propagator,
    split_layers,
    trotter_evolve,
)

__all__ = [
    "EvolutionConfig",
    "EvolutionMode",
    "ExactEvolution",
    "StateVector",
    "TrotterEvolution",
    "TrotterSplit",
    "apply_pauli",
    "controlled",
    "exact_propagator",
    "split_layers",
    "trotter_evolve",
]
