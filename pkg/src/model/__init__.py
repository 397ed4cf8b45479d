"""Impurity model definition, Fock-space helpers and series containers."""

from .aim import (
    AimParams,
    FermionTerm,
    ReferenceState,
    Spin,
    build_hamiltonian,
    hamiltonian_terms,
    impurity_qubits,
    is_hermitian,
    jw_qubit_index,
    one_body_matrix,
    reference_state,
)
from .series import GreensSeries, TimeGrid

__all__ = [
    "AimParams",
    "FermionTerm",
    "GreensSeries",
    "ReferenceState",
    "Spin",
    "TimeGrid",
    "build_hamiltonian",
    "hamiltonian_terms",
    "impurity_qubits",
    "is_hermitian",
    "jw_qubit_index",
    "one_body_matrix",
    "reference_state",
]
