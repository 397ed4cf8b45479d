"""Pauli strings, Jordan-Wigner images and unitary expansions."""

from .jordan_wigner import alpha_norm, pauli_decomposition
from .pauli import PauliString, majorana_product, majorana_x
from .unitary_map import (
    BraMethod,
    ExpansionMode,
    GreensPart,
    LcuExpansion,
    LcuTerm,
    build_greater_lcu,
    build_lesser_lcu,
)

__all__ = [
    "BraMethod",
    "ExpansionMode",
    "GreensPart",
    "LcuExpansion",
    "LcuTerm",
    "PauliString",
    "alpha_norm",
    "build_greater_lcu",
    "build_lesser_lcu",
    "majorana_product",
    "majorana_x",
    "pauli_decomposition",
]
