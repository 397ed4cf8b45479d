"""Jordan-Wigner images of fermion terms as Pauli sums."""

import logging
from typing import Dict, Sequence

import numpy as np

from ..model.aim import FermionTerm
from ..utils.exceptions import DomainError
from .pauli import PauliString

logger = logging.getLogger(__name__)

PauliSum = Dict[str, complex]


def ladder_pauli_sum(mode: int, dagger: bool, n: int) -> PauliSum:
    """``c_j = Z..Z (X + iY)/2`` and ``c_j^ = Z..Z (X - iY)/2``."""
    if not 0 <= mode < n:
        raise DomainError(f"Mode {mode} out of range for {n} qubits")
    prefix, suffix = "Z" * mode, "I" * (n - mode - 1)
    return {
        prefix + "X" + suffix: 0.5,
        prefix + "Y" + suffix: -0.5j if dagger else 0.5j,
    }


def _multiply(left: PauliSum, right: PauliSum) -> PauliSum:
    result: PauliSum = {}
    for la, ca in left.items():
        for lb, cb in right.items():
            product = PauliString(la) * PauliString(lb)
            key = product.letters
            result[key] = result.get(key, 0.0) + ca * cb * product.coefficient
    return result


def pauli_decomposition(terms: Sequence[FermionTerm], n: int, tol: float = 1e-12) -> Dict[str, float]:
    """Real Pauli coefficients of a Hermitian term list.

    Args:
        terms: Fermion terms
        n: Number of qubits
        tol: Coefficients below this magnitude are dropped

    Returns:
        Mapping from Pauli letters to real coefficients

    Raises:
        DomainError: If the decomposition has an imaginary part (non-Hermitian input)
    """
    total: PauliSum = {}
    for term in terms:
        product: PauliSum = {"I" * n: complex(term.coefficient)}
        for mode, dagger in term.operators:
            product = _multiply(product, ladder_pauli_sum(mode, dagger, n))
        for key, value in product.items():
            total[key] = total.get(key, 0.0) + value

    decomposition = {}
    for key in sorted(total):
        value = total[key]
        if abs(value) <= tol:
            continue
        if abs(value.imag) > tol:
            raise DomainError(f"Pauli coefficient of {key} has imaginary part {value.imag:.3e}")
        decomposition[key] = float(value.real)
    logger.debug(f"Jordan-Wigner decomposition: {len(decomposition)} Pauli terms")
    return decomposition


def pauli_sum_matrix(decomposition: Dict[str, float], n: int) -> np.ndarray:
    """Dense matrix of a Pauli sum."""
    matrix = np.zeros((1 << n, 1 << n), dtype=complex)
    for letters, coefficient in decomposition.items():
        matrix += coefficient * PauliString(letters).to_matrix()
    return matrix


def alpha_norm(decomposition: Dict[str, float]) -> float:
    """One-norm of the non-identity Pauli coefficients."""
    return float(sum(abs(c) for letters, c in decomposition.items() if set(letters) != {"I"}))
