"""Fock-space bit arithmetic under the Jordan-Wigner convention.

Qubit ``q`` is occupied when its bit is set. Qubit 0 is the most
significant bit of a basis index, so ``format(index, "0nb")`` prints qubit 0
first. A ladder operator on qubit ``j`` picks up the sign
``(-1)**(number of occupied qubits before j)``.
"""

from functools import lru_cache
from typing import Sequence, Tuple

import numpy as np

from ..utils.exceptions import DomainError

LadderOp = Tuple[int, bool]


def bit_position(qubit: int, n: int) -> int:
    """Integer bit position holding ``qubit`` in an ``n``-qubit index."""
    if not 0 <= qubit < n:
        raise DomainError(f"Qubit {qubit} out of range for {n} qubits")
    return n - 1 - qubit


def basis_index(bits: Sequence[int]) -> int:
    """Basis index of an occupation list given qubit 0 first."""
    index = 0
    for b in bits:
        index = (index << 1) | int(b)
    return index


def index_to_bits(index: int, n: int) -> Tuple[int, ...]:
    """Occupation tuple (qubit 0 first) of a basis index."""
    return tuple((index >> (n - 1 - q)) & 1 for q in range(n))


def popcount(values: np.ndarray) -> np.ndarray:
    """Vectorized number of set bits."""
    values = np.asarray(values, dtype=np.int64)
    counts = np.zeros_like(values)
    remaining = values.copy()
    while np.any(remaining):
        counts += remaining & 1
        remaining >>= 1
    return counts


def apply_ladder_sequence(
    indices: np.ndarray,
    operators: Sequence[LadderOp],
    n: int,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Act with a product of ladder operators on basis states.

    The product is written left to right, so the last operator acts first.

    Args:
        indices: Basis indices the product acts on
        operators: Sequence of (qubit, dagger) pairs
        n: Number of qubits

    Returns:
        Tuple of (signs, resulting indices, valid mask). Entries where the
        product annihilates the state have ``valid == False``.
    """
    current = np.array(indices, dtype=np.int64, copy=True)
    signs = np.ones(current.shape, dtype=np.int64)
    valid = np.ones(current.shape, dtype=bool)

    for qubit, dagger in reversed(list(operators)):
        pos = bit_position(qubit, n)
        occupied = (current >> pos) & 1
        valid &= occupied == (0 if dagger else 1)
        parity = popcount(current >> (pos + 1)) & 1
        signs *= 1 - 2 * parity
        current ^= 1 << pos

    return signs, current, valid


def apply_ladder_bits(index: int, operators: Sequence[LadderOp], n: int) -> Tuple[int, int]:
    """Scalar form of :func:`apply_ladder_sequence`; sign 0 means annihilated."""
    signs, out, valid = apply_ladder_sequence(np.array([index]), operators, n)
    if not valid[0]:
        return 0, int(index)
    return int(signs[0]), int(out[0])


def apply_operator(
    vector: np.ndarray,
    operators: Sequence[LadderOp],
    n: int,
    coefficient: complex = 1.0,
) -> np.ndarray:
    """Apply ``coefficient * prod(operators)`` to a Fock-space vector."""
    vector = np.asarray(vector)
    dim = 1 << n
    if vector.shape[0] != dim:
        raise DomainError(f"Vector of length {vector.shape[0]} does not match {n} qubits")

    source = np.arange(dim, dtype=np.int64)
    signs, target, valid = apply_ladder_sequence(source, operators, n)
    dtype = np.result_type(vector.dtype, np.asarray(coefficient).dtype, np.float64)
    out = np.zeros(vector.shape, dtype=dtype)
    src, tgt, sgn = source[valid], target[valid], signs[valid]
    if vector.ndim == 1:
        out[tgt] = coefficient * sgn * vector[src]
    else:
        out[tgt] = coefficient * sgn[:, None] * vector[src]
    return out


def operator_matrix(operators: Sequence[LadderOp], n: int, coefficient: float = 1.0) -> np.ndarray:
    """Dense real matrix of ``coefficient * prod(operators)``."""
    dim = 1 << n
    source = np.arange(dim, dtype=np.int64)
    signs, target, valid = apply_ladder_sequence(source, operators, n)
    matrix = np.zeros((dim, dim))
    matrix[target[valid], source[valid]] += coefficient * signs[valid]
    return matrix


@lru_cache(maxsize=8)
def number_diagonal(n: int) -> np.ndarray:
    """Diagonal of the total particle-number operator."""
    return popcount(np.arange(1 << n)).astype(float)


def sz_diagonal(n_bath: int) -> np.ndarray:
    """Diagonal of ``2 S_z`` (up count minus down count) for the AIM register."""
    n = 2 * (n_bath + 1)
    down_mask = ((1 << (n_bath + 1)) - 1) << (n_bath + 1)
    up_mask = (1 << (n_bath + 1)) - 1
    indices = np.arange(1 << n)
    return (popcount(indices & up_mask) - popcount(indices & down_mask)).astype(float)


def sector_indices(n: int, n_electrons: int) -> np.ndarray:
    """Basis indices with exactly ``n_electrons`` set bits."""
    indices = np.arange(1 << n)
    return indices[popcount(indices) == n_electrons]
