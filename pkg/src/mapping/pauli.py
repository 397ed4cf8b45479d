"""Phased Pauli strings."""

from dataclasses import dataclass
from functools import reduce
from typing import Dict, Tuple

import numpy as np

from ..utils.exceptions import DomainError

_MATRICES: Dict[str, np.ndarray] = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# (left, right) -> (power of i, letter) for single-qubit products
_PRODUCTS: Dict[Tuple[str, str], Tuple[int, str]] = {}
for _a in "IXYZ":
    _PRODUCTS[("I", _a)] = (0, _a)
    _PRODUCTS[(_a, "I")] = (0, _a)
    _PRODUCTS[(_a, _a)] = (0, "I")
for _a, _b, _c in (("X", "Y", "Z"), ("Y", "Z", "X"), ("Z", "X", "Y")):
    _PRODUCTS[(_a, _b)] = (1, _c)
    _PRODUCTS[(_b, _a)] = (3, _c)

_PHASES = (1, 1j, -1, -1j)
_PHASE_LABELS = ("", "i", "-", "-i")


@dataclass(frozen=True)
class PauliString:
    """``i**phase`` times a tensor product of single-qubit Paulis, qubit 0 first."""

    letters: str
    phase: int = 0

    def __post_init__(self):
        if any(ch not in "IXYZ" for ch in self.letters):
            raise DomainError(f"Invalid Pauli letters: {self.letters!r}")
        object.__setattr__(self, "phase", int(self.phase) % 4)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls("I" * n)

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Parse labels such as ``"-iZZXI"``."""
        for phase in (3, 1, 2, 0):
            prefix = _PHASE_LABELS[phase]
            if label.startswith(prefix) and (prefix or label[:1] in "IXYZ"):
                rest = label[len(prefix):]
                if rest and all(ch in "IXYZ" for ch in rest):
                    return cls(rest, phase)
        raise DomainError(f"Invalid Pauli label: {label!r}")

    @property
    def n(self) -> int:
        return len(self.letters)

    @property
    def coefficient(self) -> complex:
        return _PHASES[self.phase]

    @property
    def label(self) -> str:
        return _PHASE_LABELS[self.phase] + self.letters

    @property
    def weight(self) -> int:
        """Number of non-identity letters."""
        return sum(ch != "I" for ch in self.letters)

    def is_hermitian(self) -> bool:
        return self.phase in (0, 2)

    def __mul__(self, other: "PauliString") -> "PauliString":
        if not isinstance(other, PauliString):
            return NotImplemented
        if self.n != other.n:
            raise DomainError(f"Cannot multiply Pauli strings of length {self.n} and {other.n}")
        phase = self.phase + other.phase
        letters = []
        for a, b in zip(self.letters, other.letters):
            p, c = _PRODUCTS[(a, b)]
            phase += p
            letters.append(c)
        return PauliString("".join(letters), phase)

    def dagger(self) -> "PauliString":
        return PauliString(self.letters, -self.phase)

    def to_matrix(self) -> np.ndarray:
        """Dense ``2**n`` matrix (Kronecker product, qubit 0 most significant)."""
        if self.n == 0:
            return np.array([[self.coefficient]])
        return self.coefficient * reduce(np.kron, (_MATRICES[ch] for ch in self.letters))

    def apply(self, vector: np.ndarray) -> np.ndarray:
        """Act on a statevector without forming the full matrix."""
        vector = np.asarray(vector, dtype=complex)
        if vector.shape != (1 << self.n,):
            raise DomainError(f"Pauli string on {self.n} qubits cannot act on a vector of length {vector.size}")
        tensor = vector.reshape([2] * self.n)
        for q, ch in enumerate(self.letters):
            if ch == "I":
                continue
            tensor = np.moveaxis(np.tensordot(_MATRICES[ch], tensor, axes=([1], [q])), 0, q)
        return self.coefficient * tensor.reshape(-1)

    def act_on_basis(self, index: int) -> Tuple[complex, int]:
        """``P|index> = phase |new_index>``."""
        phase = self.phase
        out = index
        for q, ch in enumerate(self.letters):
            pos = self.n - 1 - q
            bit = (index >> pos) & 1
            if ch == "X":
                out ^= 1 << pos
            elif ch == "Y":
                out ^= 1 << pos
                phase += 1 if bit == 0 else 3
            elif ch == "Z" and bit:
                phase += 2
        return _PHASES[phase % 4], out


def majorana_x(orbital: int, n: int) -> PauliString:
    """``Z^{orbital} X I^{rest}``, the Jordan-Wigner image of ``c + c^``.

    Raises:
        DomainError: If ``orbital`` is outside ``0..n-1``
    """
    if not 0 <= orbital < n:
        raise DomainError(f"Orbital {orbital} out of range for {n} qubits")
    return PauliString("Z" * orbital + "X" + "I" * (n - orbital - 1))


def majorana_product(orbitals, n: int) -> PauliString:
    """Product ``X~_{o_0} X~_{o_1} ...`` in the given order."""
    return reduce(lambda acc, o: acc * majorana_x(o, n), orbitals, PauliString.identity(n))
