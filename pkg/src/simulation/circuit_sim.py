"""Statevector emulation: Pauli gates, controlled operations and time evolution.

Propagators follow ``U(t) = exp(i * sign * 2pi * (H - E_CC) * t)`` with
``sign = -1`` for the lesser part and ``+1`` for the greater part.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Union

import numpy as np
from scipy import linalg

from ..mapping.pauli import PauliString
from ..model.aim import (
    AimParams,
    build_hamiltonian,
    hopping_matrix,
    interaction_diagonal,
    potential_diagonal,
    quadratic_matrix,
)
from ..model.fock import basis_index
from ..utils.exceptions import DomainError

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi


class EvolutionMode(str, Enum):
    """Propagator implementation."""

    EXACT = "exact"
    TROTTER = "trotter"


class TrotterSplit(str, Enum):
    """Which terms form the diagonal outer layer of the second-order step."""

    POTENTIAL = "potential"
    INTERACTION = "interaction"


def split_layers(params: AimParams, split: Union[TrotterSplit, str] = TrotterSplit.POTENTIAL):
    """(diagonal of the outer layer, dense inner layer) for a Trotter split.

    ``potential`` puts on-site energies and ``U_c`` outside and the
    hybridization inside; ``interaction`` keeps only ``U_c`` outside and the
    whole one-body part inside.
    """
    if TrotterSplit(split) == TrotterSplit.POTENTIAL:
        return potential_diagonal(params), hopping_matrix(params)
    return interaction_diagonal(params), quadratic_matrix(params)


@dataclass
class StateVector:
    """Amplitudes of an ``n``-qubit register."""

    amplitudes: np.ndarray
    n: int

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (1 << self.n,):
            raise DomainError(f"Expected {1 << self.n} amplitudes for {self.n} qubits, got {self.amplitudes.shape}")

    @classmethod
    def basis(cls, bits: Union[int, Sequence[int]], n: int) -> "StateVector":
        """Computational basis state from an index or occupation list."""
        index = bits if isinstance(bits, (int, np.integer)) else basis_index(bits)
        amplitudes = np.zeros(1 << n, dtype=complex)
        amplitudes[index] = 1.0
        return cls(amplitudes, n)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def inner(self, other: "StateVector") -> complex:
        """``<self|other>``."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes.copy(), self.n)


@dataclass
class EvolutionConfig:
    """Settings for one propagator application."""

    t: float
    r: int = 1
    sign: int = -1
    e_cc: float = 0.0
    mode: EvolutionMode = EvolutionMode.EXACT

    def __post_init__(self):
        self.mode = EvolutionMode(self.mode)
        if not math.isfinite(self.t):
            raise DomainError(f"Evolution time must be finite, got {self.t}")
        if int(self.r) != self.r or self.r < 1:
            raise DomainError(f"Trotter steps must be a positive integer, got {self.r}")
        if self.sign not in (-1, 1):
            raise DomainError(f"Exponent sign must be +1 or -1, got {self.sign}")


def _vector(state: Union[StateVector, np.ndarray]) -> np.ndarray:
    return state.amplitudes if isinstance(state, StateVector) else np.asarray(state, dtype=complex)


def apply_pauli(state: Union[StateVector, np.ndarray], pauli: PauliString) -> StateVector:
    """Apply a Pauli string.

    Raises:
        DomainError: If the register sizes differ
    """
    vector = _vector(state)
    n = pauli.n
    if vector.shape != (1 << n,):
        raise DomainError(f"Pauli string on {n} qubits does not match a state of length {vector.size}")
    return StateVector(pauli.apply(vector), n)


class ExactEvolution:
    """Propagator from the eigendecomposition of a Hermitian matrix."""

    def __init__(self, hamiltonian: np.ndarray):
        self.eigenvalues, self.eigenvectors = linalg.eigh(hamiltonian)

    def phases(self, t: float, sign: int, e_cc: float = 0.0) -> np.ndarray:
        return np.exp(1j * sign * TWO_PI * (self.eigenvalues - e_cc) * t)

    def unitary(self, t: float, sign: int = -1, e_cc: float = 0.0) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.phases(t, sign, e_cc)) @ v.conj().T

    def evolve(self, vector: np.ndarray, t: float, sign: int = -1, e_cc: float = 0.0) -> np.ndarray:
        v = self.eigenvectors
        return v @ (self.phases(t, sign, e_cc) * (v.conj().T @ vector))

    def expectation_series(
        self,
        bra: np.ndarray,
        ket: np.ndarray,
        times: np.ndarray,
        sign: int = -1,
        e_cc: float = 0.0,
    ) -> np.ndarray:
        """``<bra| U(t) |ket>`` for every time at once."""
        v = self.eigenvectors
        weights = np.conj(v.conj().T @ bra) * (v.conj().T @ ket)
        exponent = 1j * sign * TWO_PI * np.outer(np.asarray(times, dtype=float), self.eigenvalues - e_cc)
        return np.exp(exponent) @ weights


class TrotterEvolution:
    """Second-order split ``D(tau/2) K(tau) D(tau/2)`` of the impurity model.

    ``D`` is a diagonal layer and ``K`` the remaining terms, exponentiated
    exactly from its eigensystem (see :func:`split_layers`).
    """

    def __init__(self, params: AimParams, r: int = 1, split: Union[TrotterSplit, str] = TrotterSplit.POTENTIAL):
        if int(r) != r or r < 1:
            raise DomainError(f"Trotter steps must be a positive integer, got {r}")
        self.params = params
        self.r = int(r)
        self.split = TrotterSplit(split)
        self.potential, inner = split_layers(params, self.split)
        self.hop_eigenvalues, self.hop_eigenvectors = linalg.eigh(inner)

    def _half_potential(self, tau: float, sign: int) -> np.ndarray:
        return np.exp(1j * sign * TWO_PI * self.potential * tau / 2.0)

    def _hop(self, tau: float, sign: int) -> np.ndarray:
        v = self.hop_eigenvectors
        return (v * np.exp(1j * sign * TWO_PI * self.hop_eigenvalues * tau)) @ v.conj().T

    def step_unitary(self, dt: float, sign: int = -1) -> np.ndarray:
        """``S(dt/r)^r`` without the energy-offset phase."""
        tau = dt / self.r
        half = self._half_potential(tau, sign)
        step = half[:, None] * self._hop(tau, sign) * half[None, :]
        return np.linalg.matrix_power(step, self.r)

    def unitary(self, t: float, sign: int = -1, e_cc: float = 0.0) -> np.ndarray:
        return np.exp(-1j * sign * TWO_PI * e_cc * t) * self.step_unitary(t, sign)

    def evolve(self, vector: np.ndarray, t: float, sign: int = -1, e_cc: float = 0.0) -> np.ndarray:
        """Apply ``r`` symmetric steps of length ``t/r`` to a vector."""
        tau = t / self.r
        half = self._half_potential(tau, sign)
        v = self.hop_eigenvectors
        hop_phase = np.exp(1j * sign * TWO_PI * self.hop_eigenvalues * tau)
        out = np.asarray(vector, dtype=complex)
        for _ in range(self.r):
            out = half * out
            out = v @ (hop_phase * (v.conj().T @ out))
            out = half * out
        return np.exp(-1j * sign * TWO_PI * e_cc * t) * out


def trotter_evolve(state: Union[StateVector, np.ndarray], params: AimParams, cfg: EvolutionConfig) -> StateVector:
    """Evolve a state with ``cfg.r`` second-order Trotter steps.

    Raises:
        DomainError: If ``cfg.mode`` is not trotter or the sizes differ
    """
    if cfg.mode != EvolutionMode.TROTTER:
        raise DomainError(f"trotter_evolve needs mode 'trotter', got {cfg.mode.value!r}")
    vector = _vector(state)
    if vector.shape != (params.dim,):
        raise DomainError(f"State of length {vector.size} does not match dimension {params.dim}")
    evolution = TrotterEvolution(params, cfg.r)
    return StateVector(evolution.evolve(vector, cfg.t, cfg.sign, cfg.e_cc), params.n_qubits)


def exact_propagator(params: AimParams, cfg: EvolutionConfig) -> np.ndarray:
    """Dense ``exp(i sign 2pi (H - E_CC) t)`` from the eigendecomposition of H."""
    _, hamiltonian = build_hamiltonian(params)
    return ExactEvolution(hamiltonian).unitary(cfg.t, cfg.sign, cfg.e_cc)


def _embed(matrix: np.ndarray, qubits: Sequence[int], n_total: int) -> np.ndarray:
    """Place an operator on ``qubits`` (in the order given) of an ``n_total`` register."""
    rest = [q for q in range(n_total) if q not in qubits]
    full = np.kron(matrix, np.eye(1 << len(rest)))
    order = list(qubits) + rest
    inverse = list(np.argsort(order))
    tensor = full.reshape([2] * (2 * n_total))
    tensor = tensor.transpose(inverse + [n_total + k for k in inverse])
    return tensor.reshape(1 << n_total, 1 << n_total)


def controlled(
    operation: Union[PauliString, np.ndarray],
    control: int = 0,
    targets: Optional[Sequence[int]] = None,
    n_total: Optional[int] = None,
) -> np.ndarray:
    """Matrix of ``|0><0| (x) I + |1><1| (x) operation`` on an extended register.

    Args:
        operation: Pauli string or square unitary on ``len(targets)`` qubits
        control: Control qubit index in the extended register
        targets: Target qubits (default: every qubit except the control, ascending)
        n_total: Size of the extended register (default: targets + 1)

    Returns:
        Dense matrix on ``n_total`` qubits

    Raises:
        DomainError: If the control clashes with a target or indices are out of range
    """
    matrix = operation.to_matrix() if isinstance(operation, PauliString) else np.asarray(operation, dtype=complex)
    n_target = int(round(math.log2(matrix.shape[0])))
    if matrix.shape != (1 << n_target, 1 << n_target):
        raise DomainError(f"Operation must be a square 2**n matrix, got shape {matrix.shape}")

    if n_total is None:
        n_total = n_target + 1
    if targets is None:
        targets = [q for q in range(n_total) if q != control][:n_target]
    targets = list(targets)
    if len(targets) != n_target:
        raise DomainError(f"Operation acts on {n_target} qubits but {len(targets)} targets were given")
    if control in targets:
        raise DomainError(f"Control qubit {control} is also a target")
    if any(not 0 <= q < n_total for q in targets + [control]):
        raise DomainError(f"Qubit index out of range for a {n_total}-qubit register")

    dim = 1 << n_target
    block = np.zeros((2 * dim, 2 * dim), dtype=complex)
    block[:dim, :dim] = np.eye(dim)
    block[dim:, dim:] = matrix
    return _embed(block, [control] + targets, n_total)
