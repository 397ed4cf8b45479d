"""Exact diagonalization: ground states, time-domain Green's functions and Lehmann poles."""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg

from ..model.aim import (
    DEFAULT_MAX_BATH,
    AimParams,
    ReferenceState,
    build_hamiltonian,
    particle_sector_check,
    reference_state,
    spin_sector_check,
)
from ..model.fock import apply_operator, sector_indices
from ..model.series import GreensSeries, TimeGrid
from ..utils.exceptions import DomainError

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi


@dataclass
class EdSolution:
    """Ground-state eigenpair of a Hamiltonian."""

    e0: float
    gs: np.ndarray
    sector: Optional[int] = None
    eigenvalues: Optional[np.ndarray] = None
    degeneracy: int = 1

    def residual(self, matrix: np.ndarray) -> float:
        """``||H gs - e0 gs||``."""
        return float(np.linalg.norm(matrix @ self.gs - self.e0 * self.gs))

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            "e0": self.e0,
            "sector": self.sector,
            "degeneracy": self.degeneracy,
        }


@dataclass
class LehmannData:
    """Removal and addition poles of a diagonal Green's function."""

    removal: List[Tuple[float, float]] = field(default_factory=list)
    addition: List[Tuple[float, float]] = field(default_factory=list)

    @property
    def total_weight(self) -> float:
        return sum(w for _, w in self.removal) + sum(w for _, w in self.addition)

    @property
    def poles(self) -> List[Tuple[float, float]]:
        """All poles sorted by frequency."""
        return sorted(self.removal + self.addition)

    def greens(self, times: Sequence[float]) -> np.ndarray:
        """``G(t) = sum_n w_n exp(+i 2 pi w_n t)``."""
        times = np.asarray(times, dtype=float)
        result = np.zeros(times.shape, dtype=complex)
        for omega, weight in self.poles:
            result += weight * np.exp(1j * TWO_PI * omega * times)
        return result

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            "removal": [{"omega": o, "weight": w} for o, w in self.removal],
            "addition": [{"omega": o, "weight": w} for o, w in self.addition],
            "total_weight": self.total_weight,
        }


def _merge_poles(
    omegas: np.ndarray,
    weights: np.ndarray,
    tol: float = 1e-9,
    min_weight: float = 1e-14,
) -> List[Tuple[float, float]]:
    order = np.argsort(omegas, kind="stable")
    merged: List[Tuple[float, float]] = []
    group_omega, group_weight, start = None, 0.0, None
    for k in order:
        omega, weight = float(omegas[k]), float(weights[k])
        if start is not None and omega - start <= tol:
            group_weight += weight
            continue
        if group_omega is not None and abs(group_weight) > min_weight:
            merged.append((group_omega, group_weight))
        group_omega, group_weight, start = omega, weight, omega
    if group_omega is not None and abs(group_weight) > min_weight:
        merged.append((group_omega, group_weight))
    return merged


def _check_hermitian(matrix: np.ndarray, tol: float = 1e-10) -> None:
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DomainError(f"Expected a square matrix, got shape {matrix.shape}")
    scale = max(1.0, float(np.max(np.abs(matrix)))) if matrix.size else 1.0
    if np.max(np.abs(matrix - matrix.conj().T)) > tol * scale:
        raise DomainError("Matrix is not Hermitian")


def ground_state(
    matrix: np.ndarray,
    sector: Optional[int] = None,
    reference: Optional[np.ndarray] = None,
    degeneracy_tol: float = 1e-9,
    min_overlap: float = 1e-10,
    keep_spectrum: bool = False,
) -> EdSolution:
    """Lowest eigenpair, optionally restricted to a particle-number sector.

    Without a reference the lowest eigenvector is returned with its largest
    component made positive. With a reference vector the lowest degenerate
    cluster that overlaps the reference is selected, and the state is the
    normalized projection of the reference onto that cluster (the cluster
    member of largest overlap). Eigenstates orthogonal to the reference
    are skipped.

    Args:
        matrix: Hermitian matrix
        sector: Optional particle number; requires a ``2**n`` dimension
        reference: Optional Fock-space vector used for cluster selection
        degeneracy_tol: Eigenvalues closer than this form one cluster
        min_overlap: Smallest squared overlap accepted for a cluster
        keep_spectrum: Also return the sector eigenvalues

    Returns:
        EdSolution

    Raises:
        DomainError: If the matrix is not Hermitian or the reference has no
            weight in the sector
    """
    matrix = np.asarray(matrix)
    _check_hermitian(matrix)
    dim = matrix.shape[0]

    if sector is not None:
        n = dim.bit_length() - 1
        if 1 << n != dim:
            raise DomainError(f"Sector restriction needs a 2**n dimension, got {dim}")
        indices = sector_indices(n, sector)
        if indices.size == 0:
            raise DomainError(f"Sector N={sector} is empty for {n} qubits")
    else:
        indices = np.arange(dim)

    block = matrix[np.ix_(indices, indices)]
    eigenvalues, eigenvectors = linalg.eigh(block)

    if reference is None:
        vec = eigenvectors[:, 0].copy()
        pivot = np.argmax(np.abs(vec))
        vec *= np.conj(vec[pivot]) / abs(vec[pivot])
        e0 = float(eigenvalues[0])
        degeneracy = int(np.sum(eigenvalues - eigenvalues[0] <= degeneracy_tol))
    else:
        ref = np.asarray(reference)[indices]
        if np.linalg.norm(ref) == 0:
            raise DomainError("Reference vector has no weight in the requested sector")
        start = 0
        vec = None
        while start < eigenvalues.size:
            cluster = np.flatnonzero(np.abs(eigenvalues - eigenvalues[start]) <= degeneracy_tol)
            cluster = cluster[cluster >= start]
            overlaps = eigenvectors[:, cluster].conj().T @ ref
            if float(np.sum(np.abs(overlaps) ** 2)) > min_overlap:
                vec = eigenvectors[:, cluster] @ overlaps
                vec /= np.linalg.norm(vec)
                break
            start = int(cluster[-1]) + 1
        if vec is None:
            raise DomainError("Reference vector is orthogonal to every eigenstate of the sector")
        if start > 0:
            logger.info(
                f"Skipped {start} eigenstate(s) orthogonal to the reference; "
                f"selected E={eigenvalues[start]:.10f} instead of {eigenvalues[0]:.10f}"
            )
        e0 = float(eigenvalues[start])
        degeneracy = int(cluster.size)

    gs = np.zeros(dim, dtype=vec.dtype)
    gs[indices] = vec
    return EdSolution(
        e0=e0,
        gs=gs,
        sector=sector,
        eigenvalues=eigenvalues if keep_spectrum else None,
        degeneracy=degeneracy,
    )


class ExactDiagonalizationSolver:
    """Exact reference for one set of model parameters.

    Eigensystems are computed per particle-number sector on demand and cached.
    """

    def __init__(
        self,
        params: AimParams,
        reference: Optional[ReferenceState] = None,
        max_bath: int = DEFAULT_MAX_BATH,
        energy_shift: float = 0.0,
    ):
        """Initialize the solver.

        Args:
            params: Model parameters
            reference: Reference determinant selecting the ground-state sector
            max_bath: Bath-size cap passed to the Hamiltonian builder
            energy_shift: Constant added to the Hamiltonian

        Raises:
            DomainError: If the Hamiltonian mixes particle-number or S_z sectors
        """
        self.params = params
        self.reference = reference or reference_state(params)
        self.terms, matrix = build_hamiltonian(params, max_bath)
        if not (particle_sector_check(matrix, params.n_qubits) and spin_sector_check(matrix, params.n_bath)):
            raise DomainError("Hamiltonian does not conserve particle number and S_z")
        self.matrix = matrix + energy_shift * np.eye(matrix.shape[0])
        self.n_qubits = params.n_qubits
        self._sectors: Dict[int, Tuple[np.ndarray, np.ndarray, np.ndarray]] = {}
        self._ground: Optional[EdSolution] = None

    def ground_state(self) -> EdSolution:
        """Reference-connected ground state in the reference's sector."""
        if self._ground is None:
            self._ground = ground_state(
                self.matrix,
                sector=self.reference.n_electrons,
                reference=self.reference.vector(),
            )
            logger.info(
                f"ED ground state: E0={self._ground.e0:.12f} "
                f"(N={self.reference.n_electrons}, reference {self.reference.label})"
            )
        return self._ground

    def sector_eigensystem(self, n_electrons: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(eigenvalues, eigenvectors, basis indices) of one particle sector."""
        if n_electrons not in self._sectors:
            indices = sector_indices(self.n_qubits, n_electrons)
            block = self.matrix[np.ix_(indices, indices)]
            eigenvalues, eigenvectors = linalg.eigh(block)
            self._sectors[n_electrons] = (eigenvalues, eigenvectors, indices)
        return self._sectors[n_electrons]

    def _check_orbital(self, orbital: int) -> None:
        if not 0 <= orbital < self.n_qubits:
            raise DomainError(f"Spin-orbital {orbital} out of range 0..{self.n_qubits - 1}")

    def _amplitudes(self, vector: np.ndarray, n_electrons: int) -> Tuple[np.ndarray, np.ndarray]:
        eigenvalues, eigenvectors, indices = self.sector_eigensystem(n_electrons)
        return eigenvalues, eigenvectors.conj().T @ vector[indices]

    def _part(self, ket_op, bra_op, n_electrons: int):
        gs = self.ground_state().gs
        if not 0 <= n_electrons <= self.n_qubits:
            empty = np.zeros(0)
            return empty, empty.astype(complex)
        ket = apply_operator(gs, [ket_op], self.n_qubits)
        bra = apply_operator(gs, [bra_op], self.n_qubits)
        energies, ket_amp = self._amplitudes(ket, n_electrons)
        _, bra_amp = self._amplitudes(bra, n_electrons)
        return energies, np.conj(bra_amp) * ket_amp

    def greens(self, p: int, q: int, grid: Union[TimeGrid, Sequence[float]]) -> GreensSeries:
        """Exact lesser and greater Green's functions on a time grid.

        Args:
            p: Spin-orbital removed in the lesser part
            q: Spin-orbital added in the greater part
            grid: TimeGrid or explicit times

        Returns:
            GreensSeries
        """
        self._check_orbital(p)
        self._check_orbital(q)
        times = grid.times if isinstance(grid, TimeGrid) else np.asarray(grid, dtype=float)
        e0 = self.ground_state().e0
        n = self.reference.n_electrons

        # <GS| c_q^ e^{-i2pi(H-E0)t} c_p |GS>
        energies, weights = self._part((p, False), (q, False), n - 1)
        lesser = np.exp(-1j * TWO_PI * np.outer(times, energies - e0)) @ weights

        # <GS| c_p e^{+i2pi(H-E0)t} c_q^ |GS>
        energies, weights = self._part((q, True), (p, True), n + 1)
        greater = np.exp(1j * TWO_PI * np.outer(times, energies - e0)) @ weights

        return GreensSeries(
            times=times,
            lesser=lesser,
            greater=greater,
            provenance={"source": "ed", "p": p, "q": q, "e0": e0},
        )

    def lehmann(self, p: int, pole_tol: float = 1e-9) -> LehmannData:
        """Pole positions and weights of the diagonal function ``G_pp``."""
        self._check_orbital(p)
        e0 = self.ground_state().e0
        n = self.reference.n_electrons

        energies, weights = self._part((p, False), (p, False), n - 1)
        removal = _merge_poles(e0 - energies, weights.real, pole_tol)
        energies, weights = self._part((p, True), (p, True), n + 1)
        addition = _merge_poles(energies - e0, weights.real, pole_tol)

        data = LehmannData(removal=removal, addition=addition)
        logger.debug(
            f"Lehmann p={p}: {len(removal)} removal and {len(addition)} addition poles, "
            f"total weight {data.total_weight:.12f}"
        )
        return data


def exact_greens(
    params: AimParams,
    p: int,
    q: int,
    grid: Union[TimeGrid, Sequence[float]],
    reference: Optional[ReferenceState] = None,
) -> GreensSeries:
    """Exact time-domain Green's function (see :meth:`ExactDiagonalizationSolver.greens`)."""
    return ExactDiagonalizationSolver(params, reference).greens(p, q, grid)


def lehmann_spectrum(
    params: AimParams,
    p: int,
    reference: Optional[ReferenceState] = None,
) -> LehmannData:
    """Lehmann poles of ``G_pp`` (see :meth:`ExactDiagonalizationSolver.lehmann`)."""
    return ExactDiagonalizationSolver(params, reference).lehmann(p)
