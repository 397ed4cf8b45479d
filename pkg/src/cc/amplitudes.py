"""Excitation manifolds and coupled-cluster amplitude containers."""

import logging
from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..model.aim import ReferenceState, impurity_qubits, qubit_spin
from ..model.fock import LadderOp
from ..utils.exceptions import DomainError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class Excitation:
    """Excitation operator moving electrons from ``holes`` to ``particles``.

    Singles are ``c_a^ c_i``; doubles are ``c_a^ c_b^ c_j c_i`` with
    ``i < j`` and ``a < b``, so a product of two singles equals the double
    with the same indices.
    """

    rank: int
    holes: Tuple[int, ...]
    particles: Tuple[int, ...]

    @property
    def operators(self) -> Tuple[LadderOp, ...]:
        """Ladder-operator product, leftmost operator applied last."""
        creators = tuple((a, True) for a in self.particles)
        annihilators = tuple((i, False) for i in reversed(self.holes))
        return creators + annihilators

    @property
    def orbitals(self) -> Tuple[int, ...]:
        return self.holes + self.particles

    @property
    def label(self) -> str:
        return f"{','.join(map(str, self.holes))}->{','.join(map(str, self.particles))}"


def enumerate_excitations(ref: ReferenceState, level: int) -> List[Excitation]:
    """Spin-conserving singles (and doubles for ``level == 2``) of a reference.

    Raises:
        DomainError: If ``level`` is not 1 or 2
    """
    if level not in (1, 2):
        raise DomainError(f"Truncation level must be 1 or 2, got {level}")

    def spin_of(q: int):
        return qubit_spin(q, ref.n_bath)

    excitations = [
        Excitation(1, (i,), (a,))
        for i in ref.occupied
        for a in ref.virtual
        if spin_of(i) == spin_of(a)
    ]
    if level == 2:
        for holes in combinations(ref.occupied, 2):
            for particles in combinations(ref.virtual, 2):
                if sorted(map(spin_of, holes)) == sorted(map(spin_of, particles)):
                    excitations.append(Excitation(2, holes, particles))
    return excitations


def _canonical_sign(first: int, second: int) -> Tuple[int, int, int]:
    if first == second:
        return 0, first, second
    if first < second:
        return 1, first, second
    return -1, second, first


@dataclass
class CCAmplitudes:
    """Converged (or in-progress) cluster and de-excitation amplitudes.

    ``t`` and ``lam`` are aligned with ``excitations``; the dictionary views
    and accessors expose the usual index maps with antisymmetry applied.
    """

    reference: ReferenceState
    level: int
    excitations: List[Excitation]
    t: np.ndarray
    e_ref: float
    lam: Optional[np.ndarray] = None
    e_cc: Optional[float] = None
    residual_norm: float = float("inf")
    lambda_residual_norm: Optional[float] = None
    tol: float = 1e-10
    iterations: int = 0
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        if self.t.shape != (len(self.excitations),):
            raise DomainError("Amplitude vector does not match the excitation list")
        if self.lam is not None:
            self.lam = np.asarray(self.lam, dtype=float)
        self._index = {exc: k for k, exc in enumerate(self.excitations)}

    @property
    def converged(self) -> bool:
        return bool(np.isfinite(self.residual_norm) and self.residual_norm <= self.tol)

    @property
    def has_lambda(self) -> bool:
        return self.lam is not None

    @property
    def e_corr(self) -> Optional[float]:
        return None if self.e_cc is None else self.e_cc - self.e_ref

    def _lookup(self, values: Optional[np.ndarray], holes, particles) -> float:
        if values is None:
            return 0.0
        if len(holes) == 1:
            k = self._index.get(Excitation(1, tuple(holes), tuple(particles)))
            return 0.0 if k is None else float(values[k])
        s1, i, j = _canonical_sign(*holes)
        s2, a, b = _canonical_sign(*particles)
        if s1 == 0 or s2 == 0:
            return 0.0
        k = self._index.get(Excitation(2, (i, j), (a, b)))
        return 0.0 if k is None else float(s1 * s2 * values[k])

    def t_single(self, i: int, a: int) -> float:
        return self._lookup(self.t, (i,), (a,))

    def t_double(self, i: int, j: int, a: int, b: int) -> float:
        """``t_ij^ab`` with antisymmetry under ``i<->j`` and ``a<->b``."""
        return self._lookup(self.t, (i, j), (a, b))

    def lam_single(self, i: int, a: int) -> float:
        return self._lookup(self.lam, (i,), (a,))

    def lam_double(self, i: int, j: int, a: int, b: int) -> float:
        return self._lookup(self.lam, (i, j), (a, b))

    def _as_map(self, values: Optional[np.ndarray], rank: int) -> Dict[Tuple[int, ...], float]:
        if values is None:
            return {}
        return {
            exc.orbitals: float(values[k])
            for k, exc in enumerate(self.excitations)
            if exc.rank == rank
        }

    @property
    def t1(self) -> Dict[Tuple[int, ...], float]:
        """``(i, a) -> t_i^a``."""
        return self._as_map(self.t, 1)

    @property
    def t2(self) -> Dict[Tuple[int, ...], float]:
        """``(i, j, a, b) -> t_ij^ab`` for ``i<j``, ``a<b``."""
        return self._as_map(self.t, 2)

    @property
    def lam1(self) -> Dict[Tuple[int, ...], float]:
        return self._as_map(self.lam, 1)

    @property
    def lam2(self) -> Dict[Tuple[int, ...], float]:
        return self._as_map(self.lam, 2)

    def impurity_singles(self) -> List[int]:
        """Positions of singles that move an electron into or out of the impurity."""
        impurity = set(impurity_qubits(self.reference.n_bath))
        return [
            k for k, exc in enumerate(self.excitations)
            if exc.rank == 1 and impurity.intersection(exc.orbitals)
        ]

    def impurity_singles_only(self) -> "CCAmplitudes":
        """Copy keeping only impurity singles in both ``t`` and ``lam``."""
        keep = self.impurity_singles()
        truncated = replace(
            self,
            level=1,
            excitations=[self.excitations[k] for k in keep],
            t=self.t[keep],
            lam=None if self.lam is None else self.lam[keep],
            metadata={**self.metadata, "truncation": "impurity-singles"},
        )
        logger.debug(f"Kept {len(keep)} of {len(self.excitations)} amplitudes for impurity-singles mode")
        return truncated

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""

        def entries(values):
            if values is None:
                return None
            return [
                {"holes": list(exc.holes), "particles": list(exc.particles), "value": float(values[k])}
                for k, exc in enumerate(self.excitations)
            ]

        return {
            "reference": self.reference.bitstring,
            "level": self.level,
            "e_ref": self.e_ref,
            "e_cc": self.e_cc,
            "e_corr": self.e_corr,
            "residual_norm": self.residual_norm,
            "lambda_residual_norm": self.lambda_residual_norm,
            "converged": self.converged,
            "iterations": self.iterations,
            "t": entries(self.t),
            "lambda": entries(self.lam),
        }
