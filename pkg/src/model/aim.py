"""Anderson impurity model: parameters, Hamiltonian terms and reference states."""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..utils.exceptions import DomainError, ResourceLimitError
from ..utils.helpers import parse_bitstring
from .fock import LadderOp, basis_index, number_diagonal, operator_matrix, sz_diagonal

logger = logging.getLogger(__name__)

DEFAULT_MAX_BATH = 6


class Spin(str, Enum):
    """Electron spin projection."""

    DOWN = "down"
    UP = "up"


@dataclass(frozen=True)
class AimParams:
    """Impurity model parameters.

    ``eps[0]`` is the impurity level and ``eps[i]`` (i >= 1) bath level i;
    ``v[i - 1]`` couples the impurity to bath level i.
    """

    n_bath: int
    u_c: float
    eps: Tuple[float, ...]
    v: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "eps", tuple(float(e) for e in self.eps))
        object.__setattr__(self, "v", tuple(float(x) for x in self.v))
        object.__setattr__(self, "u_c", float(self.u_c))

        if int(self.n_bath) != self.n_bath or self.n_bath < 0:
            raise DomainError(f"n_bath must be a non-negative integer, got {self.n_bath}")
        if len(self.eps) != self.n_bath + 1:
            raise DomainError(f"Expected {self.n_bath + 1} on-site energies, got {len(self.eps)}")
        if len(self.v) != self.n_bath:
            raise DomainError(f"Expected {self.n_bath} hybridizations, got {len(self.v)}")
        values = (self.u_c,) + self.eps + self.v
        if not all(math.isfinite(x) for x in values):
            raise DomainError("All model parameters must be finite")

    @property
    def n_qubits(self) -> int:
        """Number of spin-orbitals (qubits)."""
        return 2 * (self.n_bath + 1)

    @property
    def dim(self) -> int:
        """Fock-space dimension."""
        return 1 << self.n_qubits

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "AimParams":
        """Create parameters from a config mapping."""
        eps = list(data["eps"])
        v = list(data.get("v") or [])
        n_bath = data.get("n_bath")
        if n_bath is None:
            n_bath = len(eps) - 1
        return cls(n_bath=int(n_bath), u_c=data["u_c"], eps=tuple(eps), v=tuple(v))

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            "n_bath": self.n_bath,
            "u_c": self.u_c,
            "eps": list(self.eps),
            "v": list(self.v),
        }


def jw_qubit_index(level: int, spin: Spin, n_bath: int) -> int:
    """Qubit holding spin-orbital (level, spin).

    Down spins occupy qubits ``0..n_bath``, up spins ``n_bath+1..2n_bath+1``,
    impurity first in each block.

    Raises:
        DomainError: If ``level`` is outside ``0..n_bath``
    """
    if not 0 <= level <= n_bath:
        raise DomainError(f"Level {level} out of range 0..{n_bath}")
    spin = Spin(spin)
    return level if spin == Spin.DOWN else n_bath + 1 + level


def qubit_level(qubit: int, n_bath: int) -> int:
    """Level (0 = impurity) of a qubit."""
    return qubit % (n_bath + 1)


def qubit_spin(qubit: int, n_bath: int) -> Spin:
    """Spin of a qubit."""
    return Spin.UP if qubit > n_bath else Spin.DOWN


def impurity_qubits(n_bath: int) -> Tuple[int, int]:
    """Impurity (down, up) qubits."""
    return jw_qubit_index(0, Spin.DOWN, n_bath), jw_qubit_index(0, Spin.UP, n_bath)


@dataclass(frozen=True)
class FermionTerm:
    """A coefficient times an ordered product of ladder operators."""

    coefficient: float
    operators: Tuple[LadderOp, ...]

    def __post_init__(self):
        object.__setattr__(self, "operators", tuple((int(m), bool(d)) for m, d in self.operators))

    def adjoint(self) -> "FermionTerm":
        """Hermitian conjugate (coefficients are real)."""
        return FermionTerm(self.coefficient, tuple((m, not d) for m, d in reversed(self.operators)))

    def label(self) -> str:
        """Readable form such as ``4 c2^ c2``."""
        ops = " ".join(f"c{m}^" if d else f"c{m}" for m, d in self.operators)
        return f"{self.coefficient:g} {ops}".strip()

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            "coefficient": self.coefficient,
            "operators": [[m, d] for m, d in self.operators],
        }


def normal_order(term: FermionTerm) -> List[FermionTerm]:
    """Rewrite a term as a sum of normal-ordered terms.

    Creators come first in ascending mode order, annihilators follow in
    descending order. Swaps use the canonical anticommutation relations.
    """
    ops = list(term.operators)
    c = term.coefficient
    for k in range(len(ops) - 1):
        (i, di), (j, dj) = ops[k], ops[k + 1]
        swapped = ops[:k] + [ops[k + 1], ops[k]] + ops[k + 2:]
        if not di and dj:
            result = normal_order(FermionTerm(-c, tuple(swapped)))
            if i == j:
                result.extend(normal_order(FermionTerm(c, tuple(ops[:k] + ops[k + 2:]))))
            return result
        if di == dj:
            if i == j:
                return []
            if (di and i > j) or (not di and i < j):
                return normal_order(FermionTerm(-c, tuple(swapped)))
    return [term] if c != 0 else []


def canonical_form(terms: Sequence[FermionTerm], tol: float = 1e-12) -> Dict[Tuple[LadderOp, ...], float]:
    """Normal-ordered operator strings mapped to summed coefficients."""
    combined: Dict[Tuple[LadderOp, ...], float] = {}
    for term in terms:
        for ordered in normal_order(term):
            combined[ordered.operators] = combined.get(ordered.operators, 0.0) + ordered.coefficient
    return {ops: c for ops, c in combined.items() if abs(c) > tol}


def is_hermitian(terms: Sequence[FermionTerm], tol: float = 1e-12) -> bool:
    """Whether a term list equals its adjoint after normal ordering."""
    forward = canonical_form(terms, tol)
    backward = canonical_form([t.adjoint() for t in terms], tol)
    if forward.keys() != backward.keys():
        return False
    return all(abs(forward[k] - backward[k]) <= tol for k in forward)


def _onsite_terms(params: AimParams) -> List[FermionTerm]:
    terms = []
    for spin in (Spin.DOWN, Spin.UP):
        for level, eps in enumerate(params.eps):
            q = jw_qubit_index(level, spin, params.n_bath)
            terms.append(FermionTerm(eps, ((q, True), (q, False))))
    return terms


def _interaction_terms(params: AimParams) -> List[FermionTerm]:
    dn, up = impurity_qubits(params.n_bath)
    return [FermionTerm(params.u_c, ((up, True), (up, False), (dn, True), (dn, False)))]


def _hopping_terms(params: AimParams) -> List[FermionTerm]:
    terms = []
    for spin in (Spin.DOWN, Spin.UP):
        imp = jw_qubit_index(0, spin, params.n_bath)
        for level, v in enumerate(params.v, start=1):
            bath = jw_qubit_index(level, spin, params.n_bath)
            terms.append(FermionTerm(v, ((imp, True), (bath, False))))
            terms.append(FermionTerm(v, ((bath, True), (imp, False))))
    return terms


def _prune(terms: List[FermionTerm]) -> List[FermionTerm]:
    return [t for t in terms if t.coefficient != 0.0]


def check_size(params: AimParams, max_bath: int = DEFAULT_MAX_BATH) -> None:
    """Raise ResourceLimitError when the model exceeds the bath cap."""
    if params.n_bath > max_bath:
        raise ResourceLimitError(
            f"n_bath={params.n_bath} exceeds the configured cap of {max_bath} "
            f"(Fock dimension 2^{params.n_qubits})"
        )


def hamiltonian_terms(params: AimParams) -> List[FermionTerm]:
    """On-site, interaction and hopping terms with zero coefficients removed."""
    return _prune(_onsite_terms(params) + _interaction_terms(params) + _hopping_terms(params))


def potential_terms(params: AimParams) -> List[FermionTerm]:
    """Diagonal part of the Hamiltonian: on-site energies and ``U_c``."""
    return _prune(_onsite_terms(params) + _interaction_terms(params))


def hopping_terms(params: AimParams) -> List[FermionTerm]:
    """Impurity-bath hybridization terms."""
    return _prune(_hopping_terms(params))


def terms_matrix(terms: Sequence[FermionTerm], n: int) -> np.ndarray:
    """Dense matrix of a term list on ``n`` qubits."""
    matrix = np.zeros((1 << n, 1 << n))
    for term in terms:
        matrix += operator_matrix(term.operators, n, term.coefficient)
    return matrix


def build_hamiltonian(
    params: AimParams,
    max_bath: int = DEFAULT_MAX_BATH,
) -> Tuple[List[FermionTerm], np.ndarray]:
    """Assemble the Hamiltonian as a term list and a dense matrix.

    Args:
        params: Model parameters
        max_bath: Largest accepted bath size

    Returns:
        Tuple of (term list, real symmetric matrix)

    Raises:
        ResourceLimitError: If ``params.n_bath`` exceeds ``max_bath``
    """
    check_size(params, max_bath)
    terms = hamiltonian_terms(params)
    matrix = terms_matrix(terms, params.n_qubits)
    logger.debug(f"Built Hamiltonian: {len(terms)} terms, dimension {matrix.shape[0]}")
    return terms, matrix


def one_body_matrix(params: AimParams) -> np.ndarray:
    """Single-particle Hamiltonian over levels (impurity first), identical for both spins."""
    h = np.diag(np.asarray(params.eps, dtype=float))
    h[0, 1:] = params.v
    h[1:, 0] = params.v
    return h


def potential_diagonal(params: AimParams) -> np.ndarray:
    """Diagonal of the on-site plus interaction part of the Hamiltonian."""
    return np.diag(terms_matrix(potential_terms(params), params.n_qubits)).copy()


def hopping_matrix(params: AimParams) -> np.ndarray:
    """Dense matrix of the hybridization part of the Hamiltonian."""
    return terms_matrix(hopping_terms(params), params.n_qubits)


def interaction_diagonal(params: AimParams) -> np.ndarray:
    """Diagonal of the ``U_c`` term alone."""
    return np.diag(terms_matrix(_prune(_interaction_terms(params)), params.n_qubits)).copy()


def quadratic_matrix(params: AimParams) -> np.ndarray:
    """Dense matrix of the one-body part: on-site energies plus hybridization."""
    return terms_matrix(_prune(_onsite_terms(params) + _hopping_terms(params)), params.n_qubits)


@dataclass(frozen=True)
class ReferenceState:
    """A single determinant |Phi> with its occupied/virtual partition."""

    occupation: Tuple[int, ...]
    n_bath: int
    occupied: Tuple[int, ...] = field(init=False)
    virtual: Tuple[int, ...] = field(init=False)

    def __post_init__(self):
        occupation = tuple(int(b) for b in self.occupation)
        if len(occupation) != 2 * (self.n_bath + 1):
            raise DomainError(
                f"Occupation has {len(occupation)} entries, expected {2 * (self.n_bath + 1)}"
            )
        if any(b not in (0, 1) for b in occupation):
            raise DomainError("Occupation entries must be 0 or 1")
        object.__setattr__(self, "occupation", occupation)
        object.__setattr__(self, "occupied", tuple(q for q, b in enumerate(occupation) if b))
        object.__setattr__(self, "virtual", tuple(q for q, b in enumerate(occupation) if not b))

    @property
    def n_qubits(self) -> int:
        return len(self.occupation)

    @property
    def n_electrons(self) -> int:
        return len(self.occupied)

    @property
    def index(self) -> int:
        """Basis index of |Phi>."""
        return basis_index(self.occupation)

    @property
    def bitstring(self) -> str:
        return "".join(str(b) for b in self.occupation)

    @property
    def label(self) -> str:
        return f"|{self.bitstring}>"

    def is_occupied(self, qubit: int) -> bool:
        return bool(self.occupation[qubit])

    def vector(self) -> np.ndarray:
        """|Phi> as a Fock-space unit vector."""
        vec = np.zeros(1 << self.n_qubits)
        vec[self.index] = 1.0
        return vec

    def occupied_impurity(self) -> int:
        """Occupied impurity qubit, preferring spin down when both are filled.

        Raises:
            DomainError: If the impurity is empty in |Phi>
        """
        for q in impurity_qubits(self.n_bath):
            if self.is_occupied(q):
                return q
        raise DomainError(f"Impurity is empty in reference {self.label}")

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            "occupation": self.bitstring,
            "occupied": list(self.occupied),
            "virtual": list(self.virtual),
            "n_electrons": self.n_electrons,
        }


def reference_state(
    params: AimParams,
    n_electrons: Optional[int] = None,
    occupation: Optional[str] = None,
) -> ReferenceState:
    """Build the product reference state.

    By default ``n_bath + 1`` electrons are placed: one on the impurity and
    the rest on bath levels in order of increasing energy, down before up.
    The impurity electron takes the spin with fewer bath electrons (down on
    a tie). Surplus electrons doubly occupy the impurity.

    Args:
        params: Model parameters
        n_electrons: Electron count (default ``n_bath + 1``)
        occupation: Explicit occupation string, qubit 0 first; overrides the rule

    Returns:
        ReferenceState

    Raises:
        DomainError: If the filling exceeds the orbital count
    """
    n = params.n_qubits
    if occupation is not None:
        try:
            bits = parse_bitstring(occupation)
        except ValueError as e:
            raise DomainError(str(e)) from e
        ref = ReferenceState(tuple(bits), params.n_bath)
        if n_electrons is not None and ref.n_electrons != n_electrons:
            raise DomainError(f"Occupation {occupation} holds {ref.n_electrons} electrons, not {n_electrons}")
        return ref

    if n_electrons is None:
        n_electrons = params.n_bath + 1
    if not 0 <= n_electrons <= n:
        raise DomainError(f"Cannot place {n_electrons} electrons in {n} spin-orbitals")

    bits = [0] * n
    if n_electrons == 0:
        return ReferenceState(tuple(bits), params.n_bath)

    bath_electrons = min(n_electrons - 1, 2 * params.n_bath)
    levels = sorted(range(1, params.n_bath + 1), key=lambda i: (params.eps[i], i))
    slots = [jw_qubit_index(i, s, params.n_bath) for i in levels for s in (Spin.DOWN, Spin.UP)]
    for q in slots[:bath_electrons]:
        bits[q] = 1

    n_down = sum(bits[: params.n_bath + 1])
    n_up = sum(bits[params.n_bath + 1:])
    imp_dn, imp_up = impurity_qubits(params.n_bath)
    remaining = n_electrons - bath_electrons
    if remaining == 2:
        bits[imp_dn] = bits[imp_up] = 1
    else:
        bits[imp_up if n_up < n_down else imp_dn] = 1

    ref = ReferenceState(tuple(bits), params.n_bath)
    logger.debug(f"Reference state {ref.label} with {ref.n_electrons} electrons")
    return ref


def particle_sector_check(matrix: np.ndarray, n: int, tol: float = 1e-12) -> bool:
    """Whether ``matrix`` commutes with the total number operator."""
    number = number_diagonal(n)
    commutator = matrix * number[None, :] - number[:, None] * matrix
    return bool(np.max(np.abs(commutator)) <= tol)


def spin_sector_check(matrix: np.ndarray, n_bath: int, tol: float = 1e-12) -> bool:
    """Whether ``matrix`` commutes with ``S_z``."""
    sz = sz_diagonal(n_bath)
    commutator = matrix * sz[None, :] - sz[:, None] * matrix
    return bool(np.max(np.abs(commutator)) <= tol)
