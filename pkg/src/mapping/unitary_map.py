"""Expansion of the coupled-cluster Green's-function vectors over Pauli unitaries.

The ket ``c_p exp(T)|Phi>`` and the bra ``<Phi|(1 + Lambda) exp(-T) c_q^`` are
written as ``sum_l mu_l W_l|Phi>`` and ``sum_k nu_k <Phi|W_k^`` where every
``W`` is a product of Majorana-X strings. Each term corresponds to one
excitation ``E`` of the reference: ``W`` maps ``|Phi>`` onto the determinant
reached by ``c_p E|Phi>`` (lesser part) or ``c_q^ E|Phi>`` (greater part),
and the coefficient absorbs the amplitude together with both signs.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.special import comb

from ..cc.amplitudes import CCAmplitudes, Excitation
from ..cc.operators import ClusterOperator, cluster_exponential_state, excitation_determinant
from ..model.aim import ReferenceState
from ..model.fock import apply_ladder_bits, apply_operator
from ..utils.exceptions import DomainError, StateError
from .pauli import PauliString, majorana_product

logger = logging.getLogger(__name__)

PRUNE_TOLERANCE = 1e-14
IDENTITY_EXCITATION = Excitation(0, (), ())


class ExpansionMode(str, Enum):
    """Which cluster terms enter the expansion."""

    FULL = "full"
    T1_ONLY = "t1-only"


class GreensPart(str, Enum):
    """Lesser (electron removal) or greater (electron addition) part."""

    LESSER = "lesser"
    GREATER = "greater"


class BraMethod(str, Enum):
    """How bra coefficients are obtained."""

    CLOSED_FORM = "closed-form"
    PROJECTION = "projection"


@dataclass(frozen=True)
class LcuTerm:
    """One coefficient-unitary pair."""

    coefficient: float
    unitary: PauliString
    excitation: Excitation = IDENTITY_EXCITATION

    @property
    def tier(self) -> int:
        return self.excitation.rank

    @property
    def sort_key(self) -> Tuple[int, Tuple[int, ...]]:
        return self.excitation.rank, self.excitation.orbitals

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            "coefficient": self.coefficient,
            "pauli": self.unitary.label,
            "tier": self.tier,
            "holes": list(self.excitation.holes),
            "particles": list(self.excitation.particles),
        }


@dataclass
class LcuExpansion:
    """Ket and bra expansions for one Green's-function part."""

    part: GreensPart
    p: int
    q: int
    mode: ExpansionMode
    n_qubits: int
    ket: List[LcuTerm] = field(default_factory=list)
    bra: List[LcuTerm] = field(default_factory=list)

    @property
    def size(self) -> int:
        """Number of ket unitaries."""
        return len(self.ket)

    @property
    def is_empty(self) -> bool:
        return not self.ket or not self.bra

    def pairs(self) -> List[Tuple[LcuTerm, LcuTerm, float]]:
        """All (bra term, ket term, nu_k * mu_l) products."""
        return [(k, l, k.coefficient * l.coefficient) for k in self.bra for l in self.ket]

    def pair_count(self) -> int:
        """Number of distinct expectation values ``<W_k^ U W_l>``.

        ``<W_k^ U W_l>`` equals ``<W_l^ U W_k>`` for the real symmetric
        Hamiltonian, so coinciding bra and ket sets need ``m(m+1)/2`` values.
        """
        bra_labels = {t.unitary.label for t in self.bra}
        ket_labels = {t.unitary.label for t in self.ket}
        if bra_labels == ket_labels:
            m = len(ket_labels)
            return m * (m + 1) // 2
        return len(bra_labels) * len(ket_labels)

    def ket_vector(self, ref: ReferenceState) -> np.ndarray:
        """``sum_l mu_l W_l |Phi>``."""
        return _combine(self.ket, ref)

    def bra_vector(self, ref: ReferenceState) -> np.ndarray:
        """Column form of ``sum_k nu_k <Phi| W_k^``."""
        return _combine(self.bra, ref).conj()

    def to_frame(self) -> pd.DataFrame:
        """One row per term, bra terms first."""
        rows = []
        for side, terms in (("bra", self.bra), ("ket", self.ket)):
            for position, term in enumerate(terms):
                rows.append({"side": side, "index": position, **term.to_dict()})
        frame = pd.DataFrame(rows, columns=["side", "index", "coefficient", "pauli", "tier", "holes", "particles"])
        frame["holes"] = frame["holes"].map(lambda h: " ".join(map(str, h)))
        frame["particles"] = frame["particles"].map(lambda p: " ".join(map(str, p)))
        return frame

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            "part": self.part.value,
            "p": self.p,
            "q": self.q,
            "mode": self.mode.value,
            "ket": [t.to_dict() for t in self.ket],
            "bra": [t.to_dict() for t in self.bra],
            "pair_count": self.pair_count(),
        }


def _combine(terms: Sequence[LcuTerm], ref: ReferenceState) -> np.ndarray:
    vec = np.zeros(1 << ref.n_qubits, dtype=complex)
    for term in terms:
        phase, index = term.unitary.act_on_basis(ref.index)
        vec[index] += term.coefficient * phase
    return vec


def t_tilde_value(amplitudes: CCAmplitudes, i: int, j: int, a: int, b: int) -> float:
    """``t_ij^ab + t_i^a t_j^b - t_i^b t_j^a`` (antisymmetric in both index pairs)."""
    return (
        amplitudes.t_double(i, j, a, b)
        + amplitudes.t_single(i, a) * amplitudes.t_single(j, b)
        - amplitudes.t_single(i, b) * amplitudes.t_single(j, a)
    )


def t_tilde(amplitudes: CCAmplitudes) -> Dict[Tuple[int, int, int, int], float]:
    """Effective doubles ``t~`` for every ``i<j`` in O and ``a<b`` in S."""
    ref = amplitudes.reference
    return {
        (i, j, a, b): t_tilde_value(amplitudes, i, j, a, b)
        for i, j in combinations(ref.occupied, 2)
        for a, b in combinations(ref.virtual, 2)
    }


def _mode_amplitudes(amplitudes: CCAmplitudes, mode: ExpansionMode) -> CCAmplitudes:
    return amplitudes.impurity_singles_only() if ExpansionMode(mode) == ExpansionMode.T1_ONLY else amplitudes


def ket_weights(amplitudes: CCAmplitudes) -> List[Tuple[Excitation, float]]:
    """Weights of ``E|Phi>`` in ``exp(T)|Phi>`` up to doubles: 1, t, t~."""
    weights = [(IDENTITY_EXCITATION, 1.0)]
    for k, exc in enumerate(amplitudes.excitations):
        if exc.rank == 1:
            weights.append((exc, float(amplitudes.t[k])))
        else:
            (i, j), (a, b) = exc.holes, exc.particles
            weights.append((exc, t_tilde_value(amplitudes, i, j, a, b)))
    return weights


def bra_weights(
    amplitudes: CCAmplitudes,
    method: BraMethod = BraMethod.CLOSED_FORM,
) -> List[Tuple[Excitation, float]]:
    """Components ``<Phi|(1 + Lambda) exp(-T)|E Phi>`` of the left CC state.

    Raises:
        StateError: If Lambda amplitudes are missing
    """
    if amplitudes.lam is None:
        raise StateError("Lambda amplitudes are required for the bra expansion")

    if BraMethod(method) == BraMethod.PROJECTION:
        ref = amplitudes.reference
        left = cluster_exponential_state(amplitudes, form="bra")
        weights = [(IDENTITY_EXCITATION, float(left[ref.index]))]
        for exc in amplitudes.excitations:
            sign, index = excitation_determinant(exc, ref)
            weights.append((exc, float(sign * left[index])))
        return weights

    lam, t = amplitudes.lam, amplitudes.t
    l0 = 1.0
    for k, exc in enumerate(amplitudes.excitations):
        if exc.rank == 1:
            l0 -= lam[k] * t[k]
        else:
            (i, j), (a, b) = exc.holes, exc.particles
            disconnected = amplitudes.t_single(i, a) * amplitudes.t_single(j, b) \
                - amplitudes.t_single(i, b) * amplitudes.t_single(j, a)
            l0 -= lam[k] * (t[k] - disconnected)

    ref = amplitudes.reference
    weights = [(IDENTITY_EXCITATION, l0)]
    for k, exc in enumerate(amplitudes.excitations):
        if exc.rank == 1:
            (i,), (a,) = exc.holes, exc.particles
            value = lam[k] - sum(
                amplitudes.lam_double(i, j, a, b) * amplitudes.t_single(j, b)
                for j in ref.occupied if j != i
                for b in ref.virtual if b != a
            )
        else:
            value = lam[k]
        weights.append((exc, float(value)))
    return weights


def _lesser_unitary(exc: Excitation, outer: int, n: int) -> PauliString:
    order = list(exc.particles) + sorted(exc.holes, reverse=True) + [outer]
    return majorana_product(order, n)


def _greater_unitary(exc: Excitation, outer: int, n: int) -> PauliString:
    remaining = sorted((h for h in exc.holes if h != outer), reverse=True)
    return majorana_product(list(exc.particles) + remaining, n)


def _expand(
    weights: List[Tuple[Excitation, float]],
    ref: ReferenceState,
    outer: int,
    part: GreensPart,
) -> List[LcuTerm]:
    """Terms for ``c_outer E|Phi>`` (lesser) or ``c_outer^ E|Phi>`` (greater)."""
    n = ref.n_qubits
    terms = []
    for exc, weight in weights:
        if part == GreensPart.LESSER:
            if outer in exc.holes:
                continue
            ladder = (outer, False)
            unitary = _lesser_unitary(exc, outer, n)
        else:
            if outer not in exc.holes:
                continue
            ladder = (outer, True)
            unitary = _greater_unitary(exc, outer, n)

        sign_e, det = apply_ladder_bits(ref.index, exc.operators, n)
        sign_c, det = apply_ladder_bits(det, [ladder], n)
        phase, target = unitary.act_on_basis(ref.index)
        if sign_e == 0 or sign_c == 0 or target != det:
            raise DomainError(f"Unitary {unitary.label} does not reach the determinant of {exc.label}")

        coefficient = weight * sign_e * sign_c * float(np.real(phase))
        if abs(coefficient) < PRUNE_TOLERANCE:
            continue
        terms.append(LcuTerm(coefficient, unitary, exc))
    return sorted(terms, key=lambda term: term.sort_key)


def _require_occupied(ref: ReferenceState, orbital: int, name: str) -> None:
    if not 0 <= orbital < ref.n_qubits:
        raise DomainError(f"{name}={orbital} out of range 0..{ref.n_qubits - 1}")
    if not ref.is_occupied(orbital):
        raise DomainError(f"{name}={orbital} is not occupied in {ref.label}")


def build_lesser_lcu(
    p: int,
    q: int,
    amplitudes: CCAmplitudes,
    mode: ExpansionMode = ExpansionMode.FULL,
    bra_method: BraMethod = BraMethod.CLOSED_FORM,
) -> LcuExpansion:
    """Expand ``c_p exp(T)|Phi>`` and ``<Phi|(1 + Lambda) exp(-T) c_q^``.

    Args:
        p: Orbital removed on the ket side
        q: Orbital removed on the bra side
        amplitudes: Converged T and Lambda amplitudes
        mode: Full expansion or impurity singles only
        bra_method: Closed-form or projected bra coefficients

    Returns:
        LcuExpansion

    Raises:
        DomainError: If p or q is not occupied in the reference
    """
    ref = amplitudes.reference
    _require_occupied(ref, p, "p")
    _require_occupied(ref, q, "q")
    mode = ExpansionMode(mode)
    amps = _mode_amplitudes(amplitudes, mode)

    expansion = LcuExpansion(
        part=GreensPart.LESSER,
        p=p,
        q=q,
        mode=mode,
        n_qubits=ref.n_qubits,
        ket=_expand(ket_weights(amps), ref, p, GreensPart.LESSER),
        bra=_expand(bra_weights(amps, bra_method), ref, q, GreensPart.LESSER),
    )
    logger.debug(
        f"Lesser expansion p={p} q={q} ({mode.value}): {len(expansion.ket)} ket, "
        f"{len(expansion.bra)} bra terms, {expansion.pair_count()} distinct pairs"
    )
    return expansion


def build_greater_lcu(
    p: int,
    q: int,
    amplitudes: CCAmplitudes,
    mode: ExpansionMode = ExpansionMode.FULL,
    bra_method: BraMethod = BraMethod.CLOSED_FORM,
) -> LcuExpansion:
    """Expand ``c_q^ exp(T)|Phi>`` and ``<Phi|(1 + Lambda) exp(-T) c_p``.

    Only cluster terms that empty ``q`` (``p`` on the bra side) survive, so
    with ``T = 0`` the expansion is empty.

    Raises:
        DomainError: If p or q is not occupied in the reference
    """
    ref = amplitudes.reference
    _require_occupied(ref, p, "p")
    _require_occupied(ref, q, "q")
    mode = ExpansionMode(mode)
    amps = _mode_amplitudes(amplitudes, mode)

    expansion = LcuExpansion(
        part=GreensPart.GREATER,
        p=p,
        q=q,
        mode=mode,
        n_qubits=ref.n_qubits,
        ket=_expand(ket_weights(amps), ref, q, GreensPart.GREATER),
        bra=_expand(bra_weights(amps, bra_method), ref, p, GreensPart.GREATER),
    )
    logger.debug(
        f"Greater expansion p={p} q={q} ({mode.value}): {len(expansion.ket)} ket, "
        f"{len(expansion.bra)} bra terms"
    )
    return expansion


def _truncated_ket(amplitudes: CCAmplitudes) -> np.ndarray:
    """``(1 + T)|Phi>``."""
    ref = amplitudes.reference
    op = ClusterOperator(amplitudes.excitations, ref.n_qubits)
    phi = ref.vector()
    return phi + op.apply(amplitudes.t, phi)


def ket_oracle(
    part: GreensPart,
    orbital: int,
    amplitudes: CCAmplitudes,
    mode: ExpansionMode = ExpansionMode.FULL,
) -> np.ndarray:
    """Exact target of the ket expansion.

    ``c_p exp(T)|Phi>`` or ``c_q^ exp(T)|Phi>`` in full mode; ``exp(T)`` is
    replaced by ``1 + T'`` over impurity singles in the reduced mode.
    """
    mode = ExpansionMode(mode)
    if mode == ExpansionMode.T1_ONLY:
        state = _truncated_ket(amplitudes.impurity_singles_only())
    else:
        state = cluster_exponential_state(amplitudes, form="ket")
    dagger = GreensPart(part) == GreensPart.GREATER
    return apply_operator(state, [(orbital, dagger)], amplitudes.reference.n_qubits)


def bra_oracle(
    part: GreensPart,
    orbital: int,
    amplitudes: CCAmplitudes,
    mode: ExpansionMode = ExpansionMode.FULL,
) -> np.ndarray:
    """Column form of ``<Phi|(1 + Lambda) exp(-T) c_q^`` (lesser) or ``... c_p`` (greater)."""
    amps = _mode_amplitudes(amplitudes, mode)
    left = cluster_exponential_state(amps, form="bra")
    # (l^T c_q^)^T = c_q l and (l^T c_p)^T = c_p^ l
    dagger = GreensPart(part) == GreensPart.GREATER
    return apply_operator(left, [(orbital, dagger)], amplitudes.reference.n_qubits)


def full_expansion_size(ref: ReferenceState) -> int:
    """``1 + |S|(|O|-1) + C(|S|,2) C(|O|-1,2)`` before spin selection and pruning."""
    n_occ, n_vir = len(ref.occupied), len(ref.virtual)
    if n_occ == 0:
        return 0
    return int(1 + n_vir * (n_occ - 1) + comb(n_vir, 2, exact=True) * comb(n_occ - 1, 2, exact=True))


def t1_only_size(amplitudes: CCAmplitudes, p: int) -> int:
    """``1 +`` number of impurity singles that leave ``p`` occupied."""
    truncated = amplitudes.impurity_singles_only()
    return 1 + sum(1 for exc in truncated.excitations if p not in exc.holes)
