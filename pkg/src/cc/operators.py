"""Action of cluster operators and their exponentials on Fock-space vectors."""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..model.aim import ReferenceState
from ..model.fock import apply_ladder_bits, apply_ladder_sequence
from ..utils.exceptions import StateError
from .amplitudes import CCAmplitudes, Excitation

logger = logging.getLogger(__name__)


class ClusterOperator:
    """Linear combinations ``sum_mu c_mu E_mu`` over a fixed excitation list.

    Each excitation is stored as a signed permutation of basis indices, so
    applying it (or its transpose) is a gather/scatter.
    """

    def __init__(self, excitations: Sequence[Excitation], n_qubits: int):
        self.excitations = list(excitations)
        self.n_qubits = n_qubits
        self.dim = 1 << n_qubits
        source = np.arange(self.dim, dtype=np.int64)
        self._actions: List[Tuple[np.ndarray, np.ndarray, np.ndarray]] = []
        for exc in self.excitations:
            signs, target, valid = apply_ladder_sequence(source, exc.operators, n_qubits)
            self._actions.append((source[valid], target[valid], signs[valid].astype(float)))

    def __len__(self) -> int:
        return len(self.excitations)

    def apply_one(self, k: int, vector: np.ndarray, transpose: bool = False) -> np.ndarray:
        """``E_k v`` (or ``E_k^T v``)."""
        src, tgt, sgn = self._actions[k]
        out = np.zeros_like(vector, dtype=np.result_type(vector, float))
        if transpose:
            out[src] = sgn * vector[tgt]
        else:
            out[tgt] = sgn * vector[src]
        return out

    def apply(self, coefficients: np.ndarray, vector: np.ndarray, transpose: bool = False) -> np.ndarray:
        """``(sum_k c_k E_k) v``."""
        out = np.zeros_like(vector, dtype=np.result_type(vector, float))
        for k, c in enumerate(coefficients):
            if c == 0.0:
                continue
            src, tgt, sgn = self._actions[k]
            if transpose:
                out[src] += c * sgn * vector[tgt]
            else:
                out[tgt] += c * sgn * vector[src]
        return out

    def exp_apply(
        self,
        coefficients: np.ndarray,
        vector: np.ndarray,
        sign: float = 1.0,
        transpose: bool = False,
    ) -> np.ndarray:
        """``exp(sign * T) v`` summed until the nilpotent series terminates."""
        result = np.array(vector, dtype=np.result_type(vector, float), copy=True)
        term = result.copy()
        for order in range(1, self.n_qubits + 2):
            term = self.apply(coefficients, term, transpose) * (sign / order)
            if not np.any(term):
                break
            result += term
        return result


def excitation_determinant(exc: Excitation, ref: ReferenceState) -> Tuple[int, int]:
    """(sign, basis index) of ``E|Phi>``; sign 0 if the excitation is not allowed."""
    return apply_ladder_bits(ref.index, exc.operators, ref.n_qubits)


def cluster_exponential_state(
    amplitudes: CCAmplitudes,
    form: str = "ket",
    sign: float = 1.0,
    operator: Optional[ClusterOperator] = None,
) -> np.ndarray:
    """Exact exponential-cluster vectors.

    Args:
        amplitudes: Amplitudes holding ``t`` (and ``lam`` for the bra form)
        form: ``"ket"`` for ``exp(sign T)|Phi>``; ``"bra"`` for the column
            vector of ``<Phi|(1 + Lambda) exp(-T)``
        sign: Exponent sign for the ket form
        operator: Optional prebuilt operator over ``amplitudes.excitations``

    Returns:
        Fock-space vector

    Raises:
        StateError: If the bra form is requested without Lambda amplitudes
    """
    ref = amplitudes.reference
    op = operator or ClusterOperator(amplitudes.excitations, ref.n_qubits)
    phi = ref.vector()
    if form == "ket":
        return op.exp_apply(amplitudes.t, phi, sign=sign)
    if form == "bra":
        if amplitudes.lam is None:
            raise StateError("Lambda amplitudes are required for the bra form")
        left = phi + op.apply(amplitudes.lam, phi)
        return op.exp_apply(amplitudes.t, left, sign=-1.0, transpose=True)
    raise ValueError(f"Unknown form: {form}")
