"""Sampled estimators of overlaps ``<psi| V |psi>``.

Two circuit families are emulated from their exact output distributions:

* the Hadamard test (ancilla in ``|+>``, optional ``S^`` for the imaginary
  part, controlled ``V``, Hadamard, measure), one circuit per unitary;
* a single LCU circuit per Green's-function part, where PREPARE loads the
  coefficient magnitudes into a register and SELECT applies ``sign_j V_j``
  under a Hadamard-test ancilla.

Shot noise is drawn from binomial or multinomial distributions with a
generator keyed on ``(seed, grid index, term index, part, component)`` so
that runs are reproducible independently of evaluation order.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional, Sequence

import numpy as np

from ..simulation.circuit_sim import controlled
from ..utils.exceptions import DomainError, NumericalError, StatisticalError

logger = logging.getLogger(__name__)

REAL = 0
IMAG = 1
COMPONENTS = {"real": REAL, "imag": IMAG}


class MeasurementMode(str, Enum):
    """How overlaps are obtained."""

    EXACT = "exact"
    HADAMARD = "hadamard"
    LCU = "lcu"


@dataclass
class MeasurementConfig:
    """Sampling settings.

    ``shots=None`` resolves to ``ceil(1 / eps_m**2)`` and ``shots=0`` gives
    the infinite-shot limit of the chosen circuit.
    """

    mode: MeasurementMode = MeasurementMode.EXACT
    shots: Optional[int] = None
    seed: int = 0
    eps_m: float = 1e-2

    def __post_init__(self):
        self.mode = MeasurementMode(self.mode)
        if self.shots is not None and (int(self.shots) != self.shots or self.shots < 0):
            raise DomainError(f"shots must be a non-negative integer, got {self.shots}")
        if not self.eps_m > 0:
            raise DomainError(f"eps_m must be positive, got {self.eps_m}")

    @property
    def resolved_shots(self) -> int:
        if self.shots is not None:
            return int(self.shots)
        return math.ceil(1.0 / self.eps_m ** 2)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mode": self.mode.value,
            "shots": self.resolved_shots,
            "seed": self.seed,
            "eps_m": self.eps_m,
        }


@dataclass
class Estimate:
    """One sampled (or exact-limit) expectation value."""

    value: float
    stderr: float
    shots: int
    probability: float
    counts: Optional[Sequence[int]] = None


def term_rng(seed: int, grid_index: int, term_index: int, part_tag: int, component: int) -> np.random.Generator:
    """Counter-based generator for one circuit execution."""
    sequence = np.random.SeedSequence(seed, spawn_key=(grid_index, term_index, part_tag, component))
    return np.random.Generator(np.random.Philox(sequence))


def _component(component) -> int:
    if isinstance(component, str):
        if component not in COMPONENTS:
            raise DomainError(f"Unknown component {component!r}; expected 'real' or 'imag'")
        return COMPONENTS[component]
    if component not in (REAL, IMAG):
        raise DomainError(f"Unknown component {component!r}")
    return int(component)


def _ancilla_phase(component: int) -> complex:
    # S^ on the control multiplies the |1> branch by -i
    return 1.0 if component == REAL else -1j


def hadamard_probability(state: np.ndarray, transformed: np.ndarray, component=REAL) -> float:
    """``P(ancilla = 0) = || psi + phase V psi ||^2 / 4`` from both branches."""
    phase = _ancilla_phase(_component(component))
    branch = np.asarray(state, dtype=complex) + phase * np.asarray(transformed, dtype=complex)
    return float(np.clip(np.vdot(branch, branch).real / 4.0, 0.0, 1.0))


def hadamard_circuit_state(state: np.ndarray, unitary: np.ndarray, component=REAL) -> np.ndarray:
    """Output of the full ancilla circuit with the ancilla as qubit 0.

    Builds ``H (S^) C-V H`` on ``1 + n`` qubits explicitly; intended for
    checking :func:`hadamard_probability` on small registers.
    """
    component = _component(component)
    state = np.asarray(state, dtype=complex)
    n_system = int(round(math.log2(state.size)))
    hadamard = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)
    identity = np.eye(state.size)

    full = np.kron(np.array([1.0, 0.0]), state)
    full = np.kron(hadamard, identity) @ full
    if component == IMAG:
        full = np.kron(np.diag([1.0, -1j]), identity) @ full
    full = controlled(unitary, control=0, n_total=n_system + 1) @ full
    return np.kron(hadamard, identity) @ full


def hadamard_test(
    state: np.ndarray,
    transformed: np.ndarray,
    component=REAL,
    shots: int = 0,
    rng: Optional[np.random.Generator] = None,
) -> Estimate:
    """Estimate ``Re`` or ``Im`` of ``<psi|V|psi>``.

    Args:
        state: ``|psi>``
        transformed: ``V|psi>``
        component: ``"real"``/``0`` or ``"imag"``/``1``
        shots: Number of shots; 0 returns the exact limit
        rng: Generator used for sampling

    Returns:
        Estimate with value ``2 n0/N - 1`` and stderr ``sqrt((1 - est^2)/N)``
    """
    p0 = hadamard_probability(state, transformed, component)
    if shots == 0:
        return Estimate(value=2.0 * p0 - 1.0, stderr=0.0, shots=0, probability=p0)
    if rng is None:
        raise DomainError("A random generator is required for finite shots")

    n0 = int(rng.binomial(shots, p0))
    value = 2.0 * n0 / shots - 1.0
    stderr = math.sqrt(max(1.0 - value ** 2, 0.0) / shots)
    return Estimate(value=value, stderr=stderr, shots=shots, probability=p0, counts=(n0, shots - n0))


def prepare_unitary(coefficients: Sequence[float]) -> np.ndarray:
    """Real orthogonal PREPARE whose first column is ``sqrt(|c| / ||c||_1)``.

    The coefficients are padded with zeros to ``2**m`` entries,
    ``m = max(1, ceil(log2 K))``.

    Raises:
        DomainError: If all coefficients vanish
        NumericalError: If the orthogonal completion fails
    """
    coefficients = np.abs(np.asarray(coefficients, dtype=float))
    l1 = float(coefficients.sum())
    if coefficients.size == 0 or l1 == 0.0:
        raise DomainError("PREPARE needs at least one non-zero coefficient")

    n_register = max(1, math.ceil(math.log2(coefficients.size)))
    size = 1 << n_register
    target = np.zeros(size)
    target[:coefficients.size] = np.sqrt(coefficients / l1)

    # the appended identity keeps the completion full rank for any target
    seed = np.column_stack([target, np.identity(size)])
    q, _ = np.linalg.qr(seed, mode="complete")
    if np.dot(q[:, 0], target) < 0:
        q[:, 0] = -q[:, 0]
    if np.linalg.norm(q[:, 0] - target) > 1e-10:
        raise NumericalError("QR completion of PREPARE did not reproduce the target column", float("inf"))
    return q


class LcuCircuit:
    """Hadamard-test ancilla around PREPARE^ . SELECT . PREPARE.

    Measuring the ancilla and the index register gives three outcomes:
    (ancilla 0, register 0), (ancilla 1, register 0) and failure (register
    non-zero). Their difference estimates ``Re(phase <psi| sum c_j V_j |psi>) / ||c||_1``.
    """

    def __init__(self, coefficients: Sequence[float], transformed: Sequence[np.ndarray], state: np.ndarray):
        """Initialize the circuit.

        Args:
            coefficients: Real coefficients ``c_j``
            transformed: States ``V_j |psi>`` aligned with the coefficients
            state: ``|psi>``
        """
        coefficients = np.asarray(coefficients, dtype=float)
        if len(transformed) != coefficients.size:
            raise DomainError("Need one transformed state per coefficient")
        self.coefficients = coefficients
        self.l1_norm = float(np.abs(coefficients).sum())
        self.prepare = prepare_unitary(coefficients)
        self.n_register = int(round(math.log2(self.prepare.shape[0])))
        self.state = np.asarray(state, dtype=complex)

        selected = np.zeros((self.prepare.shape[0], self.state.size), dtype=complex)
        for j, (c, vector) in enumerate(zip(coefficients, transformed)):
            selected[j] = np.sign(c) * np.asarray(vector, dtype=complex)
        self.branch_one = self.prepare.T @ (self.prepare[:, 0][:, None] * selected)
        self.branch_zero = np.zeros_like(self.branch_one)
        self.branch_zero[0] = self.state

    def probabilities(self, component=REAL) -> Dict[str, float]:
        """Exact outcome probabilities."""
        phase = _ancilla_phase(_component(component))
        h0 = (self.branch_zero + phase * self.branch_one) / 2.0
        h1 = (self.branch_zero - phase * self.branch_one) / 2.0
        p0 = float(np.vdot(h0[0], h0[0]).real)
        p1 = float(np.vdot(h1[0], h1[0]).real)
        return {"p0": p0, "p1": p1, "fail": max(0.0, 1.0 - p0 - p1)}

    @property
    def success_probability(self) -> float:
        """``||sum c_j V_j psi||^2 / ||c||_1^2``: the register returns to ``|0>`` after PREPARE^ SELECT PREPARE."""
        combined = self.branch_one[0]
        return float(np.vdot(combined, combined).real)

    @property
    def acceptance_probability(self) -> float:
        """Register found in ``|0>`` with the Hadamard-test ancilla attached, ``(1 + success) / 2``."""
        probs = self.probabilities(REAL)
        return probs["p0"] + probs["p1"]

    def estimate(self, component=REAL, shots: int = 0, rng: Optional[np.random.Generator] = None) -> Estimate:
        """Estimate ``Re`` or ``Im`` of ``<psi| sum c_j V_j |psi>``.

        Raises:
            StatisticalError: If no shot lands in a success outcome
        """
        probs = self.probabilities(component)
        p0, p1 = probs["p0"], probs["p1"]
        accepted = p0 + p1
        if shots == 0:
            return Estimate(value=self.l1_norm * (p0 - p1), stderr=0.0, shots=0, probability=accepted)
        if rng is None:
            raise DomainError("A random generator is required for finite shots")

        pvals = np.clip([p0, p1, probs["fail"]], 0.0, None)
        n0, n1, n_fail = (int(x) for x in rng.multinomial(shots, pvals / pvals.sum()))
        if n0 + n1 == 0:
            raise StatisticalError(f"No successful LCU outcome in {shots} shots (acceptance probability {accepted:.3e})")
        value = self.l1_norm * (n0 - n1) / shots
        variance = max((n0 + n1) / shots - ((n0 - n1) / shots) ** 2, 0.0)
        stderr = self.l1_norm * math.sqrt(variance / shots)
        return Estimate(value=value, stderr=stderr, shots=shots, probability=accepted, counts=(n0, n1, n_fail))


def combination_success_rate(estimate: Estimate) -> Optional[float]:
    """Empirical :attr:`LcuCircuit.success_probability` from accepted counts, ``2 (n0 + n1) / N - 1``."""
    if estimate.counts is None:
        return None
    return 2.0 * (estimate.counts[0] + estimate.counts[1]) / estimate.shots - 1.0
