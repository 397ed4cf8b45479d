"""Error bounds and quantum-resource scaling estimates.

All gate, query and ancilla figures are asymptotic scalings evaluated with
unit prefactors. They are labelled as such in every report and must not be
read as exact gate counts.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from ..mapping.jordan_wigner import alpha_norm, pauli_decomposition
from ..model.aim import DEFAULT_MAX_BATH, AimParams, build_hamiltonian, check_size, hamiltonian_terms
from ..simulation.circuit_sim import ExactEvolution, TrotterEvolution, TrotterSplit, split_layers
from ..utils.exceptions import DomainError

logger = logging.getLogger(__name__)

ESTIMATE_LABEL = "asymptotic estimate, constants = 1"
TWO_PI = 2.0 * np.pi
ZERO_ERROR = 1e-13


class ResourceMethod(str, Enum):
    """Simulation and measurement strategies with known cost scalings."""

    TROTTER_GIVENS = "trotter-givens"
    TAYLOR = "taylor"
    QUBITIZATION = "qubitization"
    HADAMARD_PER_TERM = "hadamard-per-term"
    LCU_SINGLE_CIRCUIT = "lcu-single-circuit"


@dataclass
class LcuStats:
    """Failure bounds of a linear combination of unitaries.

    ``success_probability`` is the exact chance ``||sum c_j V_j psi||^2 / ||c||_1^2``
    that the combination succeeds, bounded below by ``1 - p_f``; ``success_rate``
    is its sampled estimate.
    """

    kappa: float
    delta: float
    p_plus: float
    p_minus: float
    p_f: float
    n_terms: int
    success_rate: Optional[float] = None
    success_probability: Optional[float] = None

    @property
    def vacuous(self) -> bool:
        """Whether ``p_f`` is clamped to 1, so the bound says nothing."""
        return self.p_f >= 1.0

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            "kappa": self.kappa,
            "delta": self.delta,
            "p_plus": self.p_plus,
            "p_minus": self.p_minus,
            "p_f": self.p_f,
            "n_terms": self.n_terms,
            "success_rate": self.success_rate,
            "success_probability": self.success_probability,
            "vacuous": self.vacuous,
        }


@dataclass
class ResourceReport:
    """Scaling estimate for one method."""

    method: ResourceMethod
    upsilon: float
    alpha_norm: float
    ancillae: float
    queries: float
    gates: float
    t: float
    eps_s: float
    eps_m: Optional[float]
    p_f: float
    n_bath: int
    system_qubits: int
    label: str = ESTIMATE_LABEL

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            "method": self.method.value,
            "label": self.label,
            "upsilon": self.upsilon,
            "alpha_norm": self.alpha_norm,
            "ancillae": self.ancillae,
            "queries": self.queries,
            "gates": self.gates,
            "inputs": {
                "t": self.t,
                "eps_s": self.eps_s,
                "eps_m": self.eps_m,
                "p_f": self.p_f,
                "n_bath": self.n_bath,
            },
            "system_qubits": self.system_qubits,
        }


@dataclass
class TrotterErrorSeries:
    """Actual second-order Trotter error against two upper bounds."""

    dt: float
    n_substeps: int
    times: np.ndarray
    actual: np.ndarray
    bound: np.ndarray
    commutator_bound: np.ndarray
    split: TrotterSplit = TrotterSplit.POTENTIAL
    metadata: Dict[str, Any] = field(default_factory=dict)

    @staticmethod
    def _ratio(bound: np.ndarray, actual: np.ndarray) -> np.ndarray:
        ratio = np.full(actual.shape, np.inf)
        mask = actual >= ZERO_ERROR
        ratio[mask] = bound[mask] / actual[mask]
        return ratio

    @property
    def ratio(self) -> np.ndarray:
        """Upsilon bound over actual error (``inf`` where the error vanishes)."""
        return self._ratio(self.bound, self.actual)

    @property
    def commutator_ratio(self) -> np.ndarray:
        return self._ratio(self.commutator_bound, self.actual)

    def to_frame(self) -> pd.DataFrame:
        """Tabular form with one row per time step."""
        return pd.DataFrame({
            "t": self.times,
            "split": self.split.value,
            "n_substeps": self.n_substeps,
            "actual": self.actual,
            "bound": self.bound,
            "ratio": self.ratio,
            "commutator_bound": self.commutator_bound,
            "commutator_ratio": self.commutator_ratio,
        })


def upsilon(params: AimParams) -> float:
    """``(1/12) [ |U| (sum|V|)^2 + U^2 sum|V| / 2 ]``."""
    v_sum = float(sum(abs(v) for v in params.v))
    u = params.u_c
    return (abs(u) * v_sum ** 2 + 0.5 * u ** 2 * v_sum) / 12.0


def commutator_constant(params: AimParams, split: Union[TrotterSplit, str] = TrotterSplit.POTENTIAL) -> float:
    """``||[B,[B,A]]||/12 + ||[A,[A,B]]||/24`` with A the outer diagonal layer of ``split``."""
    diagonal, b = split_layers(params, split)
    a = np.diag(diagonal)

    def comm(x, y):
        return x @ y - y @ x

    inner = comm(a, b)
    return float(
        np.linalg.norm(comm(b, -inner), 2) / 12.0
        + np.linalg.norm(comm(a, inner), 2) / 24.0
    )


def trotter_error_ratio(
    params: AimParams,
    dt: float,
    n_substeps: int,
    n_timesteps: int,
    max_bath: int = DEFAULT_MAX_BATH,
    split: Union[TrotterSplit, str] = TrotterSplit.POTENTIAL,
) -> TrotterErrorSeries:
    """Accumulated Trotter error of ``k`` steps of ``dt`` against its bounds.

    The exponent ``2pi H t`` makes the effective step ``2pi dt``; both bounds
    are accumulated additively over time steps. ``Upsilon`` is derived for the
    potential split and is only reported, not guaranteed, for the interaction
    split.

    Args:
        params: Model parameters
        dt: Time step
        n_substeps: Second-order substeps per time step
        n_timesteps: Number of time steps
        max_bath: Bath-size cap
        split: Which terms form the diagonal outer layer

    Returns:
        TrotterErrorSeries for ``k = 1..n_timesteps``

    Raises:
        DomainError: For non-positive ``dt`` or ``n_substeps < 1``
    """
    if not dt > 0:
        raise DomainError(f"Time step must be positive, got {dt}")
    if int(n_substeps) != n_substeps or n_substeps < 1:
        raise DomainError(f"n_substeps must be a positive integer, got {n_substeps}")
    check_size(params, max_bath)
    split = TrotterSplit(split)

    _, hamiltonian = build_hamiltonian(params, max_bath)
    exact = ExactEvolution(hamiltonian)
    step = TrotterEvolution(params, n_substeps, split).step_unitary(dt, sign=-1)
    constant = commutator_constant(params, split)

    tau = TWO_PI * dt
    per_step = upsilon(params) * tau ** 3 / n_substeps ** 2
    per_step_commutator = constant * tau ** 3 / n_substeps ** 2

    steps = np.arange(1, n_timesteps + 1)
    actual = np.zeros(n_timesteps)
    product = np.eye(hamiltonian.shape[0], dtype=complex)
    for k in steps:
        product = step @ product
        actual[k - 1] = np.linalg.norm(product - exact.unitary(k * dt, sign=-1), 2)

    series = TrotterErrorSeries(
        dt=dt,
        n_substeps=int(n_substeps),
        times=steps * dt,
        actual=actual,
        bound=steps * per_step,
        commutator_bound=steps * per_step_commutator,
        split=split,
        metadata={"upsilon": upsilon(params), "commutator_constant": constant},
    )
    logger.info(
        f"Trotter error {split.value} split r={n_substeps}: final actual {actual[-1]:.3e}, "
        f"upsilon bound {series.bound[-1]:.3e}, commutator bound {series.commutator_bound[-1]:.3e}"
    )
    return series


def default_trotter_steps(params: AimParams, dt: float, eps_s: float) -> int:
    """Smallest ``r`` with ``Upsilon (2pi dt)^3 / r^2 <= eps_s``."""
    if not eps_s > 0:
        raise DomainError(f"eps_s must be positive, got {eps_s}")
    value = upsilon(params) * (TWO_PI * dt) ** 3
    return max(1, math.ceil(math.sqrt(value / eps_s)))


def f_eta(eta: float) -> float:
    """``log(eta) / log(log(eta))``.

    Raises:
        DomainError: If ``eta <= e``
    """
    if not eta > math.e:
        raise DomainError(f"f(eta) needs eta > e, got {eta}")
    return math.log(eta) / math.log(math.log(eta))


def _log_n(n: float) -> float:
    return max(math.log2(n), 1.0) if n > 0 else 1.0


def tgate_estimate(
    method: ResourceMethod,
    params: AimParams,
    t: float,
    eps_s: float,
    eps_m: Optional[float] = None,
    p_f: float = 0.0,
    n_bath: Optional[int] = None,
) -> ResourceReport:
    """Evaluate one scaling row with unit constants.

    ``n_bath`` overrides the system size used in the formulas (``Upsilon`` and
    ``||alpha||_1`` still come from ``params``). Simulation-only rows are
    multiplied by ``eps_m**-2`` repetitions when ``eps_m`` is given; the two
    measurement rows use ``eps_s / N^2`` for their ``N^2`` propagators and the
    per-term row uses ``eps_m / N^2``.

    Raises:
        DomainError: On non-positive inputs, ``p_f`` outside ``[0, 1)``, a
            missing ``eps_m`` for measurement rows, or ``eta <= e``
    """
    method = ResourceMethod(method)
    n = params.n_bath if n_bath is None else n_bath
    if not t > 0 or not eps_s > 0 or n <= 0:
        raise DomainError("t, eps_s and n_bath must be positive")
    if not 0.0 <= p_f < 1.0:
        raise DomainError(f"p_f must lie in [0, 1), got {p_f}")
    if eps_m is not None and not eps_m > 0:
        raise DomainError(f"eps_m must be positive, got {eps_m}")

    ups = upsilon(params)
    alpha = alpha_norm(pauli_decomposition(hamiltonian_terms(params), params.n_qubits))
    log_n = _log_n(n)
    repetitions = 1.0 if eps_m is None else eps_m ** -2

    if method == ResourceMethod.TROTTER_GIVENS:
        queries = math.sqrt(ups) * eps_s ** -0.5 * t ** 1.5
        ancillae = 1.0
        gates = queries * n * log_n * repetitions
    elif method == ResourceMethod.TAYLOR:
        f = f_eta(alpha * t / eps_s)
        ancillae = log_n * f
        queries = alpha * t * f
        gates = alpha * t * n * f * repetitions
    elif method == ResourceMethod.QUBITIZATION:
        ancillae = math.ceil(math.log2(n)) + 2.0
        queries = alpha * t + f_eta(1.0 / eps_s)
        gates = n * queries * repetitions
    else:
        if eps_m is None:
            raise DomainError(f"{method.value} needs a measurement error eps_m")
        propagator = math.sqrt(ups) * (eps_s / n ** 2) ** -0.5 * t ** 1.5 * n ** 2
        if method == ResourceMethod.HADAMARD_PER_TERM:
            ancillae = 1.0
            queries = n ** 2 * (eps_m / n ** 2) ** -2
            gates = propagator * queries
        else:
            ancillae = math.ceil(math.log2(n ** 2)) + 1.0
            queries = eps_m ** -2 / (1.0 - p_f)
            gates = propagator * n ** 2 * queries

    report = ResourceReport(
        method=method,
        upsilon=ups,
        alpha_norm=alpha,
        ancillae=float(ancillae),
        queries=float(queries),
        gates=float(gates),
        t=t,
        eps_s=eps_s,
        eps_m=eps_m,
        p_f=p_f,
        n_bath=n,
        system_qubits=2 * (n + 1),
    )
    logger.debug(f"{method.value}: gates ~ {gates:.3e} ({ESTIMATE_LABEL})")
    return report


def resource_table(
    params: AimParams,
    t: float,
    eps_s: float,
    eps_m: Optional[float] = None,
    p_f: float = 0.0,
    methods: Optional[Sequence[ResourceMethod]] = None,
) -> List[ResourceReport]:
    """Reports for several methods; measurement rows are skipped without ``eps_m``."""
    methods = list(methods) if methods else list(ResourceMethod)
    reports = []
    for method in methods:
        method = ResourceMethod(method)
        if eps_m is None and method in (ResourceMethod.HADAMARD_PER_TERM, ResourceMethod.LCU_SINGLE_CIRCUIT):
            logger.warning(f"Skipping {method.value}: no eps_m given")
            continue
        reports.append(tgate_estimate(method, params, t, eps_s, eps_m, p_f))
    return reports


def lcu_failure_bound(
    coefficients: Sequence[float],
    unitaries: Optional[Sequence[np.ndarray]] = None,
) -> LcuStats:
    """Failure-probability bounds for a signed combination of unitaries.

    ``kappa`` is the positive coefficient mass over the negative one (``inf``
    without negative terms, 0 without positive terms) and ``delta`` the
    largest spectral-norm distance between two of the unitaries.

    Raises:
        DomainError: If no coefficients are given
    """
    coefficients = np.asarray(coefficients, dtype=float)
    if coefficients.size == 0:
        raise DomainError("lcu_failure_bound needs at least one coefficient")

    positive = float(coefficients[coefficients > 0].sum())
    negative = float(-coefficients[coefficients < 0].sum())
    if negative == 0.0:
        kappa = math.inf
    elif positive == 0.0:
        kappa = 0.0
    else:
        kappa = positive / negative

    delta = 0.0
    if unitaries is not None and len(unitaries) > 1:
        mats = [np.asarray(u) for u in unitaries]
        for i in range(len(mats)):
            for j in range(i + 1, len(mats)):
                delta = max(delta, float(np.linalg.norm(mats[i] - mats[j], 2)))

    p_plus = 0.0 if delta == 0.0 else min(kappa * delta ** 2 / 4.0, 1.0)
    p_minus = 0.0 if math.isinf(kappa) else min(4.0 * kappa / (kappa + 1.0) ** 2, 1.0)
    return LcuStats(
        kappa=kappa,
        delta=delta,
        p_plus=p_plus,
        p_minus=p_minus,
        p_f=min(p_plus + p_minus, 1.0),
        n_terms=int(coefficients.size),
    )
