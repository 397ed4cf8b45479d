"""Assemble ``G(t) = G<(t) + G>(t)`` from the unitary expansions.

Each part is ``exp(-i sign 2pi E_CC t) sum_kl nu_k mu_l <W_k^ U_H(t) W_l>``
with ``U_H(t) = exp(i sign 2pi H t)``; the constant ``E_CC`` phase is applied
classically after measurement.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional, Tuple, Union

import numpy as np
from tqdm import tqdm

from ..analysis.resources import LcuStats, lcu_failure_bound
from ..cc.amplitudes import CCAmplitudes
from ..cc.solver import cc_energy
from ..mapping.pauli import PauliString
from ..mapping.unitary_map import (
    BraMethod,
    ExpansionMode,
    GreensPart,
    LcuExpansion,
    build_greater_lcu,
    build_lesser_lcu,
)
from ..model.aim import DEFAULT_MAX_BATH, AimParams, ReferenceState, build_hamiltonian, check_size
from ..model.series import GreensSeries, TimeGrid
from ..simulation.circuit_sim import EvolutionConfig, EvolutionMode, ExactEvolution, TrotterEvolution, exact_propagator
from ..utils.exceptions import DomainError, StateError
from .estimators import (
    IMAG,
    REAL,
    LcuCircuit,
    MeasurementConfig,
    MeasurementMode,
    combination_success_rate,
    hadamard_test,
    term_rng,
)

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi
PART_SIGNS = {GreensPart.LESSER: -1, GreensPart.GREATER: 1}
PART_TAGS = {GreensPart.LESSER: 0, GreensPart.GREATER: 1}


def exact_expectation(
    w_k: PauliString,
    cfg: EvolutionConfig,
    w_l: PauliString,
    ref: ReferenceState,
    params: AimParams,
) -> complex:
    """``<Phi| W_k^ U(t) W_l |Phi>`` by a direct statevector inner product.

    ``U(t)`` includes the ``E_CC`` phase from ``cfg``.

    Raises:
        DomainError: If register sizes differ
    """
    if not (w_k.n == w_l.n == ref.n_qubits == params.n_qubits):
        raise DomainError(
            f"Register sizes differ: W_k {w_k.n}, W_l {w_l.n}, reference {ref.n_qubits}, model {params.n_qubits}"
        )
    if cfg.mode == EvolutionMode.TROTTER:
        unitary = TrotterEvolution(params, cfg.r).unitary(cfg.t, cfg.sign, cfg.e_cc)
    else:
        unitary = exact_propagator(params, cfg)
    phi = ref.vector()
    return complex(np.vdot(w_k.apply(phi), unitary @ w_l.apply(phi)))


class GridPropagator:
    """Applies ``U_H(t_n)`` to a block of states on a uniform grid.

    Trotter mode reuses one step matrix ``M(dt)`` so that ``U(t_n) = M^n``.
    """

    def __init__(
        self,
        params: AimParams,
        mode: EvolutionMode = EvolutionMode.EXACT,
        r: int = 1,
        max_bath: int = DEFAULT_MAX_BATH,
    ):
        self.mode = EvolutionMode(mode)
        self.r = r
        if self.mode == EvolutionMode.EXACT:
            _, hamiltonian = build_hamiltonian(params, max_bath)
            self.exact = ExactEvolution(hamiltonian)
        else:
            check_size(params, max_bath)
            self.trotter = TrotterEvolution(params, r)

    def states(self, vectors: np.ndarray, grid: TimeGrid, sign: int) -> Iterator[Tuple[int, float, np.ndarray]]:
        """Yield ``(n, t_n, U_H(t_n) vectors)`` for every grid point."""
        if self.mode == EvolutionMode.EXACT:
            v = self.exact.eigenvectors
            rotated = v.conj().T @ vectors
            for n, t in enumerate(grid.times):
                yield n, t, v @ (self.exact.phases(t, sign)[:, None] * rotated)
        else:
            step = self.trotter.step_unitary(grid.dt, sign)
            current = np.asarray(vectors, dtype=complex)
            for n, t in enumerate(grid.times):
                yield n, t, current
                current = step @ current


@dataclass
class PartResult:
    """One Green's-function part with its propagated uncertainty."""

    part: GreensPart
    values: np.ndarray
    var_re: np.ndarray
    var_im: np.ndarray
    expansion: LcuExpansion
    stats: Optional[LcuStats] = None


@dataclass
class _Accumulator:
    value: complex = 0.0
    var_re: float = 0.0
    var_im: float = 0.0
    successes: List[float] = field(default_factory=list)
    success_probability: Optional[float] = None


class GreensFunctionEstimator:
    """Evaluate the coupled-cluster Green's function in one measurement mode."""

    def __init__(
        self,
        params: AimParams,
        amplitudes: CCAmplitudes,
        evolution: Union[EvolutionMode, str] = EvolutionMode.EXACT,
        r: int = 1,
        measurement: Optional[MeasurementConfig] = None,
        expansion_mode: Union[ExpansionMode, str] = ExpansionMode.FULL,
        bra_method: Union[BraMethod, str] = BraMethod.CLOSED_FORM,
        progress: bool = False,
        max_bath: int = DEFAULT_MAX_BATH,
    ):
        """Initialize the estimator.

        Args:
            params: Model parameters
            amplitudes: Converged T and Lambda amplitudes
            evolution: Exact or Trotterized propagator
            r: Trotter substeps per grid step
            measurement: Sampling settings (exact by default)
            expansion_mode: Full expansion or impurity singles only
            bra_method: Closed-form or projected bra coefficients
            progress: Show a progress bar over grid points
            max_bath: Bath-size cap

        Raises:
            StateError: If amplitudes are unconverged or lack Lambda
        """
        if not amplitudes.converged:
            raise StateError("Green's function requires converged amplitudes")
        if not amplitudes.has_lambda:
            raise StateError("Green's function requires Lambda amplitudes")
        self.params = params
        self.amplitudes = amplitudes
        self.reference = amplitudes.reference
        self.evolution = EvolutionMode(evolution)
        self.r = int(r)
        self.measurement = measurement or MeasurementConfig()
        self.expansion_mode = ExpansionMode(expansion_mode)
        self.bra_method = BraMethod(bra_method)
        self.progress = progress
        self.e_cc = amplitudes.e_cc if amplitudes.e_cc is not None else cc_energy(params, amplitudes)
        self.propagator = GridPropagator(params, self.evolution, self.r, max_bath)
        self.phi = self.reference.vector()

    def expansion(self, part: GreensPart, p: int, q: int) -> LcuExpansion:
        """Unitary expansion of one part."""
        build = build_lesser_lcu if GreensPart(part) == GreensPart.LESSER else build_greater_lcu
        return build(p, q, self.amplitudes, self.expansion_mode, self.bra_method)

    def _states(self, terms) -> np.ndarray:
        return np.column_stack([term.unitary.apply(self.phi) for term in terms])

    def part(self, part: GreensPart, p: int, q: int, grid: TimeGrid) -> PartResult:
        """Evaluate ``G<`` or ``G>`` on every grid point."""
        part = GreensPart(part)
        expansion = self.expansion(part, p, q)
        n_points = grid.n_points
        values = np.zeros(n_points, dtype=complex)
        var_re = np.zeros(n_points)
        var_im = np.zeros(n_points)
        if expansion.is_empty:
            logger.info(f"{part.value} expansion is empty; part is identically zero")
            return PartResult(part, values, var_re, var_im, expansion)

        sign = PART_SIGNS[part]
        coefficients = np.array([[k.coefficient * l.coefficient for l in expansion.ket] for k in expansion.bra])
        bra_states = self._states(expansion.bra)
        daggers = [term.unitary.dagger() for term in expansion.bra]
        pair_map = self._unique_pairs(expansion)
        mode = self.measurement.mode
        shots = self.measurement.resolved_shots if mode != MeasurementMode.EXACT else 0
        stats = None
        successes: List[float] = []

        iterator = self.propagator.states(self._states(expansion.ket), grid, sign)
        for n, t, evolved in tqdm(iterator, total=n_points, desc=f"G {part.value}", disable=not self.progress):
            if mode == MeasurementMode.EXACT:
                acc = _Accumulator(value=complex(np.sum(coefficients * (bra_states.conj().T @ evolved))))
            elif mode == MeasurementMode.HADAMARD:
                acc = self._hadamard_point(n, part, evolved, daggers, coefficients, pair_map, shots)
            else:
                acc = self._lcu_point(n, part, evolved, daggers, coefficients, shots)
                if n == 0:
                    stats = self._lcu_stats(expansion, coefficients, acc.success_probability)
                    successes.extend(acc.successes)

            theta = -sign * TWO_PI * self.e_cc * t
            c, s = np.cos(theta), np.sin(theta)
            values[n] = np.exp(1j * theta) * acc.value
            var_re[n] = c * c * acc.var_re + s * s * acc.var_im
            var_im[n] = s * s * acc.var_re + c * c * acc.var_im

        if stats is not None and successes:
            stats.success_rate = float(np.mean(successes))
        return PartResult(part, values, var_re, var_im, expansion, stats)

    @staticmethod
    def _unique_pairs(expansion: LcuExpansion) -> Dict[Tuple[str, str], List[Tuple[int, int]]]:
        # <W_a^ U W_b> = <W_b^ U W_a> for real W and symmetric U
        pairs: Dict[Tuple[str, str], List[Tuple[int, int]]] = {}
        for k, bra in enumerate(expansion.bra):
            for l, ket in enumerate(expansion.ket):
                key = tuple(sorted((bra.unitary.label, ket.unitary.label)))
                pairs.setdefault(key, []).append((k, l))
        return dict(sorted(pairs.items()))

    def _hadamard_point(self, n, part, evolved, daggers, coefficients, pair_map, shots) -> _Accumulator:
        acc = _Accumulator()
        tag = PART_TAGS[part]
        seed = self.measurement.seed
        for u, members in enumerate(pair_map.values()):
            k, l = members[0]
            weight = float(sum(coefficients[kk, ll] for kk, ll in members))
            transformed = daggers[k].apply(evolved[:, l])
            re = hadamard_test(self.phi, transformed, REAL, shots, term_rng(seed, n, u, tag, REAL) if shots else None)
            im = hadamard_test(self.phi, transformed, IMAG, shots, term_rng(seed, n, u, tag, IMAG) if shots else None)
            acc.value += weight * complex(re.value, im.value)
            acc.var_re += weight ** 2 * re.stderr ** 2
            acc.var_im += weight ** 2 * im.stderr ** 2
        return acc

    def _lcu_point(self, n, part, evolved, daggers, coefficients, shots) -> _Accumulator:
        flat, transformed = [], []
        for k, dagger in enumerate(daggers):
            for l in range(evolved.shape[1]):
                flat.append(coefficients[k, l])
                transformed.append(dagger.apply(evolved[:, l]))
        circuit = LcuCircuit(flat, transformed, self.phi)
        tag = PART_TAGS[part]
        seed = self.measurement.seed
        re = circuit.estimate(REAL, shots, term_rng(seed, n, 0, tag, REAL) if shots else None)
        im = circuit.estimate(IMAG, shots, term_rng(seed, n, 0, tag, IMAG) if shots else None)
        acc = _Accumulator(value=complex(re.value, im.value), var_re=re.stderr ** 2, var_im=im.stderr ** 2)
        acc.successes.extend(rate for rate in map(combination_success_rate, (re, im)) if rate is not None)
        acc.success_probability = circuit.success_probability
        return acc

    def _lcu_stats(self, expansion: LcuExpansion, coefficients: np.ndarray, success_probability: float) -> LcuStats:
        """Failure bounds for the grid-zero circuit, where ``V_kl = W_k^ W_l``."""
        unitaries = [
            (bra.unitary.dagger() * ket.unitary).to_matrix()
            for bra in expansion.bra
            for ket in expansion.ket
        ]
        stats = lcu_failure_bound(coefficients.ravel(), unitaries)
        stats.success_probability = success_probability
        logger.info(
            f"LCU {expansion.part.value}: kappa={stats.kappa:.4g}, delta={stats.delta:.4g}, "
            f"p_f bound={stats.p_f:.4g}, success probability={stats.success_probability:.4g}"
            + (" (bound vacuous)" if stats.vacuous else "")
        )
        return stats

    def series(self, p: int, q: int, grid: Union[TimeGrid, np.ndarray]) -> GreensSeries:
        """Lesser plus greater parts of ``G_pq`` on a uniform grid."""
        if not isinstance(grid, TimeGrid):
            grid = TimeGrid.from_times(grid)
        lesser = self.part(GreensPart.LESSER, p, q, grid)
        greater = self.part(GreensPart.GREATER, p, q, grid)
        sampled = self.measurement.mode != MeasurementMode.EXACT

        provenance: Dict[str, Any] = {
            "source": "cc",
            "p": p,
            "q": q,
            "e_cc": self.e_cc,
            "evolution": self.evolution.value,
            "r": self.r,
            "expansion": self.expansion_mode.value,
            "bra_method": self.bra_method.value,
            "measurement": self.measurement.to_dict() if sampled else {"mode": "exact"},
            "lesser_terms": lesser.expansion.size,
            "greater_terms": greater.expansion.size,
        }
        for result in (lesser, greater):
            if result.stats is not None:
                provenance[f"lcu_{result.part.value}"] = result.stats.to_dict()

        series = GreensSeries(
            times=grid.times,
            lesser=lesser.values,
            greater=greater.values,
            stderr_re=np.sqrt(lesser.var_re + greater.var_re),
            stderr_im=np.sqrt(lesser.var_im + greater.var_im),
            provenance=provenance,
        )
        logger.info(
            f"G_{p}{q} over {grid.n_points} points ({self.measurement.mode.value}, {self.evolution.value}): "
            f"G(0) = {series.total[0].real:.6f}{series.total[0].imag:+.6f}i"
        )
        return series


def lcu_estimate(
    expansion: LcuExpansion,
    cfg: EvolutionConfig,
    mcfg: MeasurementConfig,
    params: AimParams,
    ref: ReferenceState,
    grid_index: int = 0,
) -> Tuple[complex, LcuStats]:
    """Single-circuit estimate of ``sum_kl nu_k mu_l <W_k^ U(t) W_l>`` at one time.

    ``U(t)`` includes the ``E_CC`` phase from ``cfg``.

    Raises:
        DomainError: If the expansion is empty
        StatisticalError: If post-selection never succeeds
    """
    if expansion.is_empty:
        raise DomainError("lcu_estimate needs a non-empty expansion")
    if cfg.mode == EvolutionMode.TROTTER:
        unitary = TrotterEvolution(params, cfg.r).unitary(cfg.t, cfg.sign, cfg.e_cc)
    else:
        unitary = exact_propagator(params, cfg)

    phi = ref.vector()
    flat, transformed, matrices = [], [], []
    for bra in expansion.bra:
        dagger = bra.unitary.dagger()
        for ket in expansion.ket:
            flat.append(bra.coefficient * ket.coefficient)
            transformed.append(dagger.apply(unitary @ ket.unitary.apply(phi)))
            matrices.append(dagger.to_matrix() @ unitary @ ket.unitary.to_matrix())

    circuit = LcuCircuit(flat, transformed, phi)
    shots = mcfg.resolved_shots
    tag = PART_TAGS[expansion.part]
    re = circuit.estimate(REAL, shots, term_rng(mcfg.seed, grid_index, 0, tag, REAL) if shots else None)
    im = circuit.estimate(IMAG, shots, term_rng(mcfg.seed, grid_index, 0, tag, IMAG) if shots else None)

    stats = lcu_failure_bound(flat, matrices)
    stats.success_probability = circuit.success_probability
    rates = [rate for rate in map(combination_success_rate, (re, im)) if rate is not None]
    stats.success_rate = float(np.mean(rates)) if rates else None
    return complex(re.value, im.value), stats


def greens_series(
    params: AimParams,
    amplitudes: CCAmplitudes,
    p: int,
    q: int,
    grid: Union[TimeGrid, np.ndarray],
    evolution: Union[EvolutionMode, str] = EvolutionMode.EXACT,
    r: int = 1,
    measurement: Optional[MeasurementConfig] = None,
    expansion_mode: Union[ExpansionMode, str] = ExpansionMode.FULL,
    **kwargs,
) -> GreensSeries:
    """Green's function ``G_pq(t)`` (see :class:`GreensFunctionEstimator`)."""
    estimator = GreensFunctionEstimator(
        params,
        amplitudes,
        evolution=evolution,
        r=r,
        measurement=measurement,
        expansion_mode=expansion_mode,
        **kwargs,
    )
    return estimator.series(p, q, grid)
