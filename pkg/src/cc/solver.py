"""Projective coupled-cluster solver for the impurity model.

The amplitude and Lambda equations are evaluated numerically in the full
Fock space: ``exp(+-T)`` is applied as a terminating series and residuals
are read off by projecting onto excited determinants.

The default starting point is the exact ground determinant of the
non-interacting model, which ``exp(T1)|Phi>`` reproduces by Thouless'
theorem. The root is then followed while ``U_c`` is switched on in equal
steps.
"""

import logging
from dataclasses import replace
from itertools import combinations
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy import linalg

from ..model.aim import (
    DEFAULT_MAX_BATH,
    AimParams,
    ReferenceState,
    Spin,
    build_hamiltonian,
    impurity_qubits,
    jw_qubit_index,
    one_body_matrix,
    qubit_level,
    qubit_spin,
    reference_state,
)
from ..model.fock import apply_operator
from ..utils.exceptions import ConvergenceError, DomainError, NumericalError, StateError
from .amplitudes import CCAmplitudes, enumerate_excitations
from .operators import ClusterOperator, excitation_determinant

logger = logging.getLogger(__name__)


def noninteracting_determinant(
    params: AimParams,
    reference: ReferenceState,
    tol: float = 1e-8,
) -> Optional[np.ndarray]:
    """Lowest ``U_c = 0`` determinant in the reference's spin sectors that overlaps ``|Phi>``.

    Orbitals are filled per spin in order of total one-body energy, skipping
    fillings whose overlap determinant with the reference falls below ``tol``.

    Returns:
        Unnormalized Fock-space vector, or None if no filling overlaps
    """
    energies, orbitals = linalg.eigh(one_body_matrix(params))
    n = reference.n_qubits
    vector = np.zeros(1 << n)
    vector[0] = 1.0

    for spin in (Spin.DOWN, Spin.UP):
        levels = [qubit_level(q, params.n_bath) for q in reference.occupied if qubit_spin(q, params.n_bath) == spin]
        if not levels:
            continue
        fillings = sorted(combinations(range(len(energies)), len(levels)), key=lambda s: (energies[list(s)].sum(), s))
        chosen = next(
            (s for s in fillings if abs(linalg.det(orbitals[np.ix_(levels, s)])) > tol),
            None,
        )
        if chosen is None:
            return None
        for j in chosen:
            created = np.zeros_like(vector)
            for level, amplitude in enumerate(orbitals[:, j]):
                if amplitude != 0.0:
                    q = jw_qubit_index(level, spin, params.n_bath)
                    created += apply_operator(vector, [(q, True)], n, amplitude)
            vector = created
    return vector


class DiisExtrapolator:
    """Pulay DIIS over stored (amplitude, residual) pairs."""

    def __init__(self, max_size: int = 6):
        self.max_size = max_size
        self.vectors: List[np.ndarray] = []
        self.errors: List[np.ndarray] = []

    @property
    def size(self) -> int:
        return len(self.vectors)

    def push(self, vector: np.ndarray, error: np.ndarray) -> None:
        self.vectors.append(vector.copy())
        self.errors.append(error.copy())
        if len(self.vectors) > self.max_size:
            self.vectors.pop(0)
            self.errors.pop(0)

    def extrapolate(self) -> Optional[np.ndarray]:
        """Extrapolated vector, or None with fewer than two entries."""
        n = len(self.vectors)
        if n < 2:
            return None
        b = -np.ones((n + 1, n + 1))
        b[n, n] = 0.0
        for i in range(n):
            for j in range(n):
                b[i, j] = float(self.errors[i] @ self.errors[j])
        scale = np.max(np.abs(b[:n, :n]))
        if scale == 0.0:
            return None
        b[:n, :n] /= scale
        rhs = np.zeros(n + 1)
        rhs[n] = -1.0
        coefficients = linalg.lstsq(b, rhs)[0][:n]
        return sum(c * v for c, v in zip(coefficients, self.vectors))


class CoupledClusterSolver:
    """Solve the CC amplitude and Lambda equations for one reference.

    Iteration: damped Newton steps with the exact Jacobian, accelerated by
    DIIS. A step or an extrapolated point is accepted only if it lowers the
    infinity-norm of the residual.
    """

    DEFAULT_TOL = 1e-10
    DEFAULT_MAX_ITER = 200
    DEFAULT_DIIS_SIZE = 6
    DEFAULT_DAMPING = 0.5
    DEFAULT_CONTINUATION_STEPS = 16
    MAX_BACKTRACKS = 12
    CONDITION_LIMIT = 1e12
    GUESSES = ("continuation", "zero")

    def __init__(
        self,
        params: AimParams,
        reference: Optional[ReferenceState] = None,
        level: int = 2,
        tol: Optional[float] = None,
        max_iter: Optional[int] = None,
        diis_size: Optional[int] = None,
        damping: Optional[float] = None,
        guess: str = "continuation",
        continuation_steps: Optional[int] = None,
        max_bath: int = DEFAULT_MAX_BATH,
    ):
        """Initialize the solver.

        Args:
            params: Model parameters
            reference: Reference determinant (default rule if omitted)
            level: Truncation level, 1 (singles) or 2 (singles and doubles)
            tol: Residual infinity-norm tolerance
            max_iter: Iteration cap per solve
            diis_size: DIIS subspace size
            damping: Initial Newton step fraction
            guess: ``"continuation"`` (non-interacting determinant followed
                up to ``U_c``) or ``"zero"``
            continuation_steps: Number of ``U_c`` increments for the continuation guess
            max_bath: Bath-size cap
        """
        self.params = params
        self.reference = reference or reference_state(params)
        self.level = level
        self.tol = self.DEFAULT_TOL if tol is None else tol
        self.max_iter = self.DEFAULT_MAX_ITER if max_iter is None else max_iter
        self.diis_size = self.DEFAULT_DIIS_SIZE if diis_size is None else diis_size
        self.damping = self.DEFAULT_DAMPING if damping is None else damping
        self.continuation_steps = (
            self.DEFAULT_CONTINUATION_STEPS if continuation_steps is None else continuation_steps
        )
        self.max_bath = max_bath
        if not self.tol > 0:
            raise DomainError(f"Tolerance must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise DomainError(f"max_iter must be at least 1, got {self.max_iter}")
        if self.diis_size < 2:
            raise DomainError(f"DIIS subspace must hold at least 2 vectors, got {self.diis_size}")
        if not 0.0 < self.damping <= 1.0:
            raise DomainError(f"Damping must lie in (0, 1], got {self.damping}")
        if self.continuation_steps < 1:
            raise DomainError(f"continuation_steps must be at least 1, got {self.continuation_steps}")
        if guess not in self.GUESSES:
            raise DomainError(f"Unknown initial guess {guess!r}; expected one of {self.GUESSES}")
        self.guess = guess

        _, self.hamiltonian = build_hamiltonian(params, max_bath)
        self.excitations = enumerate_excitations(self.reference, level)
        self.operator = ClusterOperator(self.excitations, self.reference.n_qubits)
        self.phi = self.reference.vector()
        self.e_ref = float(self.hamiltonian[self.reference.index, self.reference.index])

        determinants = [excitation_determinant(exc, self.reference) for exc in self.excitations]
        self._proj_sign = np.array([s for s, _ in determinants], dtype=float)
        self._proj_index = np.array([i for _, i in determinants], dtype=np.int64)
        self._singles = np.array([exc.rank == 1 for exc in self.excitations], dtype=bool)
        self.residual_history: List[float] = []

    # -- projections -----------------------------------------------------

    def project(self, vector: np.ndarray) -> np.ndarray:
        """Coefficients ``e_mu . v`` on the excited determinants."""
        return self._proj_sign * vector[self._proj_index]

    def excited_vector(self, k: int) -> np.ndarray:
        """``e_k = E_k |Phi>``."""
        vec = np.zeros(self.operator.dim)
        vec[self._proj_index[k]] = self._proj_sign[k]
        return vec

    # -- amplitude equations ---------------------------------------------

    def _transformed(self, t: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        psi = self.operator.exp_apply(t, self.phi)
        g = self.operator.exp_apply(t, self.hamiltonian @ psi, sign=-1.0)
        return psi, g

    def residual(self, t: np.ndarray) -> np.ndarray:
        """Projective residuals ``<Phi_mu| exp(-T) H exp(T) |Phi>``."""
        return self.project(self._transformed(t)[1])

    def projective_energy(self, t: np.ndarray) -> float:
        """``<Phi| exp(-T) H exp(T) |Phi>``."""
        return float(self._transformed(t)[1][self.reference.index])

    def jacobian(self, t: np.ndarray) -> np.ndarray:
        """Exact derivative of the residuals with respect to the amplitudes."""
        psi, g = self._transformed(t)
        n = len(self.excitations)
        jac = np.zeros((n, n))
        for k in range(n):
            column = self.operator.exp_apply(t, self.hamiltonian @ self.operator.apply_one(k, psi), sign=-1.0)
            jac[:, k] = self.project(column) - self.project(self.operator.apply_one(k, g))
        return jac

    def amplitudes_from_vector(self, vector: np.ndarray) -> np.ndarray:
        """Cluster amplitudes whose truncated ``exp(T)|Phi>`` matches ``vector``.

        Singles are the intermediate-normalized coefficients; doubles have
        the disconnected ``T1**2 / 2`` part removed.

        Raises:
            DomainError: If ``vector`` has no weight on the reference
        """
        c0 = float(np.real(vector[self.reference.index]))
        if abs(c0) < 1e-12:
            raise DomainError("Vector is orthogonal to the reference determinant")
        coefficients = np.real(self.project(vector)) / c0
        t = np.where(self._singles, coefficients, 0.0)
        if self.level == 2:
            disconnected = self.project(self.operator.exp_apply(t, self.phi))
            t = np.where(self._singles, coefficients, coefficients - disconnected)
        return t

    def initial_guess(self) -> np.ndarray:
        """Starting amplitudes for the configured guess strategy."""
        n = len(self.excitations)
        if self.guess == "zero" or n == 0:
            return np.zeros(n)

        determinant = noninteracting_determinant(self.params, self.reference)
        if determinant is None:
            logger.warning("No non-interacting filling overlaps the reference; starting from zero amplitudes")
            return np.zeros(n)
        t = self.amplitudes_from_vector(determinant)
        if self.params.u_c == 0.0:
            return t

        for k in range(self.continuation_steps):
            u_c = self.params.u_c * k / self.continuation_steps
            stage = CoupledClusterSolver(
                replace(self.params, u_c=u_c),
                self.reference,
                level=self.level,
                tol=self.tol,
                max_iter=self.max_iter,
                diis_size=self.diis_size,
                damping=self.damping,
                guess="zero",
                max_bath=self.max_bath,
            )
            try:
                t, norm, iterations = stage.iterate(t)
            except ConvergenceError as e:
                raise ConvergenceError(
                    f"CC continuation stalled at U_c={u_c:g}", e.residual_norm, e.iterations
                ) from e
            logger.debug(
                f"  continuation U_c={u_c:g}: E={stage.projective_energy(t):.10f} after {iterations} iterations"
            )
        return t

    def iterate(self, t: np.ndarray) -> Tuple[np.ndarray, float, int]:
        """Damped Newton/DIIS iteration from ``t`` until the residual reaches ``tol``.

        Returns:
            Tuple of (amplitudes, final residual norm, iteration count)

        Raises:
            ConvergenceError: If the residual does not reach ``tol`` within ``max_iter``
        """
        t = np.asarray(t, dtype=float).copy()
        residual = self.residual(t)
        norm = float(np.max(np.abs(residual))) if t.size else 0.0
        self.residual_history = [norm]
        diis = DiisExtrapolator(self.diis_size)
        diis.push(t, residual)
        alpha = self.damping
        iteration = 0

        while norm > self.tol:
            if iteration >= self.max_iter:
                raise ConvergenceError("CC amplitude equations did not converge", norm, iteration)
            iteration += 1

            step = linalg.lstsq(self.jacobian(t), -residual)[0]
            accepted = False
            for _ in range(self.MAX_BACKTRACKS):
                candidate = t + alpha * step
                candidate_residual = self.residual(candidate)
                candidate_norm = float(np.max(np.abs(candidate_residual)))
                if candidate_norm < norm:
                    t, residual, norm = candidate, candidate_residual, candidate_norm
                    alpha = min(1.0, 2.0 * alpha)
                    accepted = True
                    break
                alpha *= 0.5
            if not accepted:
                raise ConvergenceError("CC line search stalled", norm, iteration)

            diis.push(t, residual)
            extrapolated = diis.extrapolate()
            if extrapolated is not None:
                diis_residual = self.residual(extrapolated)
                diis_norm = float(np.max(np.abs(diis_residual)))
                if diis_norm < norm:
                    t, residual, norm = extrapolated, diis_residual, diis_norm
                    logger.debug(f"  DIIS extrapolation accepted (subspace {diis.size})")

            self.residual_history.append(norm)
            logger.debug(f"  iteration {iteration}: residual {norm:.3e}, step fraction {alpha:.3f}")

        return t, norm, iteration

    def solve_t(self, initial: Optional[np.ndarray] = None) -> CCAmplitudes:
        """Converge the cluster amplitudes.

        Args:
            initial: Optional explicit starting amplitudes

        Returns:
            CCAmplitudes with ``t`` and ``e_cc`` filled

        Raises:
            ConvergenceError: If the residual does not reach ``tol`` within ``max_iter``
        """
        n = len(self.excitations)
        start = self.initial_guess() if initial is None else np.asarray(initial, dtype=float)
        logger.info(
            f"CC(level={self.level}) on {self.reference.label}: {n} amplitudes, "
            f"E_ref={self.e_ref:.10f}, guess {self.guess if initial is None else 'explicit'}"
        )

        t, norm, iteration = self.iterate(start)

        e_cc = self.projective_energy(t)
        logger.info(f"CC converged in {iteration} iterations: E_CC={e_cc:.12f}, residual {norm:.3e}")
        return CCAmplitudes(
            reference=self.reference,
            level=self.level,
            excitations=list(self.excitations),
            t=t,
            e_ref=self.e_ref,
            e_cc=e_cc,
            residual_norm=norm,
            tol=self.tol,
            iterations=iteration,
            metadata={"guess": self.guess if initial is None else "explicit"},
        )

    # -- Lambda equations ------------------------------------------------

    def transformed_columns(self, t: np.ndarray) -> np.ndarray:
        """Columns ``exp(-T) H exp(T) e_mu`` for ``mu`` in ``[ref] + excitations``."""
        basis = [self.phi] + [self.excited_vector(k) for k in range(len(self.excitations))]
        columns = []
        for vec in basis:
            rotated = self.operator.exp_apply(t, vec)
            columns.append(self.operator.exp_apply(t, self.hamiltonian @ rotated, sign=-1.0))
        return np.column_stack(columns)

    def solve_lambda(self, amplitudes: CCAmplitudes) -> CCAmplitudes:
        """Solve the linear Lambda equations for converged amplitudes.

        Raises:
            StateError: If the amplitudes are not converged
            NumericalError: If the system is singular and inconsistent
        """
        if not amplitudes.converged:
            raise StateError("Lambda equations need converged T amplitudes")
        n = len(amplitudes.excitations)
        if n == 0:
            amplitudes.lam = np.zeros(0)
            amplitudes.lambda_residual_norm = 0.0
            return amplitudes

        columns = self.transformed_columns(amplitudes.t)
        b = columns[self.reference.index, 1:]
        a = np.column_stack([self.project(columns[:, 1 + k]) for k in range(n)])
        a -= amplitudes.e_cc * np.eye(n)

        condition = float(np.linalg.cond(a))
        if condition <= self.CONDITION_LIMIT:
            lam = linalg.solve(a.T, -b)
        else:
            lam = linalg.lstsq(a.T, -b)[0]
            check = float(np.max(np.abs(a.T @ lam + b)))
            if check > amplitudes.tol:
                raise NumericalError("Lambda equations are singular and inconsistent", condition)
            logger.warning(f"Lambda system ill-conditioned (cond={condition:.2e}); using minimum-norm solution")

        residual = float(np.max(np.abs(a.T @ lam + b)))
        amplitudes.lam = lam
        amplitudes.lambda_residual_norm = residual
        logger.info(f"Lambda equations solved: residual {residual:.3e}, condition {condition:.2e}")
        return amplitudes

    def solve(self, initial: Optional[np.ndarray] = None) -> CCAmplitudes:
        """Solve T and then Lambda."""
        return self.solve_lambda(self.solve_t(initial))


def solve_t_amplitudes(
    params: AimParams,
    ref: Optional[ReferenceState] = None,
    m: int = 2,
    tol: float = CoupledClusterSolver.DEFAULT_TOL,
    max_iter: int = CoupledClusterSolver.DEFAULT_MAX_ITER,
    **kwargs,
) -> CCAmplitudes:
    """Converge cluster amplitudes (see :class:`CoupledClusterSolver`)."""
    solver = CoupledClusterSolver(params, ref, level=m, tol=tol, max_iter=max_iter, **kwargs)
    return solver.solve_t()


def solve_lambda_amplitudes(
    params: AimParams,
    amplitudes: CCAmplitudes,
    m: Optional[int] = None,
    tol: Optional[float] = None,
) -> CCAmplitudes:
    """Solve the Lambda equations for converged amplitudes."""
    solver = CoupledClusterSolver(
        params,
        amplitudes.reference,
        level=amplitudes.level if m is None else m,
        tol=amplitudes.tol if tol is None else tol,
    )
    return solver.solve_lambda(amplitudes)


def impurity_single_couplings(params: AimParams, amplitudes: CCAmplitudes) -> Dict[int, float]:
    """Map amplitude position -> ``V_k`` for singles linking impurity and bath level k."""
    impurity = set(impurity_qubits(params.n_bath))
    couplings = {}
    for k, exc in enumerate(amplitudes.excitations):
        if exc.rank != 1:
            continue
        (i,), (a,) = exc.holes, exc.particles
        if (i in impurity) == (a in impurity):
            continue
        bath = a if i in impurity else i
        couplings[k] = params.v[qubit_level(bath, params.n_bath) - 1]
    return couplings


def cc_energy(params: AimParams, amplitudes: CCAmplitudes) -> float:
    """``E_ref + sum_k V_k t`` over impurity-bath singles.

    Raises:
        StateError: If the amplitudes are not converged
    """
    if not amplitudes.converged:
        raise StateError(
            f"Amplitudes are not converged (residual {amplitudes.residual_norm:.3e} > tol {amplitudes.tol:.3e})"
        )
    couplings = impurity_single_couplings(params, amplitudes)
    return amplitudes.e_ref + sum(v * amplitudes.t[k] for k, v in couplings.items())
