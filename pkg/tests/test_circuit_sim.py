"""Tests for statevector emulation and time evolution."""

import numpy as np
import pytest

from src.mapping.pauli import PauliString
from src.model.aim import build_hamiltonian
from src.simulation.circuit_sim import (
    EvolutionConfig,
    EvolutionMode,
    ExactEvolution,
    StateVector,
    TrotterEvolution,
    TrotterSplit,
    apply_pauli,
    controlled,
    exact_propagator,
    split_layers,
    trotter_evolve,
)
from src.utils.exceptions import DomainError

from .conftest import BENCHMARKS


class TestStateVector:
    """Tests for StateVector and Pauli application."""

    def test_basis(self):
        """Test basis-state construction from an occupation list."""
        state = StateVector.basis([0, 1, 1, 0], 4)

        assert state.amplitudes[6] == 1.0
        assert state.norm() == pytest.approx(1.0)

    def test_wrong_size(self):
        """Test that mismatched amplitudes are rejected."""
        with pytest.raises(DomainError):
            StateVector(np.zeros(3), 2)

    def test_apply_pauli(self):
        """Test X on qubit 0 flips the most significant bit."""
        state = StateVector.basis(0, 2)

        result = apply_pauli(state, PauliString("XI"))

        assert result.inner(StateVector.basis(2, 2)) == pytest.approx(1.0)

    def test_apply_pauli_size_mismatch(self):
        """Test that register sizes must agree."""
        with pytest.raises(DomainError):
            apply_pauli(StateVector.basis(0, 2), PauliString("XII"))


class TestControlled:
    """Tests for controlled operations."""

    def test_block_structure(self):
        """Test |0><0| x I + |1><1| x U with the control first."""
        matrix = controlled(PauliString("X"))

        expected = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
        np.testing.assert_allclose(matrix, expected)

    def test_control_last(self):
        """Test a control on the last qubit."""
        matrix = controlled(PauliString("X"), control=1, targets=[0], n_total=2)

        # |01> -> |11>
        assert matrix[3, 1] == pytest.approx(1.0)
        assert matrix[0, 0] == pytest.approx(1.0)

    def test_control_in_targets(self):
        """Test that overlapping control and target raise."""
        with pytest.raises(DomainError):
            controlled(PauliString("X"), control=0, targets=[0], n_total=2)


class TestEvolutionConfig:
    """Tests for EvolutionConfig validation."""

    def test_invalid_sign(self):
        """Test that the exponent sign must be +-1."""
        with pytest.raises(DomainError):
            EvolutionConfig(t=1.0, sign=0)

    def test_invalid_steps(self):
        """Test that Trotter steps must be positive."""
        with pytest.raises(DomainError):
            EvolutionConfig(t=1.0, r=0)

    def test_mode_from_string(self):
        """Test mode coercion."""
        assert EvolutionConfig(t=1.0, mode="trotter").mode == EvolutionMode.TROTTER


class TestExactEvolution:
    """Tests for the exact propagator."""

    def test_identity_at_zero(self):
        """Test U(0) = 1."""
        params = BENCHMARKS["two_site"]
        unitary = exact_propagator(params, EvolutionConfig(t=0.0))

        np.testing.assert_allclose(unitary, np.eye(params.dim), atol=1e-12)

    def test_unitary(self):
        """Test U U^ = 1."""
        params = BENCHMARKS["three_site_symmetric"]
        unitary = exact_propagator(params, EvolutionConfig(t=0.7, e_cc=3.0))

        np.testing.assert_allclose(unitary @ unitary.conj().T, np.eye(params.dim), atol=1e-10)

    def test_energy_phase(self):
        """Test that E_CC contributes a global phase."""
        params = BENCHMARKS["two_site"]
        plain = exact_propagator(params, EvolutionConfig(t=0.3))
        shifted = exact_propagator(params, EvolutionConfig(t=0.3, e_cc=2.0))

        np.testing.assert_allclose(shifted, np.exp(1j * 2 * np.pi * 2.0 * 0.3) * plain, atol=1e-12)

    def test_expectation_series(self):
        """Test the all-times expectation against explicit propagation."""
        _, hamiltonian = build_hamiltonian(BENCHMARKS["two_site"])
        evolution = ExactEvolution(hamiltonian)
        rng = np.random.default_rng(3)
        bra, ket = rng.normal(size=16), rng.normal(size=16)
        times = np.array([0.0, 0.1, 0.25])

        series = evolution.expectation_series(bra, ket, times, sign=1)

        expected = [np.vdot(bra, evolution.evolve(ket, t, sign=1)) for t in times]
        np.testing.assert_allclose(series, expected, atol=1e-12)


class TestTrotterEvolution:
    """Tests for the second-order product formula."""

    def test_second_order_convergence(self):
        """Test that doubling the substeps quarters the error."""
        params = BENCHMARKS["two_site"]
        _, hamiltonian = build_hamiltonian(params)
        exact = ExactEvolution(hamiltonian).unitary(0.01, sign=-1)

        errors = [
            np.linalg.norm(TrotterEvolution(params, r).step_unitary(0.01, -1) - exact, 2)
            for r in (8, 16)
        ]

        assert 3.5 <= errors[0] / errors[1] <= 4.5

    def test_evolve_matches_unitary(self):
        """Test vector evolution against the dense step product."""
        params = BENCHMARKS["three_site_asymmetric"]
        evolution = TrotterEvolution(params, 4)
        rng = np.random.default_rng(11)
        vector = rng.normal(size=params.dim) + 1j * rng.normal(size=params.dim)

        np.testing.assert_allclose(
            evolution.evolve(vector, 0.2, sign=1, e_cc=1.5),
            evolution.unitary(0.2, sign=1, e_cc=1.5) @ vector,
            atol=1e-10,
        )

    def test_trotter_evolve(self):
        """Test the functional wrapper."""
        params = BENCHMARKS["two_site"]
        state = StateVector.basis([0, 1, 1, 0], 4)
        cfg = EvolutionConfig(t=0.5, r=3, sign=-1, mode=EvolutionMode.TROTTER)

        result = trotter_evolve(state, params, cfg)

        expected = TrotterEvolution(params, 3).unitary(0.5, -1) @ state.amplitudes
        np.testing.assert_allclose(result.amplitudes, expected, atol=1e-12)
        assert result.norm() == pytest.approx(1.0)

    def test_trotter_evolve_requires_trotter_mode(self):
        """Test that the exact mode is refused."""
        with pytest.raises(DomainError):
            trotter_evolve(StateVector.basis(6, 4), BENCHMARKS["two_site"], EvolutionConfig(t=0.5))

    def test_exact_for_commuting_split(self):
        """Test that zero hopping makes the split exact."""
        params = BENCHMARKS["atomic_limit"]
        _, hamiltonian = build_hamiltonian(params)

        np.testing.assert_allclose(
            TrotterEvolution(params, 1).step_unitary(0.4, -1),
            ExactEvolution(hamiltonian).unitary(0.4, -1),
            atol=1e-12,
        )

    @pytest.mark.parametrize("split", ["potential", "interaction"])
    def test_split_layers_rebuild_hamiltonian(self, split):
        """Test that the diagonal and inner layers add up to H."""
        params = BENCHMARKS["three_site_asymmetric"]
        _, hamiltonian = build_hamiltonian(params)

        diagonal, inner = split_layers(params, split)

        np.testing.assert_allclose(np.diag(diagonal) + inner, hamiltonian, atol=1e-12)

    def test_interaction_layer_is_u_only(self):
        """Test that the interaction split keeps only U_c on the diagonal."""
        params = BENCHMARKS["two_site"]

        diagonal, _ = split_layers(params, TrotterSplit.INTERACTION)

        assert sorted(set(diagonal)) == [0.0, params.u_c]

    def test_interaction_split_converges(self):
        """Test second-order convergence of the interaction split."""
        params = BENCHMARKS["three_site_symmetric"]
        _, hamiltonian = build_hamiltonian(params)
        exact = ExactEvolution(hamiltonian).unitary(0.01, sign=-1)

        errors = [
            np.linalg.norm(TrotterEvolution(params, r, split="interaction").step_unitary(0.01, -1) - exact, 2)
            for r in (8, 16)
        ]

        assert 3.5 <= errors[0] / errors[1] <= 4.5

    def test_unknown_split(self):
        """Test that an unknown split name is rejected."""
        with pytest.raises(ValueError):
            TrotterEvolution(BENCHMARKS["two_site"], 1, split="kinetic")
