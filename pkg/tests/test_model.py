"""Tests for the impurity model, Fock helpers and configuration loading."""

import numpy as np
import pytest

from src.mapping.jordan_wigner import alpha_norm, pauli_decomposition, pauli_sum_matrix
from src.model.aim import (
    AimParams,
    FermionTerm,
    Spin,
    build_hamiltonian,
    canonical_form,
    hamiltonian_terms,
    is_hermitian,
    jw_qubit_index,
    particle_sector_check,
    reference_state,
    spin_sector_check,
)
from src.model.fock import apply_ladder_bits, basis_index, index_to_bits, operator_matrix, sz_diagonal
from src.model.series import GreensSeries, TimeGrid
from src.utils.exceptions import ConfigError, DomainError, ResourceLimitError
from src.utils.helpers import config_hash, deep_merge, format_bitstring, load_config, parse_bitstring

from .conftest import BENCHMARKS


class TestAimParams:
    """Tests for AimParams dataclass."""

    def test_from_dict_infers_bath_size(self):
        """Test that a null n_bath is taken from the on-site energies."""
        params = AimParams.from_dict({"n_bath": None, "u_c": 8, "eps": [4, 3.61, 4.39], "v": [0.63, 0.63]})

        assert params.n_bath == 2
        assert params.n_qubits == 6
        assert params.dim == 64

    def test_mismatched_lengths(self):
        """Test that inconsistent parameter lengths are rejected."""
        with pytest.raises(DomainError):
            AimParams(n_bath=2, u_c=8.0, eps=(4.0, 0.0), v=(1.0,))
        with pytest.raises(DomainError):
            AimParams(n_bath=1, u_c=8.0, eps=(4.0, 0.0), v=())

    def test_non_finite(self):
        """Test that NaN parameters are rejected."""
        with pytest.raises(DomainError):
            AimParams(n_bath=1, u_c=float("nan"), eps=(4.0, 0.0), v=(1.0,))

    def test_to_dict(self):
        """Test conversion to dictionary."""
        result = BENCHMARKS["two_site"].to_dict()

        assert result == {"n_bath": 1, "u_c": 8.0, "eps": [4.0, 0.0], "v": [1.0]}


class TestJordanWignerLayout:
    """Tests for spin-orbital to qubit assignment."""

    def test_qubit_index(self):
        """Test down block first, impurity first within a block."""
        assert jw_qubit_index(0, Spin.DOWN, 1) == 0
        assert jw_qubit_index(1, Spin.DOWN, 1) == 1
        assert jw_qubit_index(0, Spin.UP, 1) == 2
        assert jw_qubit_index(2, Spin.UP, 2) == 5

    def test_level_out_of_range(self):
        """Test that an invalid level raises."""
        with pytest.raises(DomainError):
            jw_qubit_index(2, Spin.DOWN, 1)

    def test_bit_order(self):
        """Test that qubit 0 is the most significant bit."""
        assert basis_index([0, 1, 1, 0]) == 6
        assert index_to_bits(6, 4) == (0, 1, 1, 0)
        assert format_bitstring(6, 4) == "|0110>"
        assert parse_bitstring("|0110>") == [0, 1, 1, 0]

    def test_ladder_sign(self):
        """Test the Jordan-Wigner parity sign of an annihilator."""
        # c_2 on |0110>: one occupied qubit before qubit 2
        sign, index = apply_ladder_bits(6, [(2, False)], 4)

        assert sign == -1
        assert index == basis_index([0, 1, 0, 0])

    def test_annihilating_empty_orbital(self):
        """Test that annihilating an empty orbital gives sign 0."""
        sign, _ = apply_ladder_bits(6, [(0, False)], 4)
        assert sign == 0


class TestReferenceState:
    """Tests for the default reference determinant."""

    def test_two_site(self):
        """Test the two-site reference."""
        ref = reference_state(BENCHMARKS["two_site"])

        assert ref.label == "|0110>"
        assert ref.occupied == (1, 2)
        assert ref.virtual == (0, 3)
        assert ref.occupied_impurity() == 2

    def test_three_site(self):
        """Test the three-site references."""
        for name in ("three_site_symmetric", "three_site_asymmetric"):
            ref = reference_state(BENCHMARKS[name])
            assert ref.label == "|110010>"
            assert ref.occupied_impurity() == 0

    def test_explicit_occupation(self):
        """Test an explicit occupation string."""
        ref = reference_state(BENCHMARKS["two_site"], occupation="1001")

        assert ref.occupied == (0, 3)
        assert ref.n_electrons == 2

    def test_explicit_occupation_wrong_count(self):
        """Test that an inconsistent electron count is rejected."""
        with pytest.raises(DomainError):
            reference_state(BENCHMARKS["two_site"], n_electrons=3, occupation="1001")

    def test_overfilled(self):
        """Test that more electrons than orbitals are rejected."""
        with pytest.raises(DomainError):
            reference_state(BENCHMARKS["two_site"], n_electrons=5)


class TestHamiltonian:
    """Tests for Hamiltonian assembly."""

    def test_hermitian_and_number_conserving(self):
        """Test structural properties for every benchmark."""
        for params in BENCHMARKS.values():
            terms, matrix = build_hamiltonian(params)
            assert is_hermitian(terms)
            np.testing.assert_allclose(matrix, matrix.T, atol=1e-14)
            assert particle_sector_check(matrix, params.n_qubits)

    def test_reference_energy(self):
        """Test the diagonal element of the two-site reference."""
        _, matrix = build_hamiltonian(BENCHMARKS["two_site"])
        ref = reference_state(BENCHMARKS["two_site"])

        assert matrix[ref.index, ref.index] == pytest.approx(4.0)

    def test_zero_hybridization_drops_hopping(self):
        """Test that vanishing couplings leave no hopping terms."""
        terms = hamiltonian_terms(BENCHMARKS["atomic_limit"])
        assert all(len(t.operators) != 2 or t.operators[0][0] == t.operators[1][0] for t in terms)

    def test_bath_cap(self):
        """Test that oversized models are refused."""
        with pytest.raises(ResourceLimitError):
            build_hamiltonian(BENCHMARKS["three_site_symmetric"], max_bath=1)

    def test_anticommutator(self):
        """Test c c^ = 1 - c^ c after normal ordering."""
        form = canonical_form([FermionTerm(1.0, ((0, False), (0, True)))])

        assert form == {(): 1.0, ((0, True), (0, False)): -1.0}

    def test_operator_matrix_anticommutes(self):
        """Test {c_0, c_1^} = 0 on dense matrices."""
        a = operator_matrix([(0, False)], 3)
        b = operator_matrix([(1, True)], 3)

        np.testing.assert_allclose(a @ b + b @ a, 0.0)

    @pytest.mark.parametrize("name", list(BENCHMARKS))
    def test_commutes_with_sz(self, name):
        """Test that every benchmark Hamiltonian conserves S_z."""
        params = BENCHMARKS[name]
        _, matrix = build_hamiltonian(params)
        sz = np.diag(sz_diagonal(params.n_bath))

        np.testing.assert_allclose(matrix @ sz - sz @ matrix, 0.0, atol=1e-12)
        assert spin_sector_check(matrix, params.n_bath)

    def test_spin_flip_breaks_sz(self):
        """Test that a spin-flip hopping term is detected."""
        matrix = operator_matrix([(0, True), (2, False)], 4)
        matrix = matrix + matrix.T

        assert particle_sector_check(matrix, 4)
        assert not spin_sector_check(matrix, 1)

    def test_sz_of_references(self):
        """Test 2 S_z of the default two- and three-site references."""
        two = reference_state(BENCHMARKS["two_site"])
        three = reference_state(BENCHMARKS["three_site_symmetric"])

        assert sz_diagonal(1)[two.index] == 0.0
        assert sz_diagonal(2)[three.index] == -1.0

    @pytest.mark.parametrize("n_bath", [0, 1, 2])
    def test_canonical_anticommutation(self, n_bath):
        """Test {c_p, c_q^} = delta_pq and {c_p, c_q} = 0 for every pair of spin-orbitals."""
        n = 2 * (n_bath + 1)
        lower = [operator_matrix([(p, False)], n) for p in range(n)]
        identity = np.eye(1 << n)

        for p in range(n):
            for q in range(n):
                mixed = lower[p] @ lower[q].T + lower[q].T @ lower[p]
                same = lower[p] @ lower[q] + lower[q] @ lower[p]
                np.testing.assert_allclose(mixed, identity if p == q else 0.0, atol=1e-14)
                np.testing.assert_allclose(same, 0.0, atol=1e-14)

    def test_creator_is_adjoint(self):
        """Test that the creation matrix is the transpose of the annihilation matrix."""
        for p in range(4):
            np.testing.assert_allclose(operator_matrix([(p, True)], 4), operator_matrix([(p, False)], 4).T)


class TestPauliDecomposition:
    """Tests for the Jordan-Wigner Pauli sum."""

    def test_matches_dense_matrix(self):
        """Test that the Pauli sum rebuilds the Hamiltonian."""
        for params in BENCHMARKS.values():
            terms, matrix = build_hamiltonian(params)
            decomposition = pauli_decomposition(terms, params.n_qubits)
            np.testing.assert_allclose(pauli_sum_matrix(decomposition, params.n_qubits), matrix, atol=1e-12)

    def test_alpha_norm_two_site(self):
        """Test the one-norm of the two-site Pauli coefficients."""
        params = BENCHMARKS["two_site"]
        decomposition = pauli_decomposition(hamiltonian_terms(params), params.n_qubits)

        assert decomposition["ZIZI"] == pytest.approx(2.0)
        assert decomposition["XXII"] == pytest.approx(0.5)
        assert alpha_norm(decomposition) == pytest.approx(12.0)


class TestTimeGrid:
    """Tests for TimeGrid and GreensSeries."""

    def test_from_horizon(self):
        """Test that the horizon is included."""
        grid = TimeGrid.from_horizon(0.5, 2.0)

        assert grid.n_points == 5
        assert grid.horizon == pytest.approx(2.0)
        np.testing.assert_allclose(grid.times, [0.0, 0.5, 1.0, 1.5, 2.0])

    def test_from_times_non_uniform(self):
        """Test that non-uniform samples are rejected."""
        with pytest.raises(DomainError):
            TimeGrid.from_times([0.0, 0.1, 0.3])

    def test_from_times_offset(self):
        """Test that grids must start at zero."""
        with pytest.raises(DomainError):
            TimeGrid.from_times([0.1, 0.2, 0.3])

    def test_series_total_and_frame(self):
        """Test total and tabular form of a series."""
        series = GreensSeries(times=[0.0, 1.0], lesser=[1.0, 0.5j], greater=[0.0, 0.25])
        frame = series.to_frame()

        np.testing.assert_allclose(series.total, [1.0, 0.25 + 0.5j])
        assert list(frame.columns[:3]) == ["t", "re_g", "im_g"]
        assert frame["stderr_re"].isna().all()

    def test_series_length_mismatch(self):
        """Test that misaligned arrays are rejected."""
        with pytest.raises(DomainError):
            GreensSeries(times=[0.0, 1.0], lesser=[1.0], greater=[0.0, 0.0])


class TestConfigLoading:
    """Tests for YAML loading and merging."""

    def test_defaults(self):
        """Test that the packaged defaults load."""
        config = load_config()

        assert config["schema_version"] == 1
        assert config["model"]["u_c"] == 8.0

    def test_deep_merge_unknown_key(self):
        """Test that unknown keys are rejected with their dotted path."""
        with pytest.raises(ConfigError, match="model.bogus"):
            deep_merge({"model": {"u_c": 8.0}}, {"model": {"bogus": 1}})

    def test_yaml_syntax_error(self, tmp_path):
        """Test that YAML errors carry a line number."""
        path = tmp_path / "bad.yaml"
        path.write_text("model:\n  u_c: [1, 2\n")

        with pytest.raises(ConfigError) as excinfo:
            load_config(str(path))

        assert excinfo.value.line is not None

    def test_missing_file(self, tmp_path):
        """Test that a missing file raises FileNotFoundError."""
        with pytest.raises(FileNotFoundError):
            load_config(str(tmp_path / "missing.yaml"))

    def test_hash_is_order_independent(self):
        """Test that key order does not change the hash."""
        assert config_hash({"a": 1, "b": 2}) == config_hash({"b": 2, "a": 1})
        assert len(config_hash({"a": 1})) == 16
