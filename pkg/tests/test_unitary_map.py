"""Tests for Pauli strings and the unitary expansion of the Green's-function vectors."""

import numpy as np
import pytest

from src.mapping.pauli import PauliString, majorana_product, majorana_x
from src.mapping.unitary_map import (
    BraMethod,
    ExpansionMode,
    GreensPart,
    bra_oracle,
    bra_weights,
    build_greater_lcu,
    build_lesser_lcu,
    full_expansion_size,
    ket_oracle,
    t1_only_size,
    t_tilde,
)
from src.model.fock import operator_matrix
from src.utils.exceptions import DomainError


class TestPauliString:
    """Tests for PauliString class."""

    def test_product_phase(self):
        """Test XY = iZ."""
        product = PauliString("X") * PauliString("Y")

        assert product == PauliString("Z", 1)
        assert product.label == "iZ"

    def test_from_label(self):
        """Test label parsing with phases."""
        assert PauliString.from_label("-iZZXI") == PauliString("ZZXI", 3)
        assert PauliString.from_label("XI").phase == 0
        with pytest.raises(DomainError):
            PauliString.from_label("iQ")

    def test_apply_matches_matrix(self):
        """Test vector application against the dense matrix."""
        rng = np.random.default_rng(7)
        vector = rng.normal(size=8) + 1j * rng.normal(size=8)
        pauli = PauliString("XYZ", 1)

        np.testing.assert_allclose(pauli.apply(vector), pauli.to_matrix() @ vector)

    def test_act_on_basis(self):
        """Test basis action against the dense matrix."""
        pauli = PauliString("YZX")
        matrix = pauli.to_matrix()
        for index in range(8):
            phase, target = pauli.act_on_basis(index)
            assert matrix[target, index] == pytest.approx(phase)

    def test_invalid_letters(self):
        """Test that unknown letters are rejected."""
        with pytest.raises(DomainError):
            PauliString("XA")


class TestMajorana:
    """Tests for Majorana-X strings."""

    def test_label(self):
        """Test the Jordan-Wigner string layout."""
        assert majorana_x(2, 4).label == "ZZXI"
        assert majorana_x(0, 3).label == "XII"

    def test_is_c_plus_c_dagger(self):
        """Test that X~_j equals c_j + c_j^."""
        expected = operator_matrix([(1, False)], 3) + operator_matrix([(1, True)], 3)

        np.testing.assert_allclose(majorana_x(1, 3).to_matrix(), expected)

    def test_product_is_real(self):
        """Test that Majorana products have real matrices."""
        product = majorana_product([3, 0, 2], 4)

        np.testing.assert_allclose(product.to_matrix().imag, 0.0)

    def test_out_of_range(self):
        """Test that an invalid orbital raises."""
        with pytest.raises(DomainError):
            majorana_x(4, 4)


class TestKetBraIdentity:
    """Tests that the expansions reproduce the exact CC vectors."""

    @pytest.mark.parametrize("mode", [ExpansionMode.FULL, ExpansionMode.T1_ONLY])
    def test_lesser(self, benchmark, mode):
        """Test sum mu W|Phi> = c_p exp(T)|Phi> and the bra analogue."""
        p = benchmark.p
        expansion = build_lesser_lcu(p, p, benchmark.amplitudes, mode)

        np.testing.assert_allclose(
            expansion.ket_vector(benchmark.reference),
            ket_oracle(GreensPart.LESSER, p, benchmark.amplitudes, mode),
            atol=1e-12,
        )
        np.testing.assert_allclose(
            expansion.bra_vector(benchmark.reference),
            bra_oracle(GreensPart.LESSER, p, benchmark.amplitudes, mode),
            atol=1e-12,
        )

    @pytest.mark.parametrize("mode", [ExpansionMode.FULL, ExpansionMode.T1_ONLY])
    def test_greater(self, benchmark, mode):
        """Test the greater-part ket and bra expansions."""
        p = benchmark.p
        expansion = build_greater_lcu(p, p, benchmark.amplitudes, mode)

        np.testing.assert_allclose(
            expansion.ket_vector(benchmark.reference),
            ket_oracle(GreensPart.GREATER, p, benchmark.amplitudes, mode),
            atol=1e-12,
        )
        np.testing.assert_allclose(
            expansion.bra_vector(benchmark.reference),
            bra_oracle(GreensPart.GREATER, p, benchmark.amplitudes, mode),
            atol=1e-12,
        )

    def test_closed_form_bra_matches_projection(self, coupled):
        """Test closed-form bra coefficients against direct projection."""
        closed = bra_weights(coupled.amplitudes, BraMethod.CLOSED_FORM)
        projected = bra_weights(coupled.amplitudes, BraMethod.PROJECTION)

        assert [exc for exc, _ in closed] == [exc for exc, _ in projected]
        np.testing.assert_allclose([w for _, w in closed], [w for _, w in projected], atol=1e-12)


class TestExpansionShape:
    """Tests for expansion sizes and structure."""

    def test_two_site_sizes(self, two_site):
        """Test the two-site expansion size and distinct pair count."""
        expansion = build_lesser_lcu(2, 2, two_site.amplitudes)

        assert expansion.size == 2
        assert expansion.pair_count() == 3
        assert full_expansion_size(two_site.reference) == 3

    def test_three_site_sizes(self, three_site):
        """Test the three-site expansion size and distinct pair count."""
        expansion = build_lesser_lcu(0, 0, three_site.amplitudes)

        assert expansion.size == 6
        assert expansion.pair_count() == 21
        assert full_expansion_size(three_site.reference) == 10

    def test_t1_only_size(self, three_site):
        """Test the impurity-singles expansion size."""
        expansion = build_lesser_lcu(0, 0, three_site.amplitudes, ExpansionMode.T1_ONLY)

        assert expansion.size == t1_only_size(three_site.amplitudes, 0)
        assert all(term.tier <= 1 for term in expansion.ket)

    def test_tiers_sorted(self, three_site):
        """Test that terms are ordered by excitation rank."""
        expansion = build_lesser_lcu(0, 0, three_site.amplitudes)
        tiers = [term.tier for term in expansion.ket]

        assert tiers == sorted(tiers)
        assert tiers[0] == 0

    def test_unitaries_are_real(self, three_site):
        """Test that every expansion unitary is a real matrix."""
        expansion = build_greater_lcu(0, 0, three_site.amplitudes)
        for term in expansion.ket + expansion.bra:
            np.testing.assert_allclose(term.unitary.to_matrix().imag, 0.0)

    def test_greater_empty_without_amplitudes(self, atomic_limit):
        """Test that T = 0 leaves no greater-part terms."""
        expansion = build_greater_lcu(2, 2, atomic_limit.amplitudes)

        assert expansion.is_empty

    def test_unoccupied_orbital(self, two_site):
        """Test that an empty reference orbital is rejected."""
        with pytest.raises(DomainError):
            build_lesser_lcu(0, 0, two_site.amplitudes)

    def test_to_frame(self, two_site):
        """Test the tabular dump of an expansion."""
        frame = build_lesser_lcu(2, 2, two_site.amplitudes).to_frame()

        assert list(frame["side"].unique()) == ["bra", "ket"]
        assert len(frame) == 4
        assert set(frame.columns) >= {"coefficient", "pauli", "tier"}

    def test_t_tilde(self, two_site):
        """Test the effective doubles of the two-site reference."""
        amplitudes = two_site.amplitudes

        result = t_tilde(amplitudes)

        assert list(result) == [(1, 2, 0, 3)]
        assert result[(1, 2, 0, 3)] == pytest.approx(
            amplitudes.t_double(1, 2, 0, 3) + amplitudes.t_single(1, 0) * amplitudes.t_single(2, 3)
        )
