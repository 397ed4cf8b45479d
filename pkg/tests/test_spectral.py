"""Tests for the spectral function and peak matching."""

import numpy as np
import pytest

from src.analysis.spectral import (
    SpectralSeries,
    find_peak_positions,
    lehmann_curve,
    match_peaks,
    spectral_function,
)
from src.exact.ed_oracle import ExactDiagonalizationSolver, exact_greens
from src.measurement.greens import GreensFunctionEstimator
from src.model.series import GreensSeries, TimeGrid
from src.utils.exceptions import DomainError

from .conftest import BENCHMARKS

GRID = TimeGrid.from_horizon(0.03, 50.0)


class TestSpectralFunction:
    """Tests for spectral_function."""

    def test_sum_rule(self, benchmark):
        """Test that the rectangle integral equals Re G(0)."""
        p = benchmark.p
        series = exact_greens(benchmark.params, p, p, TimeGrid.from_horizon(0.03, 10.0), benchmark.reference)

        spectral = spectral_function(series)

        assert np.sum(spectral.a) * spectral.bin_width == pytest.approx(series.total[0].real, abs=1e-10)

    def test_atomic_limit_peaks(self):
        """Test spin-summed peaks at eps and eps + U."""
        params = BENCHMARKS["atomic_limit"]
        up = spectral_function(exact_greens(params, 2, 2, GRID))
        down = spectral_function(exact_greens(params, 0, 0, GRID))

        peaks = find_peak_positions(up + down)

        assert len(peaks) == 2
        np.testing.assert_allclose(peaks, [4.0, 12.0], atol=0.01)

    def test_peaks_match_poles(self, coupled):
        """Test hybrid spectral peaks against the broadened pole sum."""
        p = coupled.p
        series = GreensFunctionEstimator(coupled.params, coupled.amplitudes).series(p, p, GRID)
        spectral = spectral_function(series)
        lehmann = ExactDiagonalizationSolver(coupled.params, coupled.reference).lehmann(p)
        reference = SpectralSeries(spectral.omega, lehmann_curve(lehmann, spectral.omega), 0.1, 4)

        peaks = find_peak_positions(spectral)
        expected = find_peak_positions(reference, rel_prominence=0.1)

        assert len(expected) > 0
        assert match_peaks(peaks, expected, tolerance=0.05)

    def test_fft_heights_match_lehmann_curve(self, coupled):
        """Test FFT spectral heights at the broadened-pole maxima to within 2%."""
        p = coupled.p
        series = GreensFunctionEstimator(coupled.params, coupled.amplitudes).series(p, p, GRID)
        spectral = spectral_function(series)
        lehmann = ExactDiagonalizationSolver(coupled.params, coupled.reference).lehmann(p)
        curve = lehmann_curve(lehmann, spectral.omega)

        expected = find_peak_positions(SpectralSeries(spectral.omega, curve, 0.1, 4), rel_prominence=0.1)
        indices = np.searchsorted(spectral.omega, expected)

        assert len(indices) > 0
        np.testing.assert_allclose(spectral.a[indices], curve[indices], rtol=0.02)

    def test_linearity(self):
        """Test that real combinations of series give the same combination of spectra."""
        grid = TimeGrid.from_horizon(0.05, 10.0)
        first = exact_greens(BENCHMARKS["two_site"], 2, 2, grid)
        second = exact_greens(BENCHMARKS["atomic_limit"], 0, 0, grid)
        combined = GreensSeries(
            times=grid.times,
            lesser=0.3 * first.lesser - 1.7 * second.lesser,
            greater=0.3 * first.greater - 1.7 * second.greater,
        )

        result = spectral_function(combined)

        expected = 0.3 * spectral_function(first).a - 1.7 * spectral_function(second).a
        np.testing.assert_allclose(result.a, expected, atol=1e-10)

    def test_sum_of_spectra(self):
        """Test that adding spectra equals transforming the summed series."""
        grid = TimeGrid.from_horizon(0.05, 10.0)
        first = exact_greens(BENCHMARKS["two_site"], 2, 2, grid)
        second = exact_greens(BENCHMARKS["two_site"], 0, 0, grid)
        summed = GreensSeries(
            times=grid.times,
            lesser=first.lesser + second.lesser,
            greater=first.greater + second.greater,
        )

        total = spectral_function(first) + spectral_function(second)

        np.testing.assert_allclose(total.a, spectral_function(summed).a, atol=1e-10)

    def test_direct_matches_fft(self):
        """Test the explicit-frequency sum against the FFT path."""
        series = exact_greens(BENCHMARKS["two_site"], 2, 2, TimeGrid.from_horizon(0.05, 5.0))
        fft = spectral_function(series, padding=2)

        direct = spectral_function(series, omega_grid=fft.omega)

        np.testing.assert_allclose(direct.a, fft.a, atol=1e-9)
        assert direct.metadata["method"] == "direct"
        assert fft.metadata["method"] == "fft"

    def test_single_lorentzian(self):
        """Test the height of a single broadened pole."""
        times = TimeGrid.from_horizon(0.01, 40.0).times
        series = GreensSeries(times=times, lesser=np.exp(1j * 2 * np.pi * 3.0 * times), greater=np.zeros_like(times))

        spectral = spectral_function(series, delta=0.2, omega_grid=[3.0])

        assert spectral.a[0] == pytest.approx(1.0 / (np.pi * 0.2), rel=1e-3)

    def test_invalid_inputs(self):
        """Test that bad broadening, padding and grids raise."""
        series = exact_greens(BENCHMARKS["two_site"], 2, 2, [0.0, 0.1, 0.2])
        with pytest.raises(DomainError):
            spectral_function(series, delta=0.0)
        with pytest.raises(DomainError):
            spectral_function(series, padding=0)
        with pytest.raises(DomainError):
            spectral_function(GreensSeries(times=[0.0, 0.1, 0.3], lesser=[1, 1, 1], greater=[0, 0, 0]))
        with pytest.raises(DomainError):
            spectral_function(GreensSeries(times=[0.0], lesser=[1.0], greater=[0.0]))


class TestSpectralSeries:
    """Tests for SpectralSeries helpers."""

    def test_add_requires_same_grid(self):
        """Test that series on different grids cannot be added."""
        a = SpectralSeries(np.linspace(0, 1, 5), np.ones(5), 0.1, 4)
        b = SpectralSeries(np.linspace(0, 2, 5), np.ones(5), 0.1, 4)

        with pytest.raises(DomainError):
            a + b

    def test_to_frame(self):
        """Test the tabular form."""
        frame = SpectralSeries(np.array([0.0, 1.0]), np.array([0.5, 0.25]), 0.1, 4).to_frame()

        assert list(frame.columns) == ["omega", "a"]


class TestPeaks:
    """Tests for peak finding and matching."""

    def test_empty_window(self):
        """Test that a window without samples returns None."""
        spectral = SpectralSeries(np.linspace(0, 1, 11), np.ones(11), 0.1, 4)

        assert find_peak_positions(spectral, window=(5.0, 6.0)) is None

    def test_window(self):
        """Test that only peaks inside the window are reported."""
        omega = np.linspace(0, 10, 1001)
        a = np.exp(-((omega - 2.0) ** 2) / 0.01) + np.exp(-((omega - 7.0) ** 2) / 0.01)
        spectral = SpectralSeries(omega, a, 0.1, 4)

        np.testing.assert_allclose(find_peak_positions(spectral, window=(5.0, 10.0)), [7.0])

    def test_match_peaks(self):
        """Test one-directional matching of poles to peaks."""
        assert match_peaks([1.0, 2.0, 5.0], [1.02, 4.97], tolerance=0.05)
        assert not match_peaks([1.0], [1.0, 3.0], tolerance=0.05)
        assert match_peaks([], [], tolerance=0.05)
        assert not match_peaks([], [1.0], tolerance=0.05)
