import math

import numpy as np
import pytest

from boundstate_lab.constants import E_TO_E
from boundstate_lab.core.numgrid import (
    apply_multiplier,
    evaluate_symbol,
    hermite_basis,
    hermite_functions,
    make_annuli,
    make_space_grid,
    mirror_symbol,
    multiplier_matrix,
    trig_interpolate,
)
from boundstate_lab.exceptions import (
    BadDimensionError,
    InvalidParameterError,
    NonEvenSymbolError,
    NonfiniteSymbolError,
    NonpositiveLError,
    OddNError,
    ShapeMismatchError,
)


class TestSpaceGrid:
    def test_geometry(self, grid_1d):
        assert grid_1d.h == pytest.approx(40 / 128)
        assert grid_1d.axis[0] == -20
        assert grid_1d.axis[-1] < 20
        assert grid_1d.size == 128
        assert grid_1d.freq.spacing == pytest.approx(math.pi / 20)
        assert grid_1d.freq.nyquist == pytest.approx(math.pi * 128 / 40)

    def test_2d_layout(self, grid_2d):
        assert grid_2d.nodes.shape == (256, 2)
        assert grid_2d.freq.norms.shape == (16, 16)
        # row-major: the second coordinate runs fastest
        assert grid_2d.nodes[1, 0] == grid_2d.nodes[0, 0]
        assert grid_2d.nodes[1, 1] > grid_2d.nodes[0, 1]

    @pytest.mark.parametrize(
        ("d", "L", "N", "error"),
        [
            (3, 4, 16, BadDimensionError),
            (1, 0, 16, NonpositiveLError),
            (1, -2, 16, NonpositiveLError),
            (1, 4, 15, OddNError),
            (1, 4, 6, OddNError),
        ],
    )
    def test_rejects_bad_parameters(self, d, L, N, error):
        with pytest.raises(error):
            make_space_grid(d, L, N)


class TestMultipliers:
    def test_second_derivative_of_cosine(self, grid_1d):
        xi = 3 * grid_1d.freq.spacing
        u = np.cos(xi * grid_1d.axis)
        out = apply_multiplier(grid_1d, lambda r: r**2, u)
        assert np.allclose(out, xi**2 * u, atol=1e-10)

    def test_identity_symbol(self, grid_2d, rng):
        u = rng.standard_normal(grid_2d.size)
        assert np.allclose(apply_multiplier(grid_2d, 1.0, u), u, atol=1e-12)

    def test_matrix_matches_fft(self, grid_1d, rng):
        symbol = lambda r: 1.0 / (1.0 + r**2)  # noqa: E731
        u = rng.standard_normal(grid_1d.size)
        T = multiplier_matrix(grid_1d, symbol)
        assert np.allclose(T, T.T, atol=1e-14)
        assert np.allclose(T @ u, apply_multiplier(grid_1d, symbol, u), atol=1e-12)

    def test_matrix_matches_fft_2d(self, grid_2d, rng):
        symbol = lambda r: np.exp(-r)  # noqa: E731
        u = rng.standard_normal(grid_2d.size)
        T = multiplier_matrix(grid_2d, symbol)
        assert np.allclose(T @ u, apply_multiplier(grid_2d, symbol, u), atol=1e-12)

    def test_mirror_maps_k_to_minus_k(self, grid_2d):
        assert np.array_equal(mirror_symbol(np.arange(4.0)), [0.0, 3.0, 2.0, 1.0])
        assert np.allclose(mirror_symbol(grid_2d.freq.norms), grid_2d.freq.norms, atol=0)

    def test_real_input_needs_even_symbol(self, grid_1d, rng):
        k = np.fft.fftfreq(grid_1d.N, 1.0 / grid_1d.N)
        one_sided = 1.0 + (k > 0)
        u = rng.standard_normal(grid_1d.size)
        with pytest.raises(NonEvenSymbolError):
            apply_multiplier(grid_1d, one_sided, u)
        out = apply_multiplier(grid_1d, one_sided, u.astype(complex))
        assert np.max(np.abs(out.imag)) > 1e-3

    def test_matrix_of_odd_symbol_is_hermitian(self, grid_1d, rng):
        k = np.fft.fftfreq(grid_1d.N, 1.0 / grid_1d.N)
        one_sided = 1.0 + (k > 0)
        T = multiplier_matrix(grid_1d, one_sided)
        assert np.iscomplexobj(T)
        assert np.allclose(T, T.conj().T, atol=1e-14)
        u = rng.standard_normal(grid_1d.size) + 0j
        assert np.allclose(T @ u, apply_multiplier(grid_1d, one_sided, u), atol=1e-12)
        assert np.isrealobj(multiplier_matrix(grid_1d, lambda r: np.exp(-r)))

    def test_symbol_checks(self, grid_1d):
        with pytest.raises(ShapeMismatchError):
            evaluate_symbol(grid_1d, np.ones(7))
        with pytest.raises(NonfiniteSymbolError):
            evaluate_symbol(grid_1d, lambda r: 1.0 / r)

    def test_interpolation_reproduces_nodes(self, grid_1d, rng):
        u = rng.standard_normal(grid_1d.size)
        assert np.allclose(trig_interpolate(grid_1d, u, grid_1d.axis), u, atol=1e-10)

    def test_interpolation_of_band_limited_function(self, grid_1d):
        xi = 5 * grid_1d.freq.spacing
        u = np.sin(xi * grid_1d.axis)
        y = np.array([-3.3, 0.1, 7.77])
        assert np.allclose(trig_interpolate(grid_1d, u, y), np.sin(xi * y), atol=1e-10)


class TestAnnuli:
    def test_measure_1d(self):
        annuli = make_annuli(K_ann=30, d=1)
        assert annuli.count == 30
        assert annuli.measure == pytest.approx(2 * (1 - math.exp(-30)), rel=1e-12)

    def test_measure_2d(self):
        annuli = make_annuli(K_ann=12, d=2)
        assert annuli.measure == pytest.approx(math.pi * (1 - math.exp(-24)), rel=1e-12)

    def test_radial_integral(self):
        annuli = make_annuli(K_ann=20, d=1)
        value = annuli.integrate_radial(lambda r: r**2)
        assert value == pytest.approx(2 / 3 * (1 - math.exp(-60)), rel=1e-12)

    def test_rejects_empty(self):
        with pytest.raises(InvalidParameterError, match="K_ann must be >= 1, got 0"):
            make_annuli(K_ann=0)
        with pytest.raises(ValueError):
            make_annuli(K_ann=-3)


class TestHermite:
    def test_ground_state_value(self):
        psi = hermite_functions(3, np.array([0.0]))
        assert psi[0, 0] == pytest.approx(math.pi**-0.25)
        assert psi[1, 0] == pytest.approx(0.0, abs=1e-15)

    def test_large_arguments_stay_finite(self):
        psi = hermite_functions(400, np.array([0.0, 10.0, 30.0]))
        assert np.all(np.isfinite(psi))

    def test_quadrature_orthonormality(self):
        basis = hermite_basis(1, 40)
        assert basis.gram_deviation < 1e-8

    def test_eigenvalues_start_at_e_to_e(self):
        for d in (1, 2):
            basis = hermite_basis(d, 6)
            assert basis.eigenvalues.min() == pytest.approx(E_TO_E)

    def test_2d_indices(self):
        basis = hermite_basis(2, 3)
        assert len(basis.multi_indices) == 10
        assert list(basis.degrees) == sorted(basis.degrees)

    def test_rejects_bad_dimension(self):
        with pytest.raises(BadDimensionError):
            hermite_basis(3, 4)
