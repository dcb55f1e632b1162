"""
Tests for the periodic grid and its field operators.
"""

import numpy as np
import pytest

from libssns.grid import (
    Grid,
    Interpolation,
    ScalarField,
    VectorField,
    to_spectral,
    from_spectral,
    spectral_l2_norm,
    lp_norm,
    inner,
    gradient,
    divergence,
    laplacian,
    curl,
    leray_project,
    dealiased_products,
    tensor_divergence,
    divergence_residual,
    evaluate_interpolant,
    resample,
    gaussian_scalar,
    gaussian_field,
    gaussian_curl_field,
    band_limited_field,
    band_limited_scalar,
)
from libssns.errors import DomainError, DimensionError, NumericError


def _wave(grid, k, axis=0):
    """ sin(2 pi k y_axis / L) as a scalar field """
    y = grid.mesh[axis]
    return ScalarField(grid, np.sin(2.0 * np.pi * k * y / grid.box_side))


class TestGrid:

    def test_coordinates(self):
        grid = Grid(16, 8.0)

        assert grid.spacing == 0.5
        assert grid.shape == (16, 16, 16)
        assert grid.coords[0] == pytest.approx(-4.0)
        assert grid.coords[8] == 0.0
        assert grid.origin == -4.0

    def test_validation(self):
        with pytest.raises(DomainError, match="positive even"):
            Grid(15, 1.0)
        with pytest.raises(DomainError, match="positive even"):
            Grid(0, 1.0)
        with pytest.raises(DomainError, match="box side"):
            Grid(16, -1.0)
        with pytest.raises(DomainError, match="dealias"):
            Grid(16, 1.0, dealias_fraction=0.0)

    def test_immutable(self):
        grid = Grid(16, 1.0)
        with pytest.raises(AttributeError):
            grid.n = 32

    def test_dealias_mask(self, small_grid):
        """2/3 rule: cutoff 16/3 keeps |k| <= 5 on a 16^3 grid."""
        mask = small_grid.dealias_mask

        assert mask.shape == (16, 16, 9)
        assert mask[0, 0, 0]
        assert mask[5, 0, 0] and mask[0, 0, 5]
        assert not mask[6, 0, 0]
        assert not mask[0, 0, 6]
        assert not mask[8, 0, 0]

    def test_scaled(self):
        grid = Grid(16, 8.0).scaled(2.0)
        assert grid.n == 16
        assert grid.box_side == 16.0


class TestFields:

    def test_shape_checked(self, small_grid):
        with pytest.raises(DimensionError):
            VectorField(small_grid, np.zeros((2,) + small_grid.shape))
        with pytest.raises(DimensionError):
            ScalarField(small_grid, np.zeros((8, 8, 8)))

    def test_finite_checked(self, small_grid):
        comps = np.zeros((3,) + small_grid.shape)
        comps[1, 2, 3, 4] = np.nan
        with pytest.raises(NumericError, match="non-finite"):
            VectorField(small_grid, comps)

    def test_grid_mismatch(self, small_grid):
        a = VectorField.zeros(small_grid)
        b = VectorField.zeros(Grid(16, 8.0))
        with pytest.raises(DimensionError, match="different grids"):
            a + b

    def test_arithmetic(self, small_grid):
        f = gaussian_field(small_grid, 4.0)
        g = 2.0 * f - f / 2.0
        assert np.allclose(g.components, 1.5 * f.components)
        assert np.allclose((-f).components, -f.components)


class TestSpectral:

    def test_gaussian_transform(self):
        """exp(-pi |y|^2) is its own transform; check two coefficients."""
        grid = Grid(64, 16.0)
        F = to_spectral(gaussian_field(grid, 1.0))

        assert F.components[0][0, 0, 0].real == pytest.approx(1.0, abs=1e-10)
        expected = np.exp(-np.pi / grid.box_side**2)
        assert F.components[0][1, 0, 0].real == pytest.approx(expected, abs=1e-10)
        assert abs(F.components[0][1, 0, 0].imag) < 1e-12

    def test_inverse(self, small_grid, rng):
        f = band_limited_field(small_grid, 4, rng)
        g = from_spectral(to_spectral(f))
        assert np.allclose(g.components, f.components, atol=1e-12)

    def test_parseval(self, small_grid, rng):
        f = band_limited_field(small_grid, 3, rng)
        assert spectral_l2_norm(to_spectral(f)) == pytest.approx(lp_norm(f, 2), rel=1e-12)


class TestNorms:

    def test_constant(self, small_grid):
        f = ScalarField(small_grid, np.ones(small_grid.shape))
        for p in (1.0, 2.0, 4.0):
            assert lp_norm(f, p) == pytest.approx(small_grid.box_side**(3.0 / p), rel=1e-12)

    def test_zero(self, small_grid):
        assert lp_norm(VectorField.zeros(small_grid), 4.0) == 0.0

    def test_invalid_exponent(self, small_grid):
        f = VectorField.zeros(small_grid)
        with pytest.raises(DomainError):
            lp_norm(f, 0.5)
        with pytest.raises(DomainError):
            lp_norm(f, np.inf)

    def test_inner(self, small_grid):
        f = _wave(small_grid, 1)
        # mean of sin^2 is 1/2
        assert inner(f, f) == pytest.approx(0.5 * small_grid.box_side**3, rel=1e-12)

    def test_holder_product(self, small_grid, rng):
        for _ in range(5):
            U = band_limited_field(small_grid, 3, rng)
            V = band_limited_field(small_grid, 3, rng)
            product = ScalarField(small_grid, U.magnitude() * V.magnitude())
            assert lp_norm(product, 2) <= lp_norm(U, 4.0) * lp_norm(V, 4.0) + 1e-10

    def test_independent_of_box_for_decayed_fields(self):
        # same spacing, doubled side
        f = gaussian_field(Grid(32, 16.0), 4.0)
        g = gaussian_field(Grid(64, 32.0), 4.0)
        for p in (2.0, 4.0):
            assert lp_norm(g, p) == pytest.approx(lp_norm(f, p), rel=1e-8)


class TestDerivatives:

    def test_gradient_of_wave(self, small_grid):
        grid = small_grid
        k = 2
        f = _wave(grid, k, axis=1)
        expected = 2.0 * np.pi * k / grid.box_side * \
            np.cos(2.0 * np.pi * k * grid.mesh[1] / grid.box_side)
        g = gradient(f)

        assert np.allclose(g.components[1], expected, atol=1e-12)
        assert np.allclose(g.components[0], 0.0, atol=1e-12)

    def test_laplacian_of_wave(self, small_grid):
        f = _wave(small_grid, 3, axis=2)
        factor = -(2.0 * np.pi * 3 / small_grid.box_side)**2
        assert np.allclose(laplacian(f).values, factor * f.values, atol=1e-11)

    def test_curl_is_solenoidal(self, small_grid):
        u = gaussian_curl_field(small_grid, 4.0)
        assert lp_norm(u, 2) > 0.0
        assert divergence_residual(u) < 1e-12

    def test_curl_of_gradient(self, small_grid, rng):
        phi = band_limited_scalar(small_grid, 4, rng)
        assert lp_norm(curl(gradient(phi)), 2) < 1e-12 * lp_norm(gradient(phi), 2)

    def test_gradient_shapes(self, small_grid, rng):
        f = band_limited_field(small_grid, 2, rng)
        assert gradient(f).components.shape == (3, 3) + small_grid.shape
        assert divergence(f).values.shape == small_grid.shape


class TestLeray:

    def test_output_solenoidal(self, small_grid, rng):
        f = band_limited_field(small_grid, 4, rng)
        assert divergence_residual(f) > 0.1
        assert divergence_residual(leray_project(f)) < 1e-12

    def test_idempotent(self, small_grid, rng):
        P = leray_project(band_limited_field(small_grid, 4, rng))
        assert np.allclose(leray_project(P).components, P.components, atol=1e-12)

    def test_removes_gradients(self, small_grid, rng):
        g = gradient(band_limited_scalar(small_grid, 4, rng))
        assert lp_norm(leray_project(g), 2) < 1e-12 * lp_norm(g, 2)

    def test_self_adjoint(self, small_grid, rng):
        f = band_limited_field(small_grid, 4, rng)
        g = band_limited_field(small_grid, 4, rng)
        lhs = inner(leray_project(f), g)
        rhs = inner(f, leray_project(g))
        assert abs(lhs - rhs) <= 1e-10 * lp_norm(f, 2) * lp_norm(g, 2)

    def test_keeps_solenoidal(self, small_grid):
        u = gaussian_curl_field(small_grid, 4.0)
        assert np.allclose(leray_project(u).components, u.components, atol=1e-12)


class TestProducts:

    def test_band_limited_products_exact(self, small_grid, rng):
        """Modes |k| <= 2 multiply into |k| <= 4, inside the retained band."""
        U = band_limited_field(small_grid, 2, rng)
        V = band_limited_field(small_grid, 2, rng)
        prod = np.fft.irfftn(dealiased_products(U, V), s=small_grid.shape,
            axes=(-3, -2, -1))

        expected = V.components[:, None] * U.components[None, :]
        assert np.allclose(prod, expected, atol=1e-12)

    def test_tensor_divergence_is_advection(self, small_grid, rng):
        U = band_limited_field(small_grid, 2, rng, solenoidal=True)
        J = gradient(U).components
        advection = np.einsum('j...,ij...->i...', U.components, J)

        assert np.allclose(tensor_divergence(U, U).components, advection, atol=1e-11)

    def test_band_limit_validated(self, small_grid, rng):
        with pytest.raises(DomainError, match="kmax"):
            band_limited_field(small_grid, 6, rng)


class TestInterpolation:

    def test_fourier_exact_for_band_limited(self):
        grid = Grid(16, 16.0)
        f = _wave(grid, 2)
        points = grid.coords + 0.3
        out = evaluate_interpolant(f, points)
        expected = np.sin(2.0 * np.pi * 2 * points / grid.box_side)

        assert out.shape == (16, 16, 16)
        assert np.allclose(out, expected[:, None, None] * np.ones((1, 16, 16)), atol=1e-12)

    def test_cubic_spline_close(self):
        grid = Grid(32, 16.0)
        f = _wave(grid, 1)
        points = grid.coords + 0.2
        out = evaluate_interpolant(f, points, Interpolation.CUBIC_SPLINE)
        expected = np.sin(2.0 * np.pi * points / grid.box_side)

        assert np.max(np.abs(out[:, 0, 0] - expected)) < 1e-3

    def test_resample_dilation(self):
        """g(y) = exp(-pi |y|^2 / a) resampled at lam y is exp(-pi lam^2 |y|^2 / a)."""
        grid = Grid(64, 16.0)
        lam = np.exp(-1.0)
        g = gaussian_scalar(grid, 4.0)
        out = resample(g, grid, lam)
        expected = gaussian_scalar(grid, 4.0 / lam**2)

        assert np.max(np.abs(out.values - expected.values)) < 1e-8

    def test_resample_outside_box(self, small_grid):
        f = gaussian_scalar(small_grid, 4.0)
        with pytest.raises(DomainError, match="beyond the source box"):
            resample(f, small_grid, 2.0)
