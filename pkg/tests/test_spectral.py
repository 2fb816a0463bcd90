"""Transforms, truncation, derivatives, dealiased products."""

import numpy as np
import pytest

from besovns import (
    ConfigurationError,
    DataError,
    Grid2D,
    RealField,
    SpectralField,
    VectorField,
    advection_term,
    differentiate,
    forward_transform,
    inverse_transform,
    l2_norm,
    leray_project,
    taylor_green_shape,
    truncate_modes,
)
from besovns.reference import advection_reference
from besovns.selftest import random_field
from besovns.spectral import divergence


def sample(grid, fn):
    x, y = grid.coordinates()
    return RealField(grid, fn(x, y))


@pytest.mark.parametrize("n", [3, 5, 2, 0, -4])
def test_grid_rejects_bad_sizes(n):
    with pytest.raises(ConfigurationError):
        Grid2D(n)


def test_constant_field_transform(grid16):
    F = forward_transform(sample(grid16, lambda x, y: np.full_like(x, 2.5)))
    assert F.coeffs[0, 0] == pytest.approx(2.5, abs=1e-14)
    rest = F.coeffs.copy()
    rest[0, 0] = 0
    assert np.max(np.abs(rest)) < 1e-14


def test_sine_transform_convention(grid16):
    F = forward_transform(sample(grid16, lambda x, y: np.sin(x)))
    assert F.coeffs[1, 0] == pytest.approx(-0.5j, abs=1e-14)
    assert F.coeffs[-1, 0] == pytest.approx(0.5j, abs=1e-14)
    others = F.coeffs.copy()
    others[1, 0] = others[-1, 0] = 0
    assert np.max(np.abs(others)) < 1e-14


def test_roundtrip_identity(grid64, rng):
    values = rng.standard_normal((64, 64))
    f = RealField(grid64, values)
    back = inverse_transform(forward_transform(f))
    assert np.max(np.abs(back.values - values)) <= 1e-12 * np.max(np.abs(values))


def test_inverse_of_single_mean_mode(grid16):
    coeffs = np.zeros((16, 16), dtype=complex)
    coeffs[0, 0] = 3.0
    out = inverse_transform(SpectralField(grid16, coeffs))
    assert np.max(np.abs(out.values - 3.0)) < 1e-14


def test_inverse_rejects_broken_symmetry(grid16):
    coeffs = np.zeros((16, 16), dtype=complex)
    coeffs[1, 0] = 1e-3  # no conjugate partner
    with pytest.raises(DataError):
        inverse_transform(SpectralField(grid16, coeffs))


def test_parseval(grid64, rng):
    f = RealField(grid64, rng.standard_normal((64, 64)))
    F = forward_transform(f)
    grid_mean_sq = float(np.mean(f.values**2))
    assert grid_mean_sq == pytest.approx(float(np.sum(np.abs(F.coeffs) ** 2)), rel=1e-12)


def test_l2_norm_matches_integral(grid64):
    # |u0|_{L^2([0,2pi]^2)}^2 = 2 * (0.25 * pi^2)
    u0 = taylor_green_shape(grid64)
    assert l2_norm(u0) == pytest.approx(np.sqrt(0.5 * np.pi**2), rel=1e-13)


def test_truncation_drops_high_mode(grid16):
    coeffs = np.zeros((16, 16), dtype=complex)
    coeffs[3, 0] = 1.0
    coeffs[-3, 0] = 1.0
    out = truncate_modes(SpectralField(grid16, coeffs), 2)
    assert np.max(np.abs(out.coeffs)) == 0.0


def test_truncation_keeps_taylor_green(grid64):
    u0 = taylor_green_shape(grid64)
    for comp in (u0.u1, u0.u2):
        kept = truncate_modes(comp, 1)
        assert np.array_equal(kept.coeffs, comp.coeffs)


def test_truncation_idempotent(grid16, rng):
    f = random_field(grid16, rng)
    once = truncate_modes(f, 4)
    twice = truncate_modes(once, 4)
    assert np.array_equal(once.coeffs, twice.coeffs)


def test_truncation_range_error(grid16):
    f = SpectralField(grid16, np.zeros((16, 16), complex))
    with pytest.raises(ConfigurationError):
        truncate_modes(f, 8)  # k_max = 7


def test_ddx_of_sine(grid16):
    F = forward_transform(sample(grid16, lambda x, y: np.sin(x)))
    out = inverse_transform(differentiate(F, "ddx"))
    x, _ = grid16.coordinates()
    assert np.max(np.abs(out.values - np.cos(x))) < 1e-13


def test_laplacian_eigenfunction(grid16):
    F = forward_transform(sample(grid16, lambda x, y: np.sin(x) * np.cos(y)))
    out = differentiate(F, "laplacian")
    assert np.max(np.abs(out.coeffs + 2.0 * F.coeffs)) < 1e-14


def test_taylor_green_is_divergence_free(grid64):
    div = divergence(taylor_green_shape(grid64))
    assert np.max(np.abs(div.coeffs)) <= 1e-12 * 0.25


def test_differentiation_commutes_with_truncation(grid16, rng):
    f = random_field(grid16, rng)
    a = truncate_modes(differentiate(f, "ddx"), 4)
    b = differentiate(truncate_modes(f, 4), "ddx")
    assert np.max(np.abs(a.coeffs - b.coeffs)) == 0.0


def test_transform_linearity(grid16, rng):
    f = RealField(grid16, rng.standard_normal((16, 16)))
    g = RealField(grid16, rng.standard_normal((16, 16)))
    lhs = forward_transform(RealField(grid16, 2.0 * f.values - 3.0 * g.values))
    rhs = 2.0 * forward_transform(f) - 3.0 * forward_transform(g)
    assert np.max(np.abs(lhs.coeffs - rhs.coeffs)) < 1e-13


def test_constant_advection(grid16):
    v = VectorField(
        forward_transform(sample(grid16, lambda x, y: np.sin(x))),
        forward_transform(sample(grid16, lambda x, y: np.zeros_like(x))),
    )
    c = VectorField(
        forward_transform(sample(grid16, lambda x, y: np.full_like(x, 0.7))),
        forward_transform(sample(grid16, lambda x, y: np.full_like(x, -0.2))),
    )
    out = advection_term(c, v)
    expected = forward_transform(sample(grid16, lambda x, y: 0.7 * np.cos(x)))
    assert np.max(np.abs(out.u1.coeffs - expected.coeffs)) < 1e-13
    assert np.max(np.abs(out.u2.coeffs)) < 1e-13


def test_zero_advection(grid16, rng):
    zero = VectorField(
        SpectralField(grid16, np.zeros((16, 16), complex)),
        SpectralField(grid16, np.zeros((16, 16), complex)),
    )
    v = VectorField(random_field(grid16, rng), random_field(grid16, rng))
    out = advection_term(zero, v)
    assert out.max_abs() == 0.0


def test_taylor_green_selfadvection_is_pure_gradient(grid64):
    u0 = taylor_green_shape(grid64)
    nonlinear = advection_term(u0, u0)
    projected = leray_project(nonlinear)
    assert projected.max_abs() <= 1e-12 * max(nonlinear.max_abs(), 1.0)


def test_advection_grid_mismatch():
    a = taylor_green_shape(Grid2D(16))
    b = taylor_green_shape(Grid2D(32))
    with pytest.raises(ConfigurationError):
        advection_term(a, b)


def test_dealiased_product_matches_convolution(grid16, rng):
    band = 16 // 3
    for _ in range(3):
        u = VectorField(random_field(grid16, rng, band), random_field(grid16, rng, band))
        v = VectorField(random_field(grid16, rng, band), random_field(grid16, rng, band))
        fast = advection_term(u, v)
        slow = advection_reference(u, v)
        scale = max(slow.max_abs(), 1.0)
        assert np.max(np.abs(fast.u1.coeffs - slow.u1.coeffs)) <= 1e-12 * scale
        assert np.max(np.abs(fast.u2.coeffs - slow.u2.coeffs)) <= 1e-12 * scale


def test_half_spectrum_roundtrip(grid16, rng):
    from besovns.spectral import full_to_half, half_to_full

    f = random_field(grid16, rng, band=7)
    half = full_to_half(f.coeffs, 16)
    full = half_to_full(half, 16)
    assert np.max(np.abs(full - f.coeffs)) < 1e-14


def test_oversampled_evaluation(grid16):
    from besovns.spectral import evaluate_on_grid

    F = forward_transform(sample(grid16, lambda x, y: np.sin(x) * np.cos(2 * y)))
    fine = evaluate_on_grid(F, 64)
    xs = 2 * np.pi * np.arange(64) / 64
    xg, yg = np.meshgrid(xs, xs, indexing="ij")
    assert np.max(np.abs(fine - np.sin(xg) * np.cos(2 * yg))) < 1e-13
    with pytest.raises(ConfigurationError):
        evaluate_on_grid(F, 8)
