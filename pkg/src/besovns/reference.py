"""Slow, direct-summation reference implementations.

These deliberately avoid the FFT/dealiasing machinery: pointwise products are
computed as exact O(M^2) mode convolutions, so they serve as independent
oracles for the production paths (dealiased advection, paraproducts, the
block commutator).  Only use on small grids.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigurationError
from .spectral import Grid2D, SpectralField, VectorField, wavenumbers


def _centered(coeffs: np.ndarray) -> np.ndarray:
    return np.fft.fftshift(coeffs)


def _from_centered(centered: np.ndarray) -> np.ndarray:
    return np.fft.ifftshift(centered)


def convolve_modes(F: SpectralField, G: SpectralField, out_grid: Grid2D | None = None) -> SpectralField:
    """Exact product F*G by direct convolution of coefficient lattices.

    The full convolution covers |k_i| <= n - 2; modes outside the output
    grid's resolvable set are dropped, mirroring the truncation the dealiased
    fast path applies.
    """
    if F.grid != G.grid:
        raise ConfigurationError("convolution factors must share a grid")
    n = F.grid.n_points
    if out_grid is None:
        out_grid = F.grid
    fc = _centered(F.coeffs)
    gc = _centered(G.coeffs)
    full = np.zeros((2 * n - 1, 2 * n - 1), dtype=complex)
    rows, cols = np.nonzero(fc)
    for i, j in zip(rows, cols):
        full[i : i + n, j : j + n] += fc[i, j] * gc
    # full[a, b] holds frequency (a - (n - 1) - h, ...) where the centered
    # input index i corresponds to k = i - h, h = n/2; the sum of two inputs
    # spans k in [-2h, 2h - 2] located at a - 2h ... re-center on the output.
    h = n // 2
    m = out_grid.n_points
    hm = m // 2
    out_c = np.zeros((m, m), dtype=complex)
    # keep the resolvable modes |k_i| <= m/2 - 1 (the output Nyquist line is
    # outside the coefficient contract, matching the fast path's truncation)
    for a in range(full.shape[0]):
        ka = a - 2 * h
        if abs(ka) >= hm:
            continue
        for b in range(full.shape[1]):
            kb = b - 2 * h
            if abs(kb) >= hm:
                continue
            out_c[ka + hm, kb + hm] = full[a, b]
    return SpectralField(out_grid, _from_centered(out_c))


def advect_scalar_reference(u: VectorField, g: SpectralField) -> SpectralField:
    """u . grad g via direct convolutions, truncated to g's grid."""
    k1, k2, _ = wavenumbers(g.grid.n_points)
    gx = SpectralField(g.grid, 1j * k1 * g.coeffs)
    gy = SpectralField(g.grid, 1j * k2 * g.coeffs)
    t1 = convolve_modes(u.u1, gx)
    t2 = convolve_modes(u.u2, gy)
    return t1 + t2


def advection_reference(u: VectorField, v: VectorField) -> VectorField:
    return VectorField(
        advect_scalar_reference(u, v.u1), advect_scalar_reference(u, v.u2)
    )


def commutator_reference(u: VectorField, f, j: int):
    """[u . grad, P Delta_j] f with brute-force convolution products."""
    from .littlewood_paley import dyadic_block
    from .solver import leray_project

    if isinstance(f, VectorField):
        pdj_f = leray_project(
            VectorField(dyadic_block(f.u1, j), dyadic_block(f.u2, j))
        )
        term1 = advection_reference(u, pdj_f)
        adv = advection_reference(u, f)
        term2 = leray_project(
            VectorField(dyadic_block(adv.u1, j), dyadic_block(adv.u2, j))
        )
        return VectorField(term1.u1 - term2.u1, term1.u2 - term2.u2)
    term1 = advect_scalar_reference(u, dyadic_block(f, j))
    term2 = dyadic_block(advect_scalar_reference(u, f), j)
    return term1 - term2


def bony_reference(u: SpectralField, v: SpectralField):
    """Paraproduct parts by explicit double sums over block pairs."""
    from .littlewood_paley import DyadicDecomposition

    du = DyadicDecomposition.of(u)
    dv = DyadicDecomposition.of(v)
    big = Grid2D(2 * u.grid.n_points)
    jm = du.j_max
    zero = SpectralField(big, np.zeros((big.n_points, big.n_points), complex))
    t_uv, t_vu, rem = zero, zero, zero
    for j in range(jm + 1):
        for l in range(jm + 1):
            pair_u, pair_v = du.blocks[l], dv.blocks[j]
            if l <= j - 2:
                t_uv = t_uv + convolve_modes(pair_u, pair_v, big)
            elif j <= l - 2:
                t_vu = t_vu + convolve_modes(pair_v, pair_u, big)
            else:
                rem = rem + convolve_modes(pair_u, pair_v, big)
    return t_uv, t_vu, rem
