"""Spectral substrate: transforms, truncation, derivatives, dealiased advection.

Conventions (fixed once, everything else builds on them):

* domain [0, 2*pi)^2, collocation points x_a = 2*pi*a/n,
* f(x) = sum_k fhat(k) exp(i k.x) over the integer lattice, so the forward
  transform is fft2(values)/n^2 and fhat[0, 0] is the mean of f,
* coefficients are stored as full complex (n, n) arrays in numpy fft layout;
  frequencies per axis run 0..n/2-1, -n/2..-1.  The Nyquist line k = -n/2 has
  no positive partner and is outside the resolvable-mode contract
  (|k_i| <= k_max = n/2 - 1); it is zeroed whenever fields enter a product.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigurationError, DataError

HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class Grid2D:
    """Uniform collocation grid on the periodic square [0, 2*pi)^2."""

    n_points: int

    def __post_init__(self):
        n = self.n_points
        if not isinstance(n, (int, np.integer)) or n < 4 or n % 2 != 0:
            raise ConfigurationError(
                f"grid needs an even point count >= 4, got {self.n_points!r}"
            )

    @property
    def k_max(self) -> int:
        return self.n_points // 2 - 1

    def coordinates(self):
        """Meshgrid (X, Y) of collocation points, row-major (x varies along axis 0)."""
        x = 2.0 * np.pi * np.arange(self.n_points) / self.n_points
        return np.meshgrid(x, x, indexing="ij")


@lru_cache(maxsize=32)
def wavenumbers(n_points: int):
    """Integer wavenumber meshes (K1, K2) and |k|^2 in fft layout, read-only."""
    k = np.fft.fftfreq(n_points, d=1.0 / n_points)
    k1, k2 = np.meshgrid(k, k, indexing="ij")
    ksq = k1 * k1 + k2 * k2
    for a in (k1, k2, ksq):
        a.setflags(write=False)
    return k1, k2, ksq


@lru_cache(maxsize=32)
def _nyquist_free_mask(n_points: int):
    k1, k2, _ = wavenumbers(n_points)
    kmax = n_points // 2 - 1
    m = (np.abs(k1) <= kmax) & (np.abs(k2) <= kmax)
    m.setflags(write=False)
    return m


@dataclass
class RealField:
    """Real samples at the collocation points of a Grid2D."""

    grid: Grid2D
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        n = self.grid.n_points
        if v.shape != (n, n):
            raise ConfigurationError(
                f"expected {(n, n)} samples, got array of shape {v.shape}"
            )
        v = v.copy()
        v.setflags(write=False)
        self.values = v


@dataclass
class SpectralField:
    """Fourier coefficients of a scalar field on a Grid2D (fft layout)."""

    grid: Grid2D
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        n = self.grid.n_points
        if c.shape != (n, n):
            raise ConfigurationError(
                f"expected {(n, n)} coefficients, got array of shape {c.shape}"
            )
        c = c.copy()
        c.setflags(write=False)
        self.coeffs = c

    def __add__(self, other: "SpectralField") -> "SpectralField":
        _same_grid(self, other)
        return SpectralField(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        _same_grid(self, other)
        return SpectralField(self.grid, self.coeffs - other.coeffs)

    def __mul__(self, scalar) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs * scalar)

    __rmul__ = __mul__

    def max_abs(self) -> float:
        """Largest coefficient magnitude (coarse field-size gauge)."""
        return float(np.max(np.abs(self.coeffs)))


def _same_grid(a, b):
    if a.grid != b.grid:
        raise ConfigurationError(
            f"grid mismatch: {a.grid.n_points} vs {b.grid.n_points} points"
        )


DIV_FREE_TOL = 1e-12


@dataclass
class VectorField:
    """Velocity field (u1, u2) with an optional divergence-free promise."""

    u1: SpectralField
    u2: SpectralField
    div_free: bool = False

    def __post_init__(self):
        _same_grid(self.u1, self.u2)
        if self.div_free:
            defect, scale = self.divergence_defect()
            if defect > DIV_FREE_TOL * scale:
                raise DataError(
                    f"div_free flag set but max spectral divergence {defect:.3e} "
                    f"exceeds {DIV_FREE_TOL:.0e} * field scale {scale:.3e}"
                )

    @property
    def grid(self) -> Grid2D:
        return self.u1.grid

    def divergence_defect(self):
        """(max_k |i k . uhat(k)|, max_k(|u1hat| + |u2hat|)) for the contract check."""
        k1, k2, _ = wavenumbers(self.grid.n_points)
        div = 1j * k1 * self.u1.coeffs + 1j * k2 * self.u2.coeffs
        scale = float(np.max(np.abs(self.u1.coeffs) + np.abs(self.u2.coeffs)))
        return float(np.max(np.abs(div))), max(scale, 1e-300)

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.u1 + other.u1, self.u2 + other.u2)

    def __sub__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.u1 - other.u1, self.u2 - other.u2)

    def __mul__(self, scalar) -> "VectorField":
        return VectorField(self.u1 * scalar, self.u2 * scalar, self.div_free)

    __rmul__ = __mul__

    def max_abs(self) -> float:
        return max(self.u1.max_abs(), self.u2.max_abs())


# ---------------------------------------------------------------------------
# transforms


def forward_transform(f: RealField) -> SpectralField:
    """Samples -> coefficients; fhat(0,0) equals the mean of f."""
    n = f.grid.n_points
    return SpectralField(f.grid, np.fft.fft2(f.values) / (n * n))


def inverse_transform(F: SpectralField) -> RealField:
    """Coefficients -> samples; rejects non-Hermitian (non-real) input."""
    n = F.grid.n_points
    w = np.fft.ifft2(F.coeffs) * (n * n)
    scale = max(float(np.max(np.abs(w))), 1e-300)
    residue = float(np.max(np.abs(w.imag)))
    if residue > HERMITIAN_TOL * scale:
        raise DataError(
            f"coefficients are not Hermitian-symmetric: imaginary residue "
            f"{residue:.3e} exceeds {HERMITIAN_TOL:.0e} * field scale {scale:.3e}"
        )
    return RealField(F.grid, w.real)


def evaluate_on_grid(F: SpectralField, n_eval: int) -> np.ndarray:
    """Sample the trigonometric polynomial F on an n_eval^2 collocation grid.

    n_eval may exceed the native grid (oversampling); modes the finer grid
    cannot be blamed on (Nyquist line of the native grid) are dropped.
    """
    n = F.grid.n_points
    if n_eval == n:
        src = F.coeffs
    else:
        if n_eval < 2 * F.grid.k_max + 2:
            raise ConfigurationError(
                f"evaluation grid {n_eval} too coarse for modes up to {F.grid.k_max}"
            )
        src = np.zeros((n_eval, n_eval), dtype=complex)
        h = n // 2
        pos = slice(0, h)        # k = 0 .. k_max
        neg = slice(1 - h, None)  # k = -k_max .. -1
        src[pos, pos] = F.coeffs[pos, pos]
        src[pos, neg] = F.coeffs[pos, neg]
        src[neg, pos] = F.coeffs[neg, pos]
        src[neg, neg] = F.coeffs[neg, neg]
    return (np.fft.ifft2(src) * (n_eval * n_eval)).real


# ---------------------------------------------------------------------------
# mode algebra


def truncate_modes(F: SpectralField, N: int) -> SpectralField:
    """Zero every coefficient with |k|_inf > N (idempotent)."""
    if N < 1 or N > F.grid.k_max:
        raise ConfigurationError(
            f"truncation N={N} outside [1, k_max={F.grid.k_max}]"
        )
    return SpectralField(F.grid, F.coeffs * truncation_mask(F.grid.n_points, N))


@lru_cache(maxsize=64)
def truncation_mask(n_points: int, N: int):
    k1, k2, _ = wavenumbers(n_points)
    m = (np.abs(k1) <= N) & (np.abs(k2) <= N)
    m.setflags(write=False)
    return m


def differentiate(F: SpectralField, op: str) -> SpectralField:
    """Apply ddx, ddy or laplacian as a diagonal Fourier multiplier."""
    k1, k2, ksq = wavenumbers(F.grid.n_points)
    if op == "ddx":
        mult = 1j * k1
    elif op == "ddy":
        mult = 1j * k2
    elif op == "laplacian":
        mult = -ksq
    else:
        raise ConfigurationError(f"unknown derivative {op!r}")
    return SpectralField(F.grid, F.coeffs * mult)


def divergence(u: VectorField) -> SpectralField:
    return differentiate(u.u1, "ddx") + differentiate(u.u2, "ddy")


# ---------------------------------------------------------------------------
# dealiased products (3/2-rule zero padding)


def padded_points(n_points: int) -> int:
    """Product grid size: >= 3n/2 and even, so kept modes are alias-free."""
    m = (3 * n_points + 1) // 2
    return m + (m % 2)


@lru_cache(maxsize=32)
def _pad_slices(n_points: int):
    h = n_points // 2
    return slice(0, h), slice(1 - h, None)  # non-negative / negative modes


def _embed(coeffs: np.ndarray, n: int, m: int) -> np.ndarray:
    """Copy resolvable modes of an (n, n) spectrum into an (m, m) spectrum."""
    pos, neg = _pad_slices(n)
    out = np.zeros((m, m), dtype=complex)
    out[pos, pos] = coeffs[pos, pos]
    out[pos, neg] = coeffs[pos, neg]
    out[neg, pos] = coeffs[neg, pos]
    out[neg, neg] = coeffs[neg, neg]
    return out


def _extract(coeffs: np.ndarray, m: int, n: int) -> np.ndarray:
    """Keep the modes of an (m, m) spectrum that fit an (n, n) grid."""
    pos, neg = _pad_slices(n)
    out = np.zeros((n, n), dtype=complex)
    out[pos, pos] = coeffs[pos, pos]
    out[pos, neg] = coeffs[pos, neg]
    out[neg, pos] = coeffs[neg, pos]
    out[neg, neg] = coeffs[neg, neg]
    return out


def dealiased_product_coeffs(spectra_a, spectra_b, n: int, m: int | None = None):
    """Pairwise products sum_i a_i * b_i on a padded grid, back as (n, n) coeffs.

    Inputs are lists of (n, n) coefficient arrays; the products are evaluated
    pointwise on an (m, m) grid with m >= 3n/2, which leaves every kept mode
    |k|_inf <= n/2 - 1 alias-free.
    """
    if m is None:
        m = padded_points(n)
    scale = m * m
    acc = None
    for a, b in zip(spectra_a, spectra_b):
        fa = (np.fft.ifft2(_embed(a, n, m)) * scale).real
        fb = (np.fft.ifft2(_embed(b, n, m)) * scale).real
        acc = fa * fb if acc is None else acc + fa * fb
    prod = np.fft.fft2(acc) / scale
    return _extract(prod, m, n)


def advect_scalar(u: VectorField, g: SpectralField) -> SpectralField:
    """u . grad g, dealiased, truncated to the resolvable modes of g's grid."""
    _same_grid(u.u1, g)
    n = g.grid.n_points
    k1, k2, _ = wavenumbers(n)
    mask = _nyquist_free_mask(n)
    gx = 1j * k1 * g.coeffs * mask
    gy = 1j * k2 * g.coeffs * mask
    out = dealiased_product_coeffs(
        [u.u1.coeffs * mask, u.u2.coeffs * mask], [gx, gy], n
    )
    return SpectralField(g.grid, out)


def advection_term(u: VectorField, v: VectorField) -> VectorField:
    """(u . grad) v, component-wise dealiased products."""
    _same_grid(u.u1, v.u1)
    return VectorField(advect_scalar(u, v.u1), advect_scalar(u, v.u2))


# ---------------------------------------------------------------------------
# half-spectrum (rfft2) kernels for the solver hot path
#
# Real fields admit the halved layout (n, n//2 + 1) with k2 >= 0 columns;
# these helpers mirror the full-layout operations there.  Values agree with
# the full-complex path up to rounding.


@lru_cache(maxsize=32)
def half_wavenumbers(n_points: int):
    k = np.fft.fftfreq(n_points, d=1.0 / n_points)
    kc = np.arange(n_points // 2 + 1, dtype=float)
    k1, k2 = np.meshgrid(k, kc, indexing="ij")
    ksq = k1 * k1 + k2 * k2
    for a in (k1, k2, ksq):
        a.setflags(write=False)
    return k1, k2, ksq


@lru_cache(maxsize=32)
def half_nyquist_free_mask(n_points: int):
    k1, k2, _ = half_wavenumbers(n_points)
    kmax = n_points // 2 - 1
    m = (np.abs(k1) <= kmax) & (k2 <= kmax)
    m.setflags(write=False)
    return m


@lru_cache(maxsize=64)
def half_truncation_mask(n_points: int, N: int):
    k1, k2, _ = half_wavenumbers(n_points)
    m = (np.abs(k1) <= N) & (k2 <= N)
    m.setflags(write=False)
    return m


def full_to_half(coeffs: np.ndarray, n: int) -> np.ndarray:
    return coeffs[:, : n // 2 + 1].copy()


@lru_cache(maxsize=32)
def _reflect_indices(n: int):
    hw = n // 2 + 1
    rows = (-np.arange(n)) % n
    cols = n - np.arange(hw, n)
    rows.setflags(write=False)
    cols.setflags(write=False)
    return rows, cols


def half_to_full(half: np.ndarray, n: int) -> np.ndarray:
    """Rebuild the full spectrum of a real field by Hermitian reflection."""
    hw = n // 2 + 1
    rows, cols = _reflect_indices(n)
    full = np.empty((n, n), dtype=complex)
    full[:, :hw] = half
    full[:, hw:] = np.conj(half[rows][:, cols])
    return full


def half_embed(half: np.ndarray, n: int, m: int) -> np.ndarray:
    """Copy resolvable modes of an (n, n//2+1) spectrum into an (m, m//2+1) one."""
    h = n // 2
    out = np.zeros((m, m // 2 + 1), dtype=complex)
    out[:h, :h] = half[:h, :h]
    out[m - (h - 1) :, :h] = half[1 - h :, :h]
    return out


def half_extract(half: np.ndarray, m: int, n: int) -> np.ndarray:
    h = n // 2
    out = np.zeros((n, n // 2 + 1), dtype=complex)
    out[:h, :h] = half[:h, :h]
    out[1 - h :, :h] = half[m - (h - 1) :, :h]
    return out


# ---------------------------------------------------------------------------
# norms


def l2_norm(obj) -> float:
    """Integral L^2 norm over [0, 2*pi)^2 via Parseval: 2*pi*sqrt(sum |fhat|^2)."""
    if isinstance(obj, VectorField):
        s = np.sum(np.abs(obj.u1.coeffs) ** 2) + np.sum(np.abs(obj.u2.coeffs) ** 2)
    else:
        s = np.sum(np.abs(obj.coeffs) ** 2)
    return float(2.0 * np.pi * np.sqrt(s))
