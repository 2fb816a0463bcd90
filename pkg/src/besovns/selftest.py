"""Structural invariant suites, runnable without pytest.

Each suite returns (passed, detail); `run_selftest` executes all of them.
The numeric budgets mirror the package's contracts: 1e-12 for identities that
hold up to FFT roundoff, exact zeros for support claims, 1e-10 for the
commutator-versus-convolution cross-check.
"""

from __future__ import annotations

import math

import numpy as np

from .littlewood_paley import (
    BesovIndex,
    CutoffProfile,
    DyadicDecomposition,
    besov_norm,
    bony_decompose,
    dyadic_block,
    embedding_constant,
    lp_commutator,
    max_block_index,
    product_on_doubled_grid,
)
from .manufactured import ManufacturedCase, pde_residual
from .reference import advection_reference, commutator_reference
from .solver import SolverConfig, leray_project, run_simulation
from .spectral import (
    Grid2D,
    SpectralField,
    VectorField,
    advection_term,
    differentiate,
    truncate_modes,
    wavenumbers,
)

IDENTITY_TOL = 1e-12
COMMUTATOR_TOL = 1e-10


def random_field(grid: Grid2D, rng, band: int | None = None) -> SpectralField:
    """Random real field, optionally band-limited to |k|_inf <= band."""
    n = grid.n_points
    values = rng.standard_normal((n, n))
    f = SpectralField(grid, np.fft.fft2(values) / (n * n))
    if band is not None:
        f = truncate_modes(f, band)
    return f


def random_divfree(grid: Grid2D, rng, band: int, scale: float = 0.3) -> VectorField:
    v = VectorField(
        scale * random_field(grid, rng, band), scale * random_field(grid, rng, band)
    )
    return leray_project(v)


def _rel(err: float, scale: float) -> float:
    return err / max(scale, 1e-300)


def suite_partition_of_unity():
    worst = 0.0
    prof = CutoffProfile()
    for n in (16, 64):
        grid = Grid2D(n)
        _, _, ksq = wavenumbers(n)
        radii = np.unique(np.sqrt(ksq))
        total = prof.partition_sum(radii, max_block_index(grid))
        worst = max(worst, float(np.max(np.abs(total - 1.0))))
    return worst <= IDENTITY_TOL, f"max |partition - 1| = {worst:.2e}"


def suite_block_reconstruction():
    rng = np.random.default_rng(11)
    worst = 0.0
    for n in (16, 64):
        grid = Grid2D(n)
        f = random_field(grid, rng)
        rec = DyadicDecomposition.of(f).reconstruct()
        worst = max(
            worst,
            _rel(float(np.max(np.abs(rec.coeffs - f.coeffs))), f.max_abs()),
        )
    return worst <= IDENTITY_TOL, f"max reconstruction defect = {worst:.2e}"


def suite_annulus_support():
    rng = np.random.default_rng(12)
    grid = Grid2D(64)
    f = random_field(grid, rng)
    _, _, ksq = wavenumbers(64)
    radius = np.sqrt(ksq)
    worst = 0.0
    for j in range(1, max_block_index(grid) + 1):
        block = dyadic_block(f, j)
        outside = (radius < 2.0 ** (j - 2)) | (radius > 2.0**j)
        worst = max(worst, float(np.max(np.abs(block.coeffs[outside]))))
    return worst == 0.0, f"max coefficient outside annuli = {worst:.2e} (must be exact 0)"


def suite_bony_identity():
    rng = np.random.default_rng(13)
    grid = Grid2D(16)
    worst = 0.0
    for _ in range(3):
        u = random_field(grid, rng, band=5)
        v = random_field(grid, rng, band=5)
        t_uv, t_vu, rem = bony_decompose(u, v)
        direct = product_on_doubled_grid(u, v)
        total = t_uv.coeffs + t_vu.coeffs + rem.coeffs
        worst = max(
            worst,
            _rel(float(np.max(np.abs(total - direct.coeffs))), direct.max_abs()),
        )
    return worst <= IDENTITY_TOL, f"max Bony identity defect = {worst:.2e}"


def suite_leray_projector():
    rng = np.random.default_rng(14)
    grid = Grid2D(32)
    worst = 0.0
    for _ in range(3):
        v = VectorField(random_field(grid, rng), random_field(grid, rng))
        p = leray_project(v)
        pp = leray_project(p)
        worst = max(
            worst,
            _rel(
                max(
                    float(np.max(np.abs(pp.u1.coeffs - p.u1.coeffs))),
                    float(np.max(np.abs(pp.u2.coeffs - p.u2.coeffs))),
                ),
                p.max_abs(),
            ),
        )
        q = random_field(grid, rng)
        gradient = VectorField(differentiate(q, "ddx"), differentiate(q, "ddy"))
        killed = leray_project(gradient)
        worst = max(worst, _rel(killed.max_abs(), gradient.max_abs()))
    return worst <= IDENTITY_TOL, f"max projector defect = {worst:.2e}"


def suite_divergence_preservation():
    rng = np.random.default_rng(15)
    grid = Grid2D(32)
    u0 = random_divfree(grid, rng, band=8)
    cfg = SolverConfig(nu=0.3, tau=0.01, T=0.1, n_points=32, N=8)
    traj = run_simulation(u0, cfg, snapshot_times=[0.05])
    worst = 0.0
    for _, snap in traj.snapshots:
        defect, scale = snap.divergence_defect()
        worst = max(worst, defect / scale)
    return worst <= IDENTITY_TOL, f"max divergence defect = {worst:.2e}"


def suite_picard_residual():
    rng = np.random.default_rng(16)
    grid = Grid2D(32)
    u0 = random_divfree(grid, rng, band=8)
    cfg = SolverConfig(nu=0.5, tau=0.01, T=0.1, n_points=32, N=8)
    traj = run_simulation(u0, cfg)
    worst = 0.0
    for diag in traj.diagnostics:
        budget = 10.0 * cfg.picard_tol * (1.0 + diag.besov_s1_norm)
        worst = max(worst, diag.residual / budget)
    return worst <= 1.0, f"max residual / budget = {worst:.2e}"


def suite_dealiased_products():
    rng = np.random.default_rng(17)
    grid = Grid2D(16)
    band = grid.n_points // 3  # 2/3-rule band
    worst = 0.0
    for _ in range(3):
        u = VectorField(random_field(grid, rng, band), random_field(grid, rng, band))
        v = VectorField(random_field(grid, rng, band), random_field(grid, rng, band))
        fast = advection_term(u, v)
        slow = advection_reference(u, v)
        err = max(
            float(np.max(np.abs(fast.u1.coeffs - slow.u1.coeffs))),
            float(np.max(np.abs(fast.u2.coeffs - slow.u2.coeffs))),
        )
        worst = max(worst, _rel(err, slow.max_abs()))
    return worst <= IDENTITY_TOL, f"max dealiased-vs-convolution defect = {worst:.2e}"


def suite_commutator_oracle():
    rng = np.random.default_rng(18)
    grid = Grid2D(16)
    worst = 0.0
    for _ in range(2):
        u = random_divfree(grid, rng, band=3)
        fv = VectorField(random_field(grid, rng, 3), random_field(grid, rng, 3))
        fs = random_field(grid, rng, 3)
        for j in (1, 2, 3):
            fast_v = lp_commutator(u, fv, j)
            slow_v = commutator_reference(u, fv, j)
            err_v = max(
                float(np.max(np.abs(fast_v.u1.coeffs - slow_v.u1.coeffs))),
                float(np.max(np.abs(fast_v.u2.coeffs - slow_v.u2.coeffs))),
            )
            fast_s = lp_commutator(u, fs, j)
            slow_s = commutator_reference(u, fs, j)
            err_s = float(np.max(np.abs(fast_s.coeffs - slow_s.coeffs)))
            worst = max(worst, err_v, err_s)
    return worst <= COMMUTATOR_TOL, f"max commutator defect = {worst:.2e}"


def suite_embedding_inequality():
    rng = np.random.default_rng(19)
    grid = Grid2D(32)
    jm = max_block_index(grid)
    worst = 0.0
    for _ in range(100):
        f = random_field(grid, rng)
        for eps in (0.5, 1.0):
            lhs = besov_norm(f, BesovIndex(0.0, math.inf, 1), oversample=1)
            rhs = embedding_constant(eps, jm) * besov_norm(
                f, BesovIndex(eps, math.inf, 2), oversample=1
            )
            worst = max(worst, lhs / rhs)
    return worst <= 1.0 + 1e-12, f"max lhs/rhs over 100 fields = {worst:.12f}"


def suite_manufactured_residual():
    worst = 0.0
    grid = Grid2D(64)
    for nu in (0.0, 0.5, 1.0):
        case = ManufacturedCase("ns_forced", nu=nu)
        for t in (0.1, 1.0):
            worst = max(worst, pde_residual(case, t, grid))
    return worst <= 1e-10, f"max PDE residual = {worst:.2e}"


SUITES = (
    ("partition_of_unity", suite_partition_of_unity),
    ("block_reconstruction", suite_block_reconstruction),
    ("annulus_support", suite_annulus_support),
    ("bony_identity", suite_bony_identity),
    ("leray_projector", suite_leray_projector),
    ("divergence_preservation", suite_divergence_preservation),
    ("picard_residual", suite_picard_residual),
    ("dealiased_products", suite_dealiased_products),
    ("commutator_oracle", suite_commutator_oracle),
    ("embedding_inequality", suite_embedding_inequality),
    ("manufactured_residual", suite_manufactured_residual),
)


def run_selftest(report=print):
    """Run every suite; returns True when all pass."""
    all_ok = True
    for name, fn in SUITES:
        ok, detail = fn()
        all_ok = all_ok and ok
        report(f"{'PASS' if ok else 'FAIL'}  {name:28s} {detail}")
    return all_ok
