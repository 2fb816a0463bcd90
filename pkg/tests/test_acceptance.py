"""Acceptance gate: convergence tables, vanishing viscosity, stability,
structural invariants.

Reference values are the published convergence/viscosity tables; each
criterion asserts at its stated tolerance and reports one PASS/FAIL line in
the terminal summary.

Known red: the absolute-value check for the nu = 1e-5 table.  That table is
internally consistent but sits at exactly 2.0x what this (or any one-step
variant of the) scheme produces, while the other three tables and the
viscosity table are reproduced to within a few percent.  See
/root/notes/decisions.md for the full analysis; the test asserts the stated
tolerance faithfully and fails honestly.
"""

import pytest

from besovns import ExperimentSpec, convergence_sweep, stability_check, viscosity_sweep
from besovns.manufactured import ManufacturedCase, pde_residual
from besovns.selftest import SUITES
from besovns.spectral import Grid2D

from conftest import record_acceptance

# --- published reference tables -------------------------------------------

TAUS = [0.01 / 2**i for i in range(6)]
NUS = [1.0, 0.1, 0.01, 1e-5]

TABLE_B1 = {
    1.0: [0.0018, 8.827e-4, 4.401e-4, 2.197e-4, 1.098e-4, 5.487e-5],
    0.1: [0.0020, 0.0010, 5.018e-4, 2.508e-4, 1.254e-4, 6.270e-5],
    0.01: [0.0040, 0.0020, 0.0010, 5.054e-4, 2.527e-4, 1.263e-4],
    1e-5: [0.0086, 0.0043, 0.0022, 0.0011, 5.404e-4, 2.702e-4],
}
TABLE_B2 = {
    1.0: [0.0013, 6.242e-4, 3.112e-4, 1.554e-4, 7.763e-5, 3.880e-5],
    0.1: [0.0014, 7.100e-4, 3.548e-4, 1.774e-4, 8.867e-5, 4.433e-5],
    0.01: [0.0029, 0.0014, 7.147e-4, 3.574e-4, 1.787e-4, 8.934e-5],
    1e-5: [0.0061, 0.0031, 0.0015, 7.642e-4, 3.821e-4, 1.911e-4],
}
TABLE5_NUS = [0.1 / 2**i for i in range(6)]
TABLE5 = {
    "L2": [0.0418, 0.0210, 0.0105, 0.0053, 0.0026, 0.0013],
    "B1": [0.0188, 0.0095, 0.0047, 0.0024, 0.0012, 5.987e-4],
    "B2": [0.0133, 0.0067, 0.0034, 0.0017, 8.431e-4, 4.234e-4],
}

RATE_TOL = 0.05       # err(tau)/err(tau/2) within 2.0 +- 0.05
CELL_TOL = 0.25       # absolute cells within +-25%
ROW_RATIO_TOL = 0.10  # B2/B1 per row within +-10% of the published ratio
VV_L2_TOL = 0.10      # leading viscosity cell within +-10%
VV_RATE_TOL = 0.05    # halving nu halves the differences within +-5%


@pytest.fixture(scope="module")
def convergence_rows():
    spec = ExperimentSpec(kind="converge", nu_list=tuple(NUS), tau_base=0.01,
                          halvings=5, T=2.0, n_points=64, N=21)
    rows = convergence_sweep(spec)
    assert all(r.note == "" for r in rows), [r.note for r in rows if r.note]
    return {(r.nu, r.tau): r for r in rows}


@pytest.fixture(scope="module")
def viscosity_rows():
    spec = ExperimentSpec(kind="viscosity", nu_list=(0.1,), tau_base=1e-4,
                          halvings=5, T=0.1, n_points=64, N=21)
    rows = viscosity_sweep(spec)
    assert all(r.note == "" for r in rows)
    return rows


@pytest.fixture(scope="module")
def stability_report():
    spec = ExperimentSpec(kind="stability", nu_list=(1.0, 0.1, 0.01, 1e-5, 0.0),
                          tau_base=0.01, halvings=0, T=2.0, n_points=64, N=21)
    return stability_check(spec)


def test_convergence_rate(convergence_rows):
    """First-order rate: err(tau)/err(tau/2) = 2.0 +- 0.05, every nu, both norms."""
    worst = (0.0, None)
    for nu in NUS:
        for hi, lo in zip(TAUS, TAUS[1:]):
            for col in ("err_B0inf1", "err_B0inf2"):
                ratio = getattr(convergence_rows[(nu, hi)], col) / getattr(
                    convergence_rows[(nu, lo)], col
                )
                dev = abs(ratio - 2.0)
                if dev > worst[0]:
                    worst = (dev, (nu, hi, col, ratio))
    ok = worst[0] <= RATE_TOL
    record_acceptance(
        "convergence rate O(tau)",
        ok,
        f"worst ratio deviation {worst[0]:.4f} at {worst[1]}",
    )
    assert ok, worst


def _cell_deviations(convergence_rows, nus):
    devs = []
    for nu in nus:
        for i, tau in enumerate(TAUS):
            row = convergence_rows[(nu, tau)]
            devs.append((abs(row.err_B0inf1 / TABLE_B1[nu][i] - 1.0), (nu, tau, "B1")))
            devs.append((abs(row.err_B0inf2 / TABLE_B2[nu][i] - 1.0), (nu, tau, "B2")))
    return max(devs, key=lambda d: d[0])


def test_absolute_table_values_nu_ge_001(convergence_rows):
    """Published cells for nu in {1, 0.1, 0.01} reproduced within +-25%."""
    worst = _cell_deviations(convergence_rows, [1.0, 0.1, 0.01])
    ok = worst[0] <= CELL_TOL
    record_acceptance(
        "absolute cells, tables nu>=0.01",
        ok,
        f"worst cell deviation {worst[0]*100:.1f}% at {worst[1]}",
    )
    assert ok, worst


def test_absolute_table_values_nu_1e5(convergence_rows):
    """Published cells for nu = 1e-5 within +-25%.

    Expected to FAIL: the solver (and the exact amplitude recurrence the
    Taylor-Green setup reduces to, under every forcing placement and viscous
    split) produces exactly half the published values, while matching the
    nu >= 0.01 tables to a few percent.  Kept faithful instead of widened;
    analysis in the decisions ledger.
    """
    worst = _cell_deviations(convergence_rows, [1e-5])
    ok = worst[0] <= CELL_TOL
    record_acceptance(
        "absolute cells, table nu=1e-5 (known paper inconsistency)",
        ok,
        f"worst cell deviation {worst[0]*100:.1f}% at {worst[1]}",
    )
    assert ok, worst


def test_b2_over_b1_row_ratios(convergence_rows):
    """Chi-independent check: B2/B1 per row within +-10% of the published ratio."""
    worst = (0.0, None)
    for nu in NUS:
        for i, tau in enumerate(TAUS):
            row = convergence_rows[(nu, tau)]
            ours = row.err_B0inf2 / row.err_B0inf1
            published = TABLE_B2[nu][i] / TABLE_B1[nu][i]
            dev = abs(ours / published - 1.0)
            if dev > worst[0]:
                worst = (dev, (nu, tau, ours, published))
    ok = worst[0] <= ROW_RATIO_TOL
    record_acceptance(
        "B2/B1 row ratios",
        ok,
        f"worst ratio deviation {worst[0]*100:.1f}% at {worst[1]}",
    )
    assert ok, worst


def test_vanishing_viscosity(viscosity_rows):
    """Leading L2 difference 0.0418 +- 10%; halving nu halves all columns +-5%."""
    lead = viscosity_rows[0]
    lead_ok = abs(lead.err_L2 / TABLE5["L2"][0] - 1.0) <= VV_L2_TOL
    worst = (0.0, None)
    for hi, lo in zip(viscosity_rows, viscosity_rows[1:]):
        for col in ("err_L2", "err_B0inf1", "err_B0inf2"):
            ratio = getattr(hi, col) / getattr(lo, col)
            dev = abs(ratio - 2.0) / 2.0
            if dev > worst[0]:
                worst = (dev, (hi.nu, col, ratio))
    rate_ok = worst[0] <= VV_RATE_TOL
    record_acceptance(
        "vanishing viscosity (reference table)",
        lead_ok and rate_ok,
        f"L2(nu=0.1)={lead.err_L2:.4f} vs 0.0418; worst halving deviation "
        f"{worst[0]*100:.1f}% at {worst[1]}",
    )
    assert lead_ok, lead.err_L2
    assert rate_ok, worst


def test_stability_bound(convergence_rows, viscosity_rows, stability_report):
    """Monitor stays under 8x on every run; unforced decay stays under 1+1e-10."""
    forced_ok = all(r.stability_flag is False for r in convergence_rows.values())
    forced_ok &= all(r.stability_flag is False for r in viscosity_rows)
    unforced_worst = max(e.max_ratio for e in stability_report.entries)
    unforced_ok = unforced_worst <= 1.0 + 1e-10
    ok = forced_ok and unforced_ok and stability_report.all_within_bound
    record_acceptance(
        "stability monitor (8x bound)",
        ok,
        f"no forced run flagged: {forced_ok}; worst unforced ratio {unforced_worst:.12f}",
    )
    assert ok


@pytest.mark.parametrize("name,fn", SUITES, ids=[s[0] for s in SUITES])
def test_structural_invariants(name, fn):
    """Invariant suites at their stated tolerances (shared with `selftest`)."""
    ok, detail = fn()
    record_acceptance(f"structural: {name}", ok, detail)
    assert ok, detail


@pytest.mark.parametrize("nu", [0.0, 0.5, 1.0])
def test_manufactured_residual(nu):
    """Forced-case PDE residual <= 1e-10 (spectral, centered dt = 1e-6)."""
    grid = Grid2D(64)
    worst = max(
        pde_residual(ManufacturedCase("ns_forced", nu=nu), t, grid)
        for t in (0.1, 1.0)
    )
    ok = worst <= 1e-10
    record_acceptance(f"manufactured residual nu={nu}", ok, f"max residual {worst:.2e}")
    assert ok, worst
