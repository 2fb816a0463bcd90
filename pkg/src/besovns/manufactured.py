"""Taylor-Green exact solution, engineered forcing, and error reporting.

The exact field

    u_e(t) = e^{-t} * (-0.5 sin x cos y, 0.5 cos x sin y)

lives on the four modes (+-1, +-1) and is divergence-free for all t.  Its
self-advection is a pure gradient, so the Leray-projected momentum balance
reduces to d/dt u_e = nu Lap u_e + P f, and with Lap u_e = -2 u_e the
projected forcing closes in two flavors:

    viscous run   P f(t) = (2 nu - 1) u_e(t)
    inviscid run  P f(t) = -u_e(t)          (nu-independent)

The inviscid forcing drives the vanishing-viscosity experiments: the solver
runs with viscosity nu against a forcing whose exact solution at nu = 0 is
u_e, so the measured drift is O(nu).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .littlewood_paley import BesovIndex, besov_norm
from .solver import leray_project
from .spectral import Grid2D, SpectralField, VectorField, l2_norm

AMPLITUDE = 0.5
DECAY_RATE = 1.0

_B01 = BesovIndex(0.0, math.inf, 1)
_B02 = BesovIndex(0.0, math.inf, 2)


@dataclass(frozen=True)
class ManufacturedCase:
    """Forcing flavor: "ns_forced" uses nu, "euler_forced" ignores it."""

    mode: str
    nu: float = 0.0

    def __post_init__(self):
        if self.mode not in ("ns_forced", "euler_forced"):
            raise ConfigurationError(f"unknown manufactured mode {self.mode!r}")
        if self.mode == "ns_forced" and self.nu < 0:
            raise ConfigurationError("ns_forced needs viscosity >= 0")

    def forcing_coefficient(self) -> float:
        if self.mode == "ns_forced":
            return 2.0 * self.nu - 1.0
        return -1.0


def taylor_green_shape(grid: Grid2D, amplitude: float = AMPLITUDE) -> VectorField:
    """(-(a) sin x cos y, (a) cos x sin y) assembled directly in mode space."""
    n = grid.n_points
    c1 = np.zeros((n, n), dtype=complex)
    c2 = np.zeros((n, n), dtype=complex)
    # sin x cos y = sum of (+-1, +-1) modes with coefficients -i*s1/4,
    # cos x sin y likewise with -i*s2/4, where s1 = sign(k1), s2 = sign(k2)
    quarter = amplitude / 4.0
    for s1 in (1, -1):
        for s2 in (1, -1):
            c1[s1, s2] = -(-1j * s1 * quarter)
            c2[s1, s2] = -1j * s2 * quarter
    return VectorField(
        SpectralField(grid, c1), SpectralField(grid, c2), div_free=True
    )


def exact_solution(t: float, grid: Grid2D) -> VectorField:
    """u_e(t): the Taylor-Green pair with amplitude 0.5 e^{-t}."""
    if t < 0:
        raise ConfigurationError("exact solution is defined for t >= 0")
    return taylor_green_shape(grid, AMPLITUDE * math.exp(-DECAY_RATE * t))


def forcing(t: float, case: ManufacturedCase, grid: Grid2D) -> VectorField:
    """Leray-projected forcing P f(t) for the requested case."""
    if t < 0:
        raise ConfigurationError("forcing is defined for t >= 0")
    coef = case.forcing_coefficient()
    return taylor_green_shape(grid, coef * AMPLITUDE * math.exp(-DECAY_RATE * t))


def forcing_provider(case: ManufacturedCase):
    """Adapter matching the solver's (t, grid) -> VectorField signature."""

    def provide(t: float, grid: Grid2D) -> VectorField:
        return forcing(t, case, grid)

    return provide


def pde_residual(case: ManufacturedCase, t: float, grid: Grid2D, dt: float = 1e-6) -> float:
    """Max-coefficient defect of d/dt u_e + P(u_e.grad u_e) - nu Lap u_e - P f.

    The time derivative is a centered difference with step dt; everything
    else is evaluated spectrally.
    """
    from .spectral import advection_term, differentiate

    nu = case.nu if case.mode == "ns_forced" else 0.0
    if t - dt < 0:
        raise ConfigurationError("need t >= dt for the centered difference")
    up = exact_solution(t + dt, grid)
    um = exact_solution(t - dt, grid)
    ue = exact_solution(t, grid)
    dudt1 = (up.u1.coeffs - um.u1.coeffs) / (2 * dt)
    dudt2 = (up.u2.coeffs - um.u2.coeffs) / (2 * dt)
    adv = leray_project(advection_term(ue, ue))
    f = forcing(t, case, grid)
    r1 = (
        dudt1
        + adv.u1.coeffs
        - nu * differentiate(ue.u1, "laplacian").coeffs
        - f.u1.coeffs
    )
    r2 = (
        dudt2
        + adv.u2.coeffs
        - nu * differentiate(ue.u2, "laplacian").coeffs
        - f.u2.coeffs
    )
    return max(float(np.max(np.abs(r1))), float(np.max(np.abs(r2))))


@dataclass(frozen=True)
class ErrorReport:
    err_L2: float
    err_B0_inf_1: float
    err_B0_inf_2: float
    time: float

    def __post_init__(self):
        for v in (self.err_L2, self.err_B0_inf_1, self.err_B0_inf_2):
            if not (v >= 0):
                raise ConfigurationError("error norms must be non-negative")


def error_report(u_num: VectorField, t: float) -> ErrorReport:
    """Norms of u_num - u_e(t) in L^2, B^0_{inf,1} and B^0_{inf,2}."""
    ue = exact_solution(t, u_num.grid)
    diff = u_num - ue
    return ErrorReport(
        err_L2=l2_norm(diff),
        err_B0_inf_1=besov_norm(diff, _B01),
        err_B0_inf_2=besov_norm(diff, _B02),
        time=t,
    )
