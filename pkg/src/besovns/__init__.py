"""Pseudo-spectral 2D Navier-Stokes/Euler solver with Besov-norm analysis."""

from .errors import ConfigurationError, DataError, NonConvergenceError
from .experiments import (
    ExperimentSpec,
    ResultRow,
    StabilityReport,
    convergence_sweep,
    emit_csv,
    read_csv,
    stability_check,
    viscosity_sweep,
)
from .littlewood_paley import (
    BesovIndex,
    CutoffProfile,
    DyadicDecomposition,
    besov_norm,
    bony_decompose,
    chi_eval,
    dyadic_block,
    lp_commutator,
    max_block_index,
    phi_eval,
)
from .manufactured import (
    ErrorReport,
    ManufacturedCase,
    error_report,
    exact_solution,
    forcing,
    forcing_provider,
    taylor_green_shape,
)
from .solver import (
    SolverConfig,
    StepDiagnostics,
    Trajectory,
    leray_project,
    picard_step,
    run_simulation,
)
from .spectral import (
    Grid2D,
    RealField,
    SpectralField,
    VectorField,
    advection_term,
    differentiate,
    forward_transform,
    inverse_transform,
    l2_norm,
    truncate_modes,
)

__all__ = [name for name in dir() if not name.startswith("_")]
