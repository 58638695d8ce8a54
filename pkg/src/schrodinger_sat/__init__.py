"""Schrödinger equation on a circle with an SBP-SAT penalty interface."""

from .core import (
    ConfigurationError,
    GridCircle,
    InitialData,
    NonFiniteStateError,
    Representation,
    RepresentationError,
    WaveFunction,
    make_grid,
    restrict_to_coarse,
    sample_initial_data,
)
from .diagnostics import (
    NormRecorder,
    TimeSeries,
    convergence_index,
    crossing_window,
    error_vs_reference,
    interface_occupancy,
    reflected_fraction,
    relative_drift,
    sigma_norm,
    trapezoid_norm,
)
from .harness import (
    PRESETS,
    ExperimentPreset,
    Overrides,
    RunSpec,
    SnapshotFormatError,
    get_preset,
    run_preset,
    run_reference,
    snapshot_read,
    snapshot_write,
)
from .integrate import (
    IMEX_SSP3_433,
    ImexTableau,
    InstabilityError,
    StepPolicy,
    evolve,
    imex_step,
    propagate_fourier_rk4,
    rk4_step,
    sample_times,
    step_schedule,
)
from .sbp import (
    PeriodicStencil,
    SbpOperator,
    apply_d,
    apply_d_twice,
    apply_periodic_d,
    periodic_stencil,
    sbp_operator,
    verify_sbp_identity,
    weighted_inner,
)
from .scheme import (
    InteractionFactor,
    InterfaceScheme,
    PeriodicScheme,
    SchemeConfig,
    ko_dissipation,
    make_scheme,
    penalty_solve,
    rhs_interface,
    rhs_interface_split,
    rhs_periodic,
)

__all__ = [
    "IMEX_SSP3_433",
    "PRESETS",
    "apply_d",
    "apply_d_twice",
    "apply_periodic_d",
    "ConfigurationError",
    "convergence_index",
    "crossing_window",
    "error_vs_reference",
    "evolve",
    "ExperimentPreset",
    "get_preset",
    "GridCircle",
    "imex_step",
    "ImexTableau",
    "InitialData",
    "InstabilityError",
    "InteractionFactor",
    "interface_occupancy",
    "InterfaceScheme",
    "ko_dissipation",
    "make_grid",
    "make_scheme",
    "NonFiniteStateError",
    "NormRecorder",
    "Overrides",
    "penalty_solve",
    "periodic_stencil",
    "PeriodicScheme",
    "PeriodicStencil",
    "propagate_fourier_rk4",
    "reflected_fraction",
    "relative_drift",
    "Representation",
    "RepresentationError",
    "restrict_to_coarse",
    "rhs_interface",
    "rhs_interface_split",
    "rhs_periodic",
    "rk4_step",
    "run_preset",
    "run_reference",
    "RunSpec",
    "sample_initial_data",
    "sample_times",
    "sbp_operator",
    "SbpOperator",
    "SchemeConfig",
    "sigma_norm",
    "snapshot_read",
    "snapshot_write",
    "SnapshotFormatError",
    "step_schedule",
    "StepPolicy",
    "TimeSeries",
    "trapezoid_norm",
    "verify_sbp_identity",
    "WaveFunction",
    "weighted_inner",
]
