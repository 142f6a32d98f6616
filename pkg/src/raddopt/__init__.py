"""Simulation and analysis toolkit for accelerated distributed optimization
with gradient tracking over directed graphs whose links carry bounded
transmission delays."""

from .analysis import (
    AlphaSweep,
    ConvergenceConstants,
    alpha_bar,
    asymptotic_contraction_factor,
    build_G,
    compute_norm_constants,
    compute_sigma,
    contraction_singular_value,
    default_alpha_grid,
    derive_constants,
    estimate_y_bounds,
    min_rho_alpha,
    sigma_route,
    spectral_radius,
    sweep_alpha,
    weighted_norm,
)
from .config import RunConfig, parse_run_config
from .delays import (
    AugmentedSystem,
    DelayAssignment,
    TimeVaryingDelaySampler,
    build_augmented,
    load_delays,
    split_by_delay,
)
from .engine import (
    INTERPRETATIONS,
    Trace,
    residual,
    run_gradient_tracking,
    run_matrix,
    run_message_passing,
    run_ratio_consensus,
)
from .errors import (
    AnalysisError,
    DivergenceError,
    InputError,
    NotStronglyConnectedError,
)
from .graph import (
    Digraph,
    build_weight_matrix,
    is_strongly_connected,
    load_digraph,
    out_degree,
)
from .objectives import (
    LocalObjective,
    QuadraticObjective,
    aggregate_constants,
    closed_form_minimizer,
    gradient_vector,
    load_objectives,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaSweep",
    "AnalysisError",
    "AugmentedSystem",
    "ConvergenceConstants",
    "DelayAssignment",
    "Digraph",
    "DivergenceError",
    "INTERPRETATIONS",
    "InputError",
    "LocalObjective",
    "NotStronglyConnectedError",
    "QuadraticObjective",
    "RunConfig",
    "TimeVaryingDelaySampler",
    "Trace",
    "aggregate_constants",
    "alpha_bar",
    "asymptotic_contraction_factor",
    "build_G",
    "build_augmented",
    "build_weight_matrix",
    "closed_form_minimizer",
    "compute_norm_constants",
    "compute_sigma",
    "contraction_singular_value",
    "default_alpha_grid",
    "derive_constants",
    "estimate_y_bounds",
    "gradient_vector",
    "is_strongly_connected",
    "load_delays",
    "load_digraph",
    "load_objectives",
    "min_rho_alpha",
    "out_degree",
    "parse_run_config",
    "residual",
    "run_gradient_tracking",
    "run_matrix",
    "run_message_passing",
    "run_ratio_consensus",
    "sigma_route",
    "spectral_radius",
    "split_by_delay",
    "sweep_alpha",
    "weighted_norm",
]
