"""Entropic interpolation bridges over 1-D heat and Ornstein-Uhlenbeck kernels.

Grid-based Schrödinger systems, closed-form Gaussian bridges, action
decompositions, dual certificates, and semigroup contraction checks.
"""

from .contraction import (
    ContractionSchedule,
    check_commutation,
    check_commutation_dimensional,
    check_entropic_contraction,
    check_entropic_contraction_dimensional,
    check_wasserstein_contraction,
    check_wasserstein_contraction_dimensional,
    contraction_schedule,
    evolve_gaussian,
)
from .dual import DualReport, dual_functional, dual_gap
from .dynamics import (
    ActionDecomposition,
    BridgePath,
    build_closed_form_path,
    build_sinkhorn_path,
    continuity_residual,
    forward_action,
    symmetric_decomposition,
)
from .exceptions import (
    AbsoluteContinuityError,
    BridgekitError,
    ConfigError,
    ConvergenceError,
    DiscretizationError,
    IllConditionedPathError,
    KernelTruncationError,
    MassDeficitError,
    ModelMismatchError,
    ScheduleDomainError,
    UnsupportedCaseError,
)
from .gaussian_bridge import (
    BridgeMoment,
    HeatBridgeParams,
    OUBridgeParams,
    bridge_density,
    bridge_moments,
    bridge_params,
    current_velocity,
    dual_potential,
    entropic_cost_closed_form,
    osmotic_velocity,
    pushforward_map,
)
from .measures import (
    GaussianMeasure,
    Grid,
    GridDensity,
    GridFunction,
    ReferenceMeasure,
    default_grid,
    gaussian_grid_density,
    mccann_interpolation,
    relative_entropy,
    wasserstein2_gaussian,
)
from .semigroup import (
    KernelMatrix,
    KolmogorovModel,
    build_kernel,
    entropic_hopf_lax,
    heat_model,
    ou_model,
    semigroup_apply,
)
from .sinkhorn import (
    SchrodingerSolver,
    SchroedingerSolution,
    entropic_cost,
    entropic_interpolation,
    solve_schrodinger_system,
)

__version__ = "0.1.0"

__all__ = [
    "AbsoluteContinuityError",
    "ActionDecomposition",
    "BridgeMoment",
    "BridgePath",
    "BridgekitError",
    "ConfigError",
    "ContractionSchedule",
    "ConvergenceError",
    "DiscretizationError",
    "DualReport",
    "GaussianMeasure",
    "Grid",
    "GridDensity",
    "GridFunction",
    "HeatBridgeParams",
    "IllConditionedPathError",
    "KernelMatrix",
    "KernelTruncationError",
    "KolmogorovModel",
    "MassDeficitError",
    "ModelMismatchError",
    "OUBridgeParams",
    "ReferenceMeasure",
    "ScheduleDomainError",
    "SchrodingerSolver",
    "SchroedingerSolution",
    "UnsupportedCaseError",
    "build_closed_form_path",
    "build_kernel",
    "build_sinkhorn_path",
    "bridge_density",
    "bridge_moments",
    "bridge_params",
    "check_commutation",
    "check_commutation_dimensional",
    "check_entropic_contraction",
    "check_entropic_contraction_dimensional",
    "check_wasserstein_contraction",
    "check_wasserstein_contraction_dimensional",
    "continuity_residual",
    "contraction_schedule",
    "current_velocity",
    "default_grid",
    "dual_functional",
    "dual_gap",
    "dual_potential",
    "entropic_cost",
    "entropic_cost_closed_form",
    "entropic_hopf_lax",
    "entropic_interpolation",
    "evolve_gaussian",
    "forward_action",
    "gaussian_grid_density",
    "heat_model",
    "mccann_interpolation",
    "osmotic_velocity",
    "ou_model",
    "pushforward_map",
    "relative_entropy",
    "semigroup_apply",
    "solve_schrodinger_system",
    "symmetric_decomposition",
    "wasserstein2_gaussian",
]
