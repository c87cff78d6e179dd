"""SIRS epidemics driven by a two-state random switching environment.

The environment flips between two parameter sets at exponential waiting
times; between flips the population follows deterministic SIRS dynamics.
This package simulates the switched process, classifies its long-run
behaviour from a single threshold, and builds the geometric objects
(invariant regions, the attractor point cloud, occupation histograms)
used to study it.
"""

from ._backend import active_backend, get_kernels
from .dynamics import (
    DEFAULT_STEP,
    EnvParams,
    ModelParams,
    Point,
    basic_reproduction_number,
    equilibrium,
    flow,
    has_endemic_equilibrium,
    in_triangle,
    vector_field,
)
from .errors import (
    InvalidParameterError,
    NotApplicableError,
    NumericalInstabilityError,
    SirswitchError,
    UnresolvedThresholdError,
)
from .geometry import (
    Region,
    RegionKind,
    choose_s_min,
    degeneracy_curve_residual,
    neighborhood,
    quadrangle_abcd,
    region_g,
    region_k,
    sample_region,
    triangle,
    write_polyline_csv,
)
from .limitset import (
    PointCloud,
    absorption_time,
    attractor_cloud,
    hausdorff_distance,
    uniform_entry_time,
    write_cloud_csv,
)
from .presets import PARAM_SETS, PRESET_NAMES, preset_config
from .stationary import (
    DiagnosticTable,
    Histogram,
    boundary_mass,
    convergence_diagnostic,
    default_burn_in,
    merge_histograms,
    occupation_histogram,
    total_variation,
    write_histogram_csv,
)
from .switched import (
    Trajectory,
    reconstruct_removed,
    simulate,
    simulate_time_average,
    switch_samples,
    time_average,
)
from .telegraph import (
    EnvState,
    SwitchPath,
    SwitchRates,
    occupation_fraction,
    sample_path,
    stationary_probabilities,
)
from .threshold import (
    Classification,
    RegimeReport,
    Verdict,
    classify,
    is_proportional,
    occupation_lower_bound,
    permanence_bounds,
    persistence_threshold,
    persistence_verdict,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_STEP",
    "Classification",
    "DiagnosticTable",
    "EnvParams",
    "EnvState",
    "Histogram",
    "InvalidParameterError",
    "ModelParams",
    "NotApplicableError",
    "NumericalInstabilityError",
    "PARAM_SETS",
    "PRESET_NAMES",
    "Point",
    "PointCloud",
    "Region",
    "RegionKind",
    "RegimeReport",
    "SirswitchError",
    "SwitchPath",
    "SwitchRates",
    "Trajectory",
    "UnresolvedThresholdError",
    "Verdict",
    "absorption_time",
    "active_backend",
    "attractor_cloud",
    "basic_reproduction_number",
    "boundary_mass",
    "choose_s_min",
    "classify",
    "convergence_diagnostic",
    "default_burn_in",
    "degeneracy_curve_residual",
    "equilibrium",
    "flow",
    "get_kernels",
    "has_endemic_equilibrium",
    "hausdorff_distance",
    "in_triangle",
    "is_proportional",
    "merge_histograms",
    "neighborhood",
    "occupation_fraction",
    "occupation_histogram",
    "occupation_lower_bound",
    "permanence_bounds",
    "persistence_threshold",
    "persistence_verdict",
    "preset_config",
    "quadrangle_abcd",
    "reconstruct_removed",
    "region_g",
    "region_k",
    "sample_path",
    "sample_region",
    "simulate",
    "simulate_time_average",
    "stationary_probabilities",
    "switch_samples",
    "time_average",
    "total_variation",
    "triangle",
    "uniform_entry_time",
    "vector_field",
    "write_cloud_csv",
    "write_histogram_csv",
    "write_polyline_csv",
]
