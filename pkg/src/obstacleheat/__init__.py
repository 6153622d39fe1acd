"""obstacleheat: a numerical laboratory for heat flow with a strong absorber.

The package simulates du/dt = div(grad u) - lam * 1_{absorber} * u with
insulated (zero-flux) walls on a box, and checks the measured decay of the
solution over an observation region against explicit analytic ceilings:
energy damping on the absorber, a geometric shell contraction, and a
sub-exponential envelope in the absorption strength lam.

Layout
------
``geometry``     signed-distance shapes, region masks, shell ladders
``discretize``   grid, reflecting five/seven-point operator, initial data
``evolve``       theta-stepping with conjugate gradients, snapshot stores
``observables``  norms and windows over stored trajectories
``bounds``       the analytic ceilings and their stable evaluation
``harness``      cases, sweeps, CSV/JSON emission, decay fits
``acceptance``   the eleven pass/fail verification criteria
``cli``          the ``obstacleheat`` command line
"""

from .backend import backend_name
from .bounds import (
    BoundReport,
    BoundValue,
    Verdict,
    base_spacetime_bound,
    base_sup_bound,
    coupling_threshold,
    iterated_shell_bound,
    log_maclaurin_tail,
    maclaurin_poly,
    maclaurin_tail,
    mean_value_constant,
    shell_count,
    shell_factor,
    subexp_bound,
    subexp_tier,
    time_refined_bound,
)
from .config import ConfigError, load_config, reference_config
from .discretize import (
    Field,
    Grid,
    InitialDataSpec,
    OperatorSpec,
    build_grid,
    build_initial,
    grad_l2_sq,
    grid_for_domain,
)
from .evolve import SnapshotStore, SolveConfig, SolverError, evolve, step
from .geometry import (
    Ball,
    DomainSpec,
    Ellipse,
    Kidney,
    RegionMask,
    RoundedBox,
    Shape,
    boundary_gap,
    constant_a,
    offset_region,
    shell_family,
)
from .harness import (
    CaseConfig,
    CaseResult,
    DecayFit,
    HarnessError,
    SweepConfig,
    SweepResult,
    case_from_config,
    fit_decay,
    fit_from_csv,
    local_slopes,
    run_case,
    run_sweep,
    sweep_from_config,
    verify_caccioppoli_chain,
    write_csv,
)
from .observables import (
    NormSeries,
    global_series,
    l2_sq,
    region_series,
    spacetime_l2_sq,
    sup_abs,
    sup_over_time,
    sup_pointwise_sq,
)

__version__ = "0.1.0"

__all__ = [
    "backend_name",
    "BoundReport",
    "BoundValue",
    "Verdict",
    "base_spacetime_bound",
    "base_sup_bound",
    "coupling_threshold",
    "iterated_shell_bound",
    "log_maclaurin_tail",
    "maclaurin_poly",
    "maclaurin_tail",
    "mean_value_constant",
    "shell_count",
    "shell_factor",
    "subexp_bound",
    "subexp_tier",
    "time_refined_bound",
    "ConfigError",
    "load_config",
    "reference_config",
    "Field",
    "Grid",
    "InitialDataSpec",
    "OperatorSpec",
    "build_grid",
    "build_initial",
    "grad_l2_sq",
    "grid_for_domain",
    "SnapshotStore",
    "SolveConfig",
    "SolverError",
    "evolve",
    "step",
    "Ball",
    "DomainSpec",
    "Ellipse",
    "Kidney",
    "RegionMask",
    "RoundedBox",
    "Shape",
    "boundary_gap",
    "constant_a",
    "offset_region",
    "shell_family",
    "CaseConfig",
    "CaseResult",
    "DecayFit",
    "HarnessError",
    "SweepConfig",
    "SweepResult",
    "case_from_config",
    "fit_decay",
    "fit_from_csv",
    "local_slopes",
    "run_case",
    "run_sweep",
    "sweep_from_config",
    "verify_caccioppoli_chain",
    "write_csv",
    "NormSeries",
    "global_series",
    "l2_sq",
    "region_series",
    "spacetime_l2_sq",
    "sup_abs",
    "sup_over_time",
    "sup_pointwise_sq",
    "__version__",
]
