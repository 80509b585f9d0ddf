"""Simulation and analytic classification of one-dimensional SDEs
dZ = sigma(Z-) dX driven by symmetric alpha-stable processes, alpha in (0,1).
"""

from .funcspec import (
    FunctionSpec,
    FunctionSpecError,
    Piece,
    PoleMark,
    PowerForm,
    TableForm,
    ZeroMark,
    parse_inline,
)
from .functionals import (
    PathVerdict,
    Thresholds,
    classify_path,
    discretization_bias,
    effective_contributions,
    first_hitting_time,
    inverse_time_change,
    last_exit_time,
    path_integral,
)
from .integrals import (
    PointedSet,
    TestVerdict,
    UnflaggedZeroError,
    irregular_set,
    kernel_integral,
    monotone_pole_test,
    power_law_test,
    zero_set,
)
from .intervals import (
    IntervalSet,
    SeriesVerdict,
    ShellSpec,
    ball_capacity,
    build_example_set,
    capacity_lower_bound,
    example_set_potential_partial_sums,
    interval_capacity_upper,
    shell,
    wiener_sum,
)
from .sde import (
    ClassificationReport,
    SolutionPath,
    StatusSummary,
    classify_sde,
    solution_status_summary,
    solve_time_change,
)
from .experiments import (
    Estimate,
    ExperimentConfig,
    estimate_finiteness_probability,
    estimate_hitting_probability,
    estimate_smalltime_finiteness,
    run_experiment,
    wilson_ci,
)
from .stable import (
    KillingSpec,
    PathSample,
    StableParams,
    potential_kernel,
    sample_increment,
    sample_path,
    stream_rng,
)

__all__ = [
    "FunctionSpec",
    "FunctionSpecError",
    "Piece",
    "PoleMark",
    "PowerForm",
    "TableForm",
    "ZeroMark",
    "parse_inline",
    "PathVerdict",
    "Thresholds",
    "classify_path",
    "discretization_bias",
    "effective_contributions",
    "first_hitting_time",
    "inverse_time_change",
    "last_exit_time",
    "path_integral",
    "PointedSet",
    "TestVerdict",
    "UnflaggedZeroError",
    "irregular_set",
    "kernel_integral",
    "monotone_pole_test",
    "power_law_test",
    "zero_set",
    "IntervalSet",
    "SeriesVerdict",
    "ShellSpec",
    "ball_capacity",
    "build_example_set",
    "capacity_lower_bound",
    "example_set_potential_partial_sums",
    "interval_capacity_upper",
    "shell",
    "wiener_sum",
    "ClassificationReport",
    "SolutionPath",
    "StatusSummary",
    "classify_sde",
    "solution_status_summary",
    "solve_time_change",
    "Estimate",
    "ExperimentConfig",
    "estimate_finiteness_probability",
    "estimate_hitting_probability",
    "estimate_smalltime_finiteness",
    "run_experiment",
    "wilson_ci",
    "KillingSpec",
    "PathSample",
    "StableParams",
    "potential_kernel",
    "sample_increment",
    "sample_path",
    "stream_rng",
]

__version__ = "0.1.0"
