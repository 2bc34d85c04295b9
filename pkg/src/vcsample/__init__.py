"""Sampling for finite geometric range spaces of bounded VC dimension.

Sample-size calculators, sampling with repetition, exhaustive verifiers
for the classical and weight-sensitive approximation guarantees, an
approximate range-counting estimator, and a Monte-Carlo experiment
harness with leading-constant calibration.
"""

from .errors import (
    BudgetExceededError,
    CalibrationError,
    ParameterError,
    VcSampleError,
)
from .estimator import GUARANTEES, CountEstimate, estimate_count
from .harness import (
    ExperimentConfig,
    ExperimentResult,
    SourceSpec,
    calibrate_constant,
    canonical_property,
    generate_ground_set,
    run_experiment,
    sample_size_for,
    size_table,
    size_table_csv,
)
from .ranges import (
    DEFAULT_BUDGET,
    FAMILIES,
    EnumerationBudget,
    GroundSet,
    InducedRange,
    InducedRangeSet,
    RangeFamily,
    contains,
    enumerate_induced_ranges,
    family,
    fractional_weight,
    induced_ranges,
    read_points_csv,
    sauer_shelah_bound,
    write_points_csv,
)
from .sampling import (
    Sample,
    SamplingParams,
    dist_nu,
    draw_sample,
    meets_deviation_bound,
    read_sample_json,
    sample_size_base,
    sample_weight,
    sensitive_level_count,
    size_eps_approx,
    size_eps_net,
    size_relative,
    size_sensitive,
    write_sample_json,
)
from .verify import (
    PROPERTIES,
    VerificationReport,
    check_sensitive_implies_net_approx,
    check_sensitive_implies_relative,
    verify_eps_approx,
    verify_eps_net,
    verify_relative,
    verify_relative_sensitive,
    verify_sensitive,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "VcSampleError",
    "ParameterError",
    "BudgetExceededError",
    "CalibrationError",
    # ranges
    "GroundSet",
    "RangeFamily",
    "FAMILIES",
    "family",
    "contains",
    "InducedRange",
    "InducedRangeSet",
    "fractional_weight",
    "sauer_shelah_bound",
    "EnumerationBudget",
    "DEFAULT_BUDGET",
    "induced_ranges",
    "enumerate_induced_ranges",
    "read_points_csv",
    "write_points_csv",
    # sampling
    "SamplingParams",
    "dist_nu",
    "meets_deviation_bound",
    "sample_size_base",
    "size_eps_net",
    "size_eps_approx",
    "size_sensitive",
    "sensitive_level_count",
    "size_relative",
    "Sample",
    "draw_sample",
    "sample_weight",
    "write_sample_json",
    "read_sample_json",
    # verify
    "PROPERTIES",
    "VerificationReport",
    "verify_eps_net",
    "verify_eps_approx",
    "verify_sensitive",
    "verify_relative",
    "verify_relative_sensitive",
    "check_sensitive_implies_net_approx",
    "check_sensitive_implies_relative",
    # estimator
    "CountEstimate",
    "estimate_count",
    "GUARANTEES",
    # harness
    "SourceSpec",
    "ExperimentConfig",
    "ExperimentResult",
    "canonical_property",
    "generate_ground_set",
    "sample_size_for",
    "run_experiment",
    "calibrate_constant",
    "size_table",
    "size_table_csv",
]
