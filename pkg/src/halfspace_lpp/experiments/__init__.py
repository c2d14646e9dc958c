"""Monte-Carlo experiment harness.

Each module runs one family of checks against the coupled environments:
pathwise comparisons, geodesic crossing and localization, the two-time
covariance with its restart oracle, tail envelopes, the ordered-pair
second-moment bound, and the profile modulus.  Everything reports through
the shared CSV dialect in io, with censoring and fitting rules in stats.
"""

from halfspace_lpp.experiments.comparisons import ComparisonsReport, check_comparisons
from halfspace_lpp.experiments.covariance import (
    CovarianceReport,
    RestartReport,
    restart_variance,
    two_time_covariance,
)
from halfspace_lpp.experiments.crossing import CrossingReport, crossing_probability
from halfspace_lpp.experiments.io import (
    CENSORED,
    CSV_HEADER,
    data_dir,
    sidecar_path,
    write_csv,
    write_sidecar,
)
from halfspace_lpp.experiments.localization import LocalizationReport, localization_profile
from halfspace_lpp.experiments.modulus import ModulusReport, modulus_of_continuity
from halfspace_lpp.experiments.ordered import (
    ExactCaseResult,
    OrderedBoundReport,
    constant_gap_exact_case,
    ordered_increment_samples,
    ordered_rv_bound,
)
from halfspace_lpp.experiments.stats import (
    CENSOR_MIN,
    BoundCheck,
    Estimate,
    FitResult,
    binomial_stderr,
    fit_log_linear,
)
from halfspace_lpp.experiments.tails import (
    DiagonalLowerTailReport,
    RwBoundReport,
    SurchargeReport,
    TailShapeReport,
    diagonal_lower_tail_check,
    lpp_tail_shape,
    rw_bound_check,
    surcharge_bound_check,
)

__all__ = [
    "BoundCheck",
    "CENSORED",
    "CENSOR_MIN",
    "CSV_HEADER",
    "ComparisonsReport",
    "CovarianceReport",
    "CrossingReport",
    "DiagonalLowerTailReport",
    "Estimate",
    "ExactCaseResult",
    "FitResult",
    "LocalizationReport",
    "ModulusReport",
    "OrderedBoundReport",
    "RestartReport",
    "RwBoundReport",
    "SurchargeReport",
    "TailShapeReport",
    "binomial_stderr",
    "check_comparisons",
    "constant_gap_exact_case",
    "crossing_probability",
    "data_dir",
    "diagonal_lower_tail_check",
    "fit_log_linear",
    "localization_profile",
    "lpp_tail_shape",
    "modulus_of_continuity",
    "ordered_increment_samples",
    "ordered_rv_bound",
    "restart_variance",
    "rw_bound_check",
    "sidecar_path",
    "surcharge_bound_check",
    "two_time_covariance",
    "write_csv",
    "write_sidecar",
]
