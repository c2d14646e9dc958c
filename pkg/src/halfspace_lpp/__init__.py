"""Exponential last passage percolation in a half quadrant.

Simulation engine and Pfaffian-kernel numerics for half-space LPP with
boundary weights on the diagonal and the bottom row.  The package couples
families of environments through a shared counter-based uniform field, runs
the pathwise comparison / crossing / localization experiments on top of the
DP engine, and evaluates the limiting distribution through a Fredholm
Pfaffian series.

Layout:

* :mod:`halfspace_lpp.env`       coupled random environments
* :mod:`halfspace_lpp.engine`    last-passage dynamic programming
* :mod:`halfspace_lpp.geodesic`  backtracking, ordering, crossing events
* :mod:`halfspace_lpp.scaling`   KPZ scaling frame and rescaled observables
* :mod:`halfspace_lpp.pfaffian`  Pfaffian, contour kernel, Fredholm series
* :mod:`halfspace_lpp.experiments`  replica drivers and estimators
* :mod:`halfspace_lpp.cli`       the ``lpp`` command
"""

from halfspace_lpp.env import (
    Constraint,
    EnvironmentSpec,
    ModelKind,
    RegionTag,
    classify_region,
    decompose_increment_pair,
    weight_at,
)
from halfspace_lpp.engine import NoPathError, PassageTable, last_passage, last_passage_line
from halfspace_lpp.geodesic import (
    CrossingReport,
    Geodesic,
    backtrack,
    crossing_event,
    geodesic_ordering,
    max_excursion,
)
from halfspace_lpp.scaling import ScalingFrame, q_point, rescale_pp, threshold_S
from halfspace_lpp.pfaffian import (
    FredholmResult,
    KernelParams,
    fredholm_pfaffian_cdf,
    kernel_entry,
    pfaffian,
    phi,
)

__version__ = "0.1.0"

__all__ = [
    "Constraint",
    "CrossingReport",
    "EnvironmentSpec",
    "FredholmResult",
    "Geodesic",
    "KernelParams",
    "ModelKind",
    "NoPathError",
    "PassageTable",
    "RegionTag",
    "ScalingFrame",
    "backtrack",
    "classify_region",
    "crossing_event",
    "decompose_increment_pair",
    "fredholm_pfaffian_cdf",
    "geodesic_ordering",
    "kernel_entry",
    "last_passage",
    "last_passage_line",
    "max_excursion",
    "pfaffian",
    "phi",
    "q_point",
    "rescale_pp",
    "threshold_S",
    "weight_at",
]
