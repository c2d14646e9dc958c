"""Estimators shared by the Monte-Carlo experiments.

Aggregation uses math.fsum, which is exactly rounded and therefore
independent of summation order; together with the per-replica output slots
of the drivers this is what makes every experiment's CSV byte-identical
across thread counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

# An empirical probability below CENSOR_MIN/n carries no usable information
# at MC precision; such points are reported as censored, never as zero.
CENSOR_MIN = 10


def _fsum(values: Iterable[float]) -> float:
    return math.fsum(float(v) for v in values)


@dataclass(frozen=True)
class Estimate:
    """A sample mean with its spread: stderr = sqrt(variance / n)."""

    mean: float
    variance: float
    stderr: float
    n: int
    seed0: int

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"an Estimate needs n >= 2 samples, got {self.n}")
        if self.variance < 0.0:
            raise ValueError(f"negative variance {self.variance}")

    @classmethod
    def from_samples(cls, values: Sequence[float], seed0: int) -> "Estimate":
        n = len(values)
        if n < 2:
            raise ValueError(f"an Estimate needs n >= 2 samples, got {n}")
        mean = _fsum(values) / n
        var = _fsum((float(v) - mean) ** 2 for v in values) / (n - 1)
        return cls(mean=mean, variance=var, stderr=math.sqrt(var / n), n=n, seed0=seed0)


def binomial_stderr(p_hat: float, n: int) -> float:
    return math.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / n)


@dataclass(frozen=True)
class BoundCheck:
    """Empirical probabilities against a pointwise bound.

    satisfied holds iff empirical[k] <= bound[k] + 3*stderr[k] at every
    non-censored k.  Censored points (fewer than CENSOR_MIN hits) are
    excluded: too rare to confirm or refute anything.
    """

    abscissae: tuple[float, ...]
    empirical: tuple[float, ...]
    stderr: tuple[float, ...]
    bound: tuple[float, ...]
    censored: tuple[bool, ...]
    satisfied: bool
    n: int

    @classmethod
    def from_counts(
        cls,
        abscissae: Sequence[float],
        counts: Sequence[int],
        n: int,
        bound: Sequence[float],
    ) -> "BoundCheck":
        if not (len(abscissae) == len(counts) == len(bound)):
            raise ValueError("abscissae, counts and bound must have equal length")
        p_hat = tuple(c / n for c in counts)
        se = tuple(binomial_stderr(p, n) for p in p_hat)
        cens = tuple(c < CENSOR_MIN for c in counts)
        ok = all(
            p <= b + 3.0 * s
            for p, s, b, c in zip(p_hat, se, bound, cens)
            if not c
        )
        return cls(
            abscissae=tuple(float(a) for a in abscissae),
            empirical=p_hat,
            stderr=se,
            bound=tuple(float(b) for b in bound),
            censored=cens,
            satisfied=ok,
            n=n,
        )


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r_squared: float
    n_used: int


def fit_log_linear(
    x: Sequence[float],
    p_hat: Sequence[float],
    censored: Sequence[bool],
) -> FitResult:
    """Least squares of ln(p) on x, censored points dropped.

    Used for every decay-shape check: the bounds under test fix a functional
    form but not its constants, so the exponent is fitted, never asserted.
    """
    xs = [float(a) for a, p, c in zip(x, p_hat, censored) if not c and p > 0.0]
    ys = [math.log(p) for p, c in zip(p_hat, censored) if not c and p > 0.0]
    if len(xs) < 2:
        raise ValueError(f"log-linear fit needs >= 2 uncensored points, got {len(xs)}")
    a = np.vstack([np.asarray(xs), np.ones(len(xs))]).T
    (slope, intercept), *_ = np.linalg.lstsq(a, np.asarray(ys), rcond=None)
    fitted = slope * np.asarray(xs) + intercept
    resid = np.asarray(ys) - fitted
    total = np.asarray(ys) - np.mean(ys)
    ss_tot = float(np.dot(total, total))
    r2 = 1.0 - float(np.dot(resid, resid)) / ss_tot if ss_tot > 0.0 else 1.0
    return FitResult(slope=float(slope), intercept=float(intercept), r_squared=r2, n_used=len(xs))
