"""Second-moment bound for ordered nonnegative pairs.

For samples with 0 <= A <= B pathwise, splitting E[(B-A)^2] at the level
R (1-tau)^(2/3) and applying Cauchy-Schwarz plus Markov to the overshoot
gives, for every R > 0,

    E[(B-A)^2] <= R^2 (1-tau)^(4/3) + (1-tau)^(2/3) sqrt(C1 K / R),

with C1 = E[B^4] / (1-tau)^(4/3) and K = E[B-A] / (1-tau)^(2/3) taken from
the same samples.  At R = (1-tau)^(-4/15) both terms balance and the right
side collapses to (1-tau)^(4/5) (1 + sqrt(C1 K)).  The argument never uses
the distribution, so the inequality must hold on empirical moments too;
a violation is an arithmetic bug, not bad luck.  The constant-gap case is
checked in exact rational arithmetic with 1 - tau a 15th power, which makes
every fractional power rational.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from halfspace_lpp import _kernels
from halfspace_lpp.env import StationaryRho
from halfspace_lpp.errors import InvariantViolation
from halfspace_lpp.experiments._mc import TOL_PATHWISE, base_row, group_hash, model_rows
from halfspace_lpp.scaling import ScalingFrame, q_point


@dataclass(frozen=True)
class OrderedBoundReport:
    one_minus_tau: float
    r_value: float
    c1: float
    k: float
    lhs: float
    rhs: float
    rhs_closed_form: float | None  # set when R is the balancing choice
    satisfied: bool
    n: int
    seed0: int

    def csv_rows(self, frame: ScalingFrame) -> list[tuple]:
        named = (
            ("ordered_c1", self.c1),
            ("ordered_k", self.k),
            ("ordered_lhs", self.lhs),
            (f"ordered_rhs[R={self.r_value:g}]", self.rhs),
            ("ordered_satisfied", int(self.satisfied)),
        )
        rows = [
            base_row("ordered", frame, param, value, None, self.n, self.seed0)
            for param, value in named
        ]
        if self.rhs_closed_form is not None:
            rows.append(
                base_row("ordered", frame, "ordered_rhs_closed",
                         self.rhs_closed_form, None, self.n, self.seed0)
            )
        return rows


def ordered_rv_bound(
    samples_a: np.ndarray,
    samples_b: np.ndarray,
    one_minus_tau: float,
    r_value: float | None = None,
    seed0: int = 0,
) -> OrderedBoundReport:
    a = np.asarray(samples_a, dtype=np.float64)
    b = np.asarray(samples_b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1 or a.size < 2:
        raise ValueError("need two equal-length 1-d sample arrays with n >= 2")
    if np.any(a < 0.0):
        raise ValueError("samples_a must be nonnegative")
    if np.any(a > b):
        bad = int(np.count_nonzero(a > b))
        raise ValueError(f"pathwise order A <= B violated on {bad} of {a.size} samples")
    if not 0.0 < one_minus_tau < 1.0:
        raise ValueError(f"1 - tau must lie in (0,1), got {one_minus_tau}")

    omt = one_minus_tau
    canonical = omt ** (-4.0 / 15.0)
    r = canonical if r_value is None else float(r_value)
    if r <= 0.0:
        raise ValueError(f"R must be positive, got {r}")

    n = a.size
    gap = b - a
    c1 = math.fsum((b ** 4).tolist()) / n / omt ** (4.0 / 3.0)
    k = math.fsum(gap.tolist()) / n / omt ** (2.0 / 3.0)
    lhs = math.fsum((gap * gap).tolist()) / n
    rhs = r * r * omt ** (4.0 / 3.0) + omt ** (2.0 / 3.0) * math.sqrt(c1 * k / r)
    closed = omt ** 0.8 * (1.0 + math.sqrt(c1 * k)) if r == canonical else None
    return OrderedBoundReport(
        one_minus_tau=omt,
        r_value=r,
        c1=c1,
        k=k,
        lhs=lhs,
        rhs=rhs,
        rhs_closed_form=closed,
        satisfied=lhs <= rhs * (1.0 + 1e-12),
        n=n,
        seed0=seed0,
    )


def ordered_increment_samples(
    frame: ScalingFrame,
    u1: float = 0.25,
    u2: float = 1.0,
    n_replicas: int = 10_000,
    seed0: int = 0,
    coupling_group: str = "ordered",
) -> tuple[np.ndarray, np.ndarray]:
    """Coupled positive-part increments of the two stationary densities.

    The slower-density increment sits below the faster one pathwise, and
    clamping at zero keeps the order while making both legs nonnegative.
    """
    if frame.kappa <= 0.0:
        raise ValueError("ordered samples need kappa > 0 so the densities differ")
    if not 0.0 <= u1 < u2:
        raise ValueError(f"need 0 <= u1 < u2, got {u1}, {u2}")
    kinds = [StationaryRho(frame.rho_minus), StationaryRho(frame.rho)]
    models = model_rows(kinds, frame.N, seed0, coupling_group)
    ends = np.array([q_point(frame, u1, 1.0), q_point(frame, u2, 1.0)], dtype=np.int64)
    raw = _kernels.drv_values(
        n_replicas, np.uint64(seed0), np.uint64(group_hash(coupling_group)), models, ends
    )
    inc = (raw[:, :, 1] - raw[:, :, 0]) / frame.value_scale
    a = np.maximum(inc[:, 0], 0.0)
    b = np.maximum(inc[:, 1], 0.0)
    gap = a - b
    if np.any(gap > TOL_PATHWISE):
        bad = int(np.count_nonzero(gap > TOL_PATHWISE))
        raise InvariantViolation(
            f"slow-density increment above the fast one on {bad} of {a.size} replicas"
        )
    # Replicas whose geodesics coincide give equal increments that the two
    # per-model subtractions can misorder by an ulp; snap those, not real gaps.
    np.minimum(a, b, out=a)
    return a, b


@dataclass(frozen=True)
class ExactCaseResult:
    """Constant-gap instance evaluated without floats: A = 0, B = gap."""

    gap: Fraction
    one_minus_tau: Fraction
    lhs: Fraction
    rhs: Fraction
    closed_form: Fraction
    holds: bool


def _exact_sqrt(x: Fraction) -> Fraction:
    num, den = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if num * num != x.numerator or den * den != x.denominator:
        raise ValueError(f"{x} is not a perfect rational square")
    return Fraction(num, den)


def constant_gap_exact_case(gap: int = 4, t: Fraction = Fraction(1, 2)) -> ExactCaseResult:
    """Evaluate the bound exactly with 1 - tau = t^15 and B identically gap.

    gap must be a perfect square so sqrt(C1 K / R) = gap^(5/2) t^(-13) stays
    rational.  Also confirms that the balancing R reproduces the closed form
    identically, not just approximately.
    """
    if not 0 < t < 1:
        raise ValueError(f"t must lie in (0,1), got {t}")
    b = Fraction(gap)
    omt_43 = t ** 20  # (t^15)^(4/3)
    omt_23 = t ** 10
    omt_45 = t ** 12
    r = t ** -4  # (t^15)^(-4/15)
    c1 = b ** 4 / omt_43
    k = b / omt_23
    lhs = b * b
    rhs = r * r * omt_43 + omt_23 * _exact_sqrt(c1 * k / r)
    closed = omt_45 * (1 + _exact_sqrt(c1 * k))
    if rhs != closed:
        raise AssertionError(f"balancing-R algebra broken: {rhs} != {closed}")
    return ExactCaseResult(
        gap=b,
        one_minus_tau=t ** 15,
        lhs=lhs,
        rhs=rhs,
        closed_form=closed,
        holds=lhs <= rhs,
    )
