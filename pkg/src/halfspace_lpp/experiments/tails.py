"""Tail bounds: explicit random-walk envelopes, decay-shape fits for the
passage-value tails, and the fitted-constant lower-tail bound on the
diagonal.

Two kinds of statement live here.  The random-walk and surcharge bounds
come with explicit constants, so the empirical tail is compared against the
stated envelope directly.  The passage-value tails and the diagonal
lower-tail bound only fix a functional form; their constants are fitted
(one anchor point, or a least-squares exponent), never asserted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from halfspace_lpp import _kernels
from halfspace_lpp.env import PointToPoint, StationaryRho
from halfspace_lpp.experiments._mc import base_row, group_hash, model_rows
from halfspace_lpp.experiments.io import CENSORED
from halfspace_lpp.experiments.stats import (
    CENSOR_MIN,
    BoundCheck,
    FitResult,
    binomial_stderr,
    fit_log_linear,
)
from halfspace_lpp.scaling import ScalingFrame, q_point


def _prob_rows(
    experiment: str,
    frame: ScalingFrame,
    tag: str,
    check: BoundCheck,
    seed0: int,
    labels: tuple[str, ...] | None = None,
) -> list[tuple]:
    if labels is None:
        labels = tuple(f"{a:g}" for a in check.abscissae)
    rows = []
    for label, p, se, b, cens in zip(
        labels, check.empirical, check.stderr, check.bound, check.censored
    ):
        value = CENSORED if cens else p
        err = None if cens else se
        rows.append(
            base_row(experiment, frame, f"{tag}[{label}]", value, err, check.n, seed0)
        )
        rows.append(
            base_row(experiment, frame, f"{tag}_bound[{label}]", b, None, check.n, seed0)
        )
    return rows


# ---------------------------------------------------------------------------
# Random-walk envelope, explicit constants.


@dataclass(frozen=True)
class RwBoundReport:
    frame: ScalingFrame
    length: float
    n_replicas: int
    seed0: int
    lower: BoundCheck  # P(W_final <= -xi) <= 2 exp(-xi^2/(4L))
    upper: BoundCheck  # P(W_final >= +xi) <= 2 exp(-xi^2/(4L))
    sup: BoundCheck    # P(sup_k W_k >= xi) <=   exp(-xi^2/(4L))

    @property
    def satisfied(self) -> bool:
        return self.lower.satisfied and self.upper.satisfied and self.sup.satisfied

    def csv_rows(self) -> list[tuple]:
        rows = []
        for tag, check in (("p_lower", self.lower), ("p_upper", self.upper), ("p_sup", self.sup)):
            rows.extend(_prob_rows("rw-bounds", self.frame, tag, check, self.seed0))
        return rows


def rw_bound_check(
    frame: ScalingFrame,
    length: float = 1.0,
    xi_grid: tuple[float, ...] = (1.0, 1.5, 2.0),
    n_replicas: int = 100_000,
    seed0: int = 0,
    coupling_group: str = "rw",
) -> RwBoundReport:
    """Centered walk of anti-diagonal increment terms over [0, length].

    One step adds Exp(1-rho) - Exp(rho) minus the linear compensation
    4 * 2^(-1/3) * delta * N^(-1/3); the rescaled endpoint and running sup
    are then tested against the Gaussian-type envelopes.
    """
    if length <= 0.0:
        raise ValueError(f"length must be positive, got {length}")
    n_terms = math.floor(length * frame.spatial_scale)
    if n_terms < 1:
        raise ValueError(f"length {length} at N={frame.N} gives an empty walk")
    drift = 4.0 * 2.0 ** (-1.0 / 3.0) * frame.delta * frame.N ** (-1.0 / 3.0)
    out = _kernels.drv_random_walk(
        n_replicas,
        np.uint64(seed0),
        np.uint64(group_hash(coupling_group)),
        np.int64(n_terms),
        1.0 - frame.rho,
        frame.rho,
        drift,
        frame.value_scale,
    )
    w_final = out[:, 0]
    w_sup = out[:, 1]

    two_sided = [2.0 * math.exp(-xi * xi / (4.0 * length)) for xi in xi_grid]
    one_sided = [math.exp(-xi * xi / (4.0 * length)) for xi in xi_grid]
    n = n_replicas
    lower = BoundCheck.from_counts(
        xi_grid, [int(np.count_nonzero(w_final <= -xi)) for xi in xi_grid], n, two_sided
    )
    upper = BoundCheck.from_counts(
        xi_grid, [int(np.count_nonzero(w_final >= xi)) for xi in xi_grid], n, two_sided
    )
    sup = BoundCheck.from_counts(
        xi_grid, [int(np.count_nonzero(w_sup >= xi)) for xi in xi_grid], n, one_sided
    )
    return RwBoundReport(
        frame=frame, length=length, n_replicas=n, seed0=seed0,
        lower=lower, upper=upper, sup=sup,
    )


# ---------------------------------------------------------------------------
# Surcharge sums, explicit constants.

SURCHARGE_C = 2.0


@dataclass(frozen=True)
class SurchargeReport:
    frame: ScalingFrame
    u: float
    n_replicas: int
    seed0: int
    check: BoundCheck  # P(scaled sum >= 2 u kappa + s N^(-1/3)) vs C exp(-s^2/(2^(4/3) u kappa^2))

    @property
    def satisfied(self) -> bool:
        return self.check.satisfied

    def csv_rows(self) -> list[tuple]:
        return _prob_rows("rw-bounds", self.frame, "p_surcharge", self.check, self.seed0)


def surcharge_bound_check(
    frame: ScalingFrame,
    u: float = 1.0,
    s_grid: tuple[float, ...] = (2.0, 3.0, 4.0),
    n_replicas: int = 100_000,
    seed0: int = 0,
    coupling_group: str = "surcharge",
) -> SurchargeReport:
    """Tail of the summed boundary surcharges between the two densities.

    The surcharge of one anti-diagonal step splits into two independent
    exponentials with rates (1-rho)(1-rho_minus)/(rho-rho_minus) and
    rho rho_minus/(rho-rho_minus); their centered, rescaled sum obeys a
    Gaussian-type envelope in s with explicit constants.
    """
    kappa = frame.kappa
    if kappa <= 0.0 or frame.rho <= frame.rho_minus:
        raise ValueError("surcharge bound needs kappa > 0 (ordered densities)")
    if u <= 0.0:
        raise ValueError(f"u must be positive, got {u}")
    rho, rho_minus = frame.rho, frame.rho_minus
    gap = rho - rho_minus
    rate_p = (1.0 - rho) * (1.0 - rho_minus) / gap
    rate_q = rho * rho_minus / gap
    n_terms = math.floor(u * frame.spatial_scale)
    if n_terms < 1:
        raise ValueError(f"u={u} at N={frame.N} gives an empty sum")
    sums = _kernels.drv_surcharge_sums(
        n_replicas,
        np.uint64(seed0),
        np.uint64(group_hash(coupling_group)),
        np.int64(n_terms),
        rate_p,
        rate_q,
    )
    scaled = sums / frame.value_scale
    n13 = frame.N ** (-1.0 / 3.0)
    counts = [
        int(np.count_nonzero(scaled >= 2.0 * u * kappa + s * n13)) for s in s_grid
    ]
    bound = [
        SURCHARGE_C * math.exp(-s * s / (2.0 ** (4.0 / 3.0) * u * kappa * kappa))
        for s in s_grid
    ]
    check = BoundCheck.from_counts(s_grid, counts, n_replicas, bound)
    return SurchargeReport(frame=frame, u=u, n_replicas=n_replicas, seed0=seed0, check=check)


# ---------------------------------------------------------------------------
# Passage-value tails: decay shapes with fitted exponents.


@dataclass(frozen=True)
class TailShapeReport:
    frame: ScalingFrame
    s_grid: tuple[float, ...]
    n_replicas: int
    seed0: int
    # [model][side] -> per-S counts; sides are "upper" (>= 4N + S scale)
    # and "lower" (<= 4N - S scale).
    counts: dict
    fits: dict  # same keys -> FitResult or None

    MODELS = ("stationary", "pp")
    SIDES = ("upper", "lower")

    def decays(self) -> dict:
        """True where the fitted exponent is negative, as the shapes demand."""
        return {
            key: (fit is not None and fit.slope < 0.0) for key, fit in self.fits.items()
        }

    def csv_rows(self) -> list[tuple]:
        rows = []
        n = self.n_replicas
        for key, per_s in sorted(self.counts.items()):
            model, side = key
            for s, c in zip(self.s_grid, per_s):
                param = f"p_{side}[{model};S={s:g}]"
                if c >= CENSOR_MIN:
                    p_hat = c / n
                    rows.append(
                        base_row("tails", self.frame, param, p_hat,
                                 binomial_stderr(p_hat, n), n, self.seed0)
                    )
                else:
                    rows.append(base_row("tails", self.frame, param, CENSORED, None, n, self.seed0))
            fit = self.fits[key]
            if fit is not None:
                rows.append(
                    base_row("tails", self.frame, f"decay_slope[{model};{side}]",
                             fit.slope, None, fit.n_used, self.seed0)
                )
                rows.append(
                    base_row("tails", self.frame, f"decay_r2[{model};{side}]",
                             fit.r_squared, None, fit.n_used, self.seed0)
                )
        return rows


def lpp_tail_shape(
    frame: ScalingFrame,
    s_grid: tuple[float, ...] = (0.5, 1.0, 1.5, 2.0),
    n_replicas: int = 20_000,
    seed0: int = 0,
    coupling_group: str = "tails",
) -> TailShapeReport:
    """Fit the upper tail to exp(-c S) and the lower tail to exp(-c S^(3/2))
    for the stationary and point-to-point models at the frame's endpoint."""
    if min(s_grid) <= 0.0:
        raise ValueError(f"S grid must be positive, got {s_grid}")
    kinds = [StationaryRho(frame.rho), PointToPoint(frame.rho - 0.5)]
    models = model_rows(kinds, frame.N, seed0, coupling_group)
    end = q_point(frame, frame.m1, 1.0)
    raw = _kernels.drv_values(
        n_replicas,
        np.uint64(seed0),
        np.uint64(group_hash(coupling_group)),
        models,
        np.array([end], dtype=np.int64),
    )[:, :, 0]

    counts: dict = {}
    fits: dict = {}
    for k, model in enumerate(TailShapeReport.MODELS):
        values = raw[:, k]
        for side in TailShapeReport.SIDES:
            if side == "upper":
                per_s = [
                    int(np.count_nonzero(values >= 4.0 * frame.N + s * frame.value_scale))
                    for s in s_grid
                ]
                xs = list(s_grid)
            else:
                per_s = [
                    int(np.count_nonzero(values <= 4.0 * frame.N - s * frame.value_scale))
                    for s in s_grid
                ]
                xs = [s ** 1.5 for s in s_grid]
            counts[(model, side)] = tuple(per_s)
            p_hat = [c / n_replicas for c in per_s]
            censored = [c < CENSOR_MIN for c in per_s]
            try:
                fits[(model, side)] = fit_log_linear(xs, p_hat, censored)
            except ValueError:
                fits[(model, side)] = None
    return TailShapeReport(
        frame=frame,
        s_grid=tuple(float(s) for s in s_grid),
        n_replicas=n_replicas,
        seed0=seed0,
        counts=counts,
        fits=fits,
    )


# ---------------------------------------------------------------------------
# Diagonal lower tail: one fitted constant, then a parameter sweep.


def _shape_exponent(mu: float) -> float:
    return 8.0 / 3.0 - 2.0 * mu + (2.0 / 3.0) * mu ** 1.5


@dataclass(frozen=True)
class DiagonalLowerTailReport:
    frame: ScalingFrame
    w_grid: tuple[float, ...]
    mu_grid: tuple[float, ...]
    anchor: tuple[float, float]
    c_fitted: float
    n_replicas: int
    seed0: int
    checks: dict  # w -> BoundCheck over the mu grid

    @property
    def satisfied(self) -> bool:
        return all(check.satisfied for check in self.checks.values())

    def csv_rows(self) -> list[tuple]:
        rows = [
            base_row("tails", self.frame, "diag_lower_C",
                     self.c_fitted, None, self.n_replicas, self.seed0)
        ]
        for w in self.w_grid:
            labels = tuple(f"w={w:g};mu={mu:g}" for mu in self.mu_grid)
            rows.extend(
                _prob_rows("tails", self.frame, "p_diag_lower", self.checks[w], self.seed0, labels)
            )
        return rows


def diagonal_lower_tail_check(
    frame: ScalingFrame,
    w_grid: tuple[float, ...] = (-1.0, -1.5, -2.0),
    mu_grid: tuple[float, ...] = (1.0, 2.0, 3.0),
    anchor: tuple[float, float] = (-1.0, 1.0),
    n_replicas: int = 100_000,
    seed0: int = 0,
    coupling_group: str = "diag-tail",
) -> DiagonalLowerTailReport:
    """Lower tail of the diagonal-endpoint model with a slow diagonal.

    The point-to-point model with diagonal rate 1/2 + w 2^(-1/3) N^(-1/3):
    the probability that the passage value to (N, N) stays below
    4N + mu w^2 2^(4/3) N^(1/3) is compared against C exp(w^3 (8/3 - 2 mu
    + 2/3 mu^(3/2))), with C calibrated at the anchor (w, mu) point.
    """
    if anchor[0] not in w_grid or anchor[1] not in mu_grid:
        raise ValueError(f"anchor {anchor} must lie on the (w, mu) grid")
    if max(w_grid) >= 0.0:
        raise ValueError("w must be negative: the bound covers a slow diagonal")
    if not all(0.0 < mu < 4.0 for mu in mu_grid):
        raise ValueError(f"mu grid must sit inside (0, 4), got {mu_grid}")
    a_scale = 2.0 ** (-1.0 / 3.0) * frame.N ** (-1.0 / 3.0)
    kinds = [PointToPoint(alpha=w * a_scale) for w in w_grid]
    models = model_rows(kinds, frame.N, seed0, coupling_group)
    raw = _kernels.drv_values(
        n_replicas,
        np.uint64(seed0),
        np.uint64(group_hash(coupling_group)),
        models,
        np.array([(frame.N, frame.N)], dtype=np.int64),
    )[:, :, 0]

    n = n_replicas
    counts = {
        w: [
            int(np.count_nonzero(raw[:, k] <= 4.0 * frame.N + mu * w * w * frame.value_scale))
            for mu in mu_grid
        ]
        for k, w in enumerate(w_grid)
    }
    anchor_count = counts[anchor[0]][list(mu_grid).index(anchor[1])]
    if anchor_count < CENSOR_MIN:
        raise ValueError(
            f"anchor {anchor} is censored ({anchor_count} hits of {n}); cannot calibrate C"
        )
    c_fitted = (anchor_count / n) / math.exp(anchor[0] ** 3 * _shape_exponent(anchor[1]))

    checks = {
        w: BoundCheck.from_counts(
            mu_grid,
            counts[w],
            n,
            [c_fitted * math.exp(w ** 3 * _shape_exponent(mu)) for mu in mu_grid],
        )
        for w in w_grid
    }
    return DiagonalLowerTailReport(
        frame=frame,
        w_grid=tuple(float(w) for w in w_grid),
        mu_grid=tuple(float(m) for m in mu_grid),
        anchor=(float(anchor[0]), float(anchor[1])),
        c_fitted=c_fitted,
        n_replicas=n,
        seed0=seed0,
        checks=checks,
    )
