"""How far geodesics stray from the diagonal.

Three coupled models, ordered so each geodesic lies weakly to the right of
the previous one: point-to-point (diagonal rate rho, empty bottom row),
stationary at rho, and the stationary environment with a dead strip beyond
level tau within m1 spatial units of the diagonal.  The dead strip forces
its geodesic outward, so it dominates the other two; bounding its excursion
bounds all three.  The profile records, per threshold M, the probability
that the geodesic's max distance from the diagonal reaches M spatial units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from halfspace_lpp import _kernels
from halfspace_lpp.env import PointToPointRate, StationaryRho, Tilted
from halfspace_lpp.experiments._mc import base_row, group_hash, model_rows
from halfspace_lpp.experiments.io import CENSORED
from halfspace_lpp.experiments.stats import CENSOR_MIN, BoundCheck, FitResult, binomial_stderr, fit_log_linear
from halfspace_lpp.scaling import ScalingFrame, q_point

MODEL_NAMES = ("pp", "stationary", "tilted")


@dataclass(frozen=True)
class LocalizationReport:
    frame: ScalingFrame
    m_values: tuple[float, ...]
    n_replicas: int
    seed0: int
    counts: tuple[tuple[int, ...], ...]  # [model][threshold]
    ordering_violations: int
    pp_below_stationary: BoundCheck
    decay_fit: FitResult | None

    def probabilities(self, model: str) -> tuple[float, ...]:
        idx = MODEL_NAMES.index(model)
        return tuple(c / self.n_replicas for c in self.counts[idx])

    def strictly_decreasing(self, model: str) -> bool:
        p = self.probabilities(model)
        return all(a > b for a, b in zip(p, p[1:]))

    @property
    def invariant_failures(self) -> tuple[str, ...]:
        if self.ordering_violations:
            return (
                f"geodesic ordering violated on {self.ordering_violations} levels "
                "(pp/stationary/tilted should be left to right)",
            )
        return ()

    def csv_rows(self) -> list[tuple]:
        rows = []
        n = self.n_replicas
        for name, per_model in zip(MODEL_NAMES, self.counts):
            for m, c in zip(self.m_values, per_model):
                param = f"p_touch[{name};M={m:g}]"
                if c >= CENSOR_MIN:
                    p_hat = c / n
                    rows.append(
                        base_row(
                            "localization", self.frame, param,
                            p_hat, binomial_stderr(p_hat, n), n, self.seed0,
                        )
                    )
                else:
                    rows.append(base_row("localization", self.frame, param, CENSORED, None, n, self.seed0))
        if self.decay_fit is not None:
            for param, value in (
                ("decay_slope[stationary]", self.decay_fit.slope),
                ("decay_intercept[stationary]", self.decay_fit.intercept),
                ("decay_r2[stationary]", self.decay_fit.r_squared),
            ):
                rows.append(base_row("localization", self.frame, param, value, None, n, self.seed0))
        rows.append(
            base_row(
                "localization", self.frame, "ordering_violations",
                self.ordering_violations, None, n, self.seed0,
            )
        )
        return rows


def localization_profile(
    frame: ScalingFrame,
    m_values: tuple[float, ...] = (1.0, 2.0, 3.0),
    n_replicas: int = 10_000,
    seed0: int = 0,
    coupling_group: str = "default",
) -> LocalizationReport:
    if not 0.0 < frame.tau < 1.0:
        raise ValueError("localization needs tau in (0,1): the dead strip starts at level tau")
    if any(m < frame.m1 for m in m_values):
        raise ValueError(f"thresholds {m_values} must not lie below the endpoint offset m1={frame.m1}")
    kinds = [
        PointToPointRate(frame.rho),
        StationaryRho(frame.rho),
        Tilted(StationaryRho(frame.rho), frame.tau, frame.m1),
    ]
    models = model_rows(kinds, frame.N, seed0, coupling_group)
    q = q_point(frame, frame.m1, 1.0)
    exc, ordv = _kernels.drv_excursions(
        n_replicas,
        np.uint64(seed0),
        np.uint64(group_hash(coupling_group)),
        models,
        np.int64(q[0]),
        np.int64(q[1]),
    )

    thresholds = [math.ceil(m * frame.spatial_scale) for m in m_values]
    counts = tuple(
        tuple(int(np.count_nonzero(exc[:, k] >= t)) for t in thresholds)
        for k in range(len(kinds))
    )

    st_p = [c / n_replicas for c in counts[1]]
    st_se = [binomial_stderr(p, n_replicas) for p in st_p]
    # The stationary probability plus its own spread is the ceiling for pp;
    # BoundCheck adds the pp-side 3 sigma on top.
    check = BoundCheck.from_counts(
        abscissae=m_values,
        counts=counts[0],
        n=n_replicas,
        bound=[p + 3.0 * s for p, s in zip(st_p, st_se)],
    )

    cubes = [(m - frame.m1) ** 3 for m in m_values]
    censored = [c < CENSOR_MIN for c in counts[1]]
    try:
        fit = fit_log_linear(cubes, st_p, censored)
    except ValueError:
        fit = None

    return LocalizationReport(
        frame=frame,
        m_values=tuple(float(m) for m in m_values),
        n_replicas=n_replicas,
        seed0=seed0,
        counts=counts,
        ordering_violations=int(ordv.sum()),
        pp_below_stationary=check,
        decay_fit=fit,
    )
