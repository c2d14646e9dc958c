"""Two-time covariance of rescaled passage values.

Both times are read off the same environment per replica, so the covariance
benefits from common random numbers and the polarization identity

    cov = (var_tau + var_1 - var_diff) / 2

must hold on the sample moments themselves; it is recomputed from
independently accumulated sums and verified rather than used as a shortcut.
The independent oracle for var_diff is a fresh stationary run at size
(1-tau) N, rescaled by (1-tau)^(2/3).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from halfspace_lpp import _kernels
from halfspace_lpp.env import PointToPoint, StationaryRho
from halfspace_lpp.experiments._mc import base_row, group_hash, model_rows
from halfspace_lpp.experiments.stats import Estimate
from halfspace_lpp.scaling import ScalingFrame, q_point, rescale_pp

IDENTITY_RTOL = 1e-12
MIN_REPLICAS = 1_000


def _fsum(a: np.ndarray) -> float:
    return math.fsum(a.tolist())


def _moment_estimate(kernel: np.ndarray, point: float, n: int, seed0: int) -> Estimate:
    """Estimate for a moment-type statistic from its per-sample kernel."""
    km = _fsum(kernel) / n
    kvar = _fsum((kernel - km) ** 2) / (n - 1)
    return Estimate(mean=point, variance=kvar, stderr=math.sqrt(kvar / n), n=n, seed0=seed0)


@dataclass(frozen=True)
class CovarianceReport:
    frame: ScalingFrame
    model: str
    n_replicas: int
    seed0: int
    mean_tau: Estimate
    mean_1: Estimate
    var_tau: Estimate
    var_1: Estimate
    var_diff: Estimate
    cov: Estimate
    identity_residual: float

    @property
    def invariant_failures(self) -> tuple[str, ...]:
        if self.identity_residual > IDENTITY_RTOL:
            return (
                f"polarization identity off by relative {self.identity_residual:.3e} "
                f"(tolerance {IDENTITY_RTOL:.0e})",
            )
        return ()

    def csv_rows(self) -> list[tuple]:
        named = (
            (f"mean[tau;{self.model}]", self.mean_tau),
            (f"mean[1;{self.model}]", self.mean_1),
            (f"var[tau;{self.model}]", self.var_tau),
            (f"var[1;{self.model}]", self.var_1),
            (f"var[diff;{self.model}]", self.var_diff),
            (f"cov[{self.model}]", self.cov),
        )
        rows = [
            base_row("covariance", self.frame, param, est.mean, est.stderr, est.n, self.seed0)
            for param, est in named
        ]
        rows.append(
            base_row(
                "covariance", self.frame, f"identity_residual[{self.model}]",
                self.identity_residual, None, self.n_replicas, self.seed0,
            )
        )
        return rows


def two_time_covariance(
    frame: ScalingFrame,
    model: str = "stationary",
    n_replicas: int = 10_000,
    seed0: int = 0,
    coupling_group: str = "default",
) -> CovarianceReport:
    if n_replicas < MIN_REPLICAS:
        raise ValueError(
            f"two_time_covariance refuses n < {MIN_REPLICAS}: "
            "the covariance stderr would swamp the estimate"
        )
    if not 0.0 < frame.tau < 1.0:
        raise ValueError("two-time covariance needs tau in (0,1)")
    if model == "stationary":
        kind = StationaryRho(frame.rho)
    elif model == "pp":
        kind = PointToPoint(frame.rho - 0.5)
    else:
        raise ValueError(f"model must be 'pp' or 'stationary', got {model!r}")

    ends = np.array(
        [q_point(frame, frame.m_tau, frame.tau), q_point(frame, frame.m1, 1.0)],
        dtype=np.int64,
    )
    models = model_rows([kind], frame.N, seed0, coupling_group)
    raw = _kernels.drv_values(
        n_replicas, np.uint64(seed0), np.uint64(group_hash(coupling_group)), models, ends
    )[:, 0, :]
    a = rescale_pp(frame, raw[:, 0], frame.tau)
    b = rescale_pp(frame, raw[:, 1], 1.0)

    n = n_replicas
    ma = _fsum(a) / n
    mb = _fsum(b) / n
    da = a - ma
    db = b - mb
    var_tau = _fsum(da * da) / (n - 1)
    var_1 = _fsum(db * db) / (n - 1)
    cov = _fsum(da * db) / (n - 1)
    dd = da - db  # identical to centering a-b by (ma - mb)
    var_diff = _fsum(dd * dd) / (n - 1)

    polarized = 0.5 * (var_tau + var_1 - var_diff)
    scale = max(abs(cov), var_tau, var_1, var_diff, 1e-300)
    residual = abs(cov - polarized) / scale

    mean_tau = Estimate(ma, var_tau, math.sqrt(var_tau / n), n, seed0)
    mean_1 = Estimate(mb, var_1, math.sqrt(var_1 / n), n, seed0)
    return CovarianceReport(
        frame=frame,
        model=model,
        n_replicas=n,
        seed0=seed0,
        mean_tau=mean_tau,
        mean_1=mean_1,
        var_tau=_moment_estimate(da * da, var_tau, n, seed0),
        var_1=_moment_estimate(db * db, var_1, n, seed0),
        var_diff=_moment_estimate(dd * dd, var_diff, n, seed0),
        cov=_moment_estimate(da * db, cov, n, seed0),
        identity_residual=residual,
    )


@dataclass(frozen=True)
class RestartReport:
    frame: ScalingFrame
    n_prime: int
    n_replicas: int
    seed0: int
    var_rescaled: Estimate
    prediction: float  # (1-tau)^(2/3) * var at the reduced size

    def csv_rows(self) -> list[tuple]:
        return [
            base_row(
                "covariance", self.frame, f"restart_var[N'={self.n_prime}]",
                self.var_rescaled.mean, self.var_rescaled.stderr, self.n_replicas, self.seed0,
            ),
            base_row(
                "covariance", self.frame, "restart_prediction",
                self.prediction, None, self.n_replicas, self.seed0,
            ),
        ]


def restart_variance(
    frame: ScalingFrame,
    n_replicas: int = 10_000,
    seed0: int = 0,
    coupling_group: str = "restart",
) -> RestartReport:
    """Oracle for var_diff: a stationary run of size (1-tau) N at the same
    density, rescaled in its own units and shrunk by (1-tau)^(2/3)."""
    if not 0.0 < frame.tau < 1.0:
        raise ValueError("the restart oracle needs tau in (0,1)")
    if n_replicas < MIN_REPLICAS:
        raise ValueError(f"restart_variance refuses n < {MIN_REPLICAS}")
    n_prime = int(round((1.0 - frame.tau) * frame.N))
    if n_prime < 1:
        raise ValueError(f"(1-tau) N rounds to {n_prime}; nothing to simulate")
    kind = StationaryRho(frame.rho)
    models = model_rows([kind], n_prime, seed0, coupling_group)
    ends = np.array([(n_prime, n_prime)], dtype=np.int64)
    raw = _kernels.drv_values(
        n_replicas, np.uint64(seed0), np.uint64(group_hash(coupling_group)), models, ends
    )[:, 0, 0]
    scale = 2.0 ** (4.0 / 3.0) * n_prime ** (1.0 / 3.0)
    values = (raw - 4.0 * n_prime) / scale

    n = n_replicas
    m = _fsum(values) / n
    dev = values - m
    var = _fsum(dev * dev) / (n - 1)
    est = _moment_estimate(dev * dev, var, n, seed0)
    return RestartReport(
        frame=frame,
        n_prime=n_prime,
        n_replicas=n,
        seed0=seed0,
        var_rescaled=est,
        prediction=(1.0 - frame.tau) ** (2.0 / 3.0) * var,
    )
