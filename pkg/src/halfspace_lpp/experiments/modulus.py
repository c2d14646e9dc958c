"""Modulus of continuity of the rescaled value profile.

One replica evaluates the point-to-point value at every lattice position of
the final anti-diagonal up to m_span spatial units, giving a discrete
profile u -> value(u).  The modulus omega(window) is the largest oscillation
between profile points at most window apart; shrinking the window can only
shrink omega on the same sample, so the reported probabilities are
non-increasing in the window by construction.  Diagnostic only: the
interesting content is the rate, which is left to the reader of the CSV.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from halfspace_lpp import _kernels
from halfspace_lpp.env import PointToPoint
from halfspace_lpp.experiments._mc import base_row, group_hash, model_rows
from halfspace_lpp.experiments.stats import binomial_stderr
from halfspace_lpp.scaling import ScalingFrame, rescale_pp


@dataclass(frozen=True)
class ModulusReport:
    frame: ScalingFrame
    m_span: float
    window_grid: tuple[float, ...]
    eps_grid: tuple[float, ...]
    n_replicas: int
    seed0: int
    probabilities: dict  # (eps, window) -> empirical P(omega >= eps)

    def non_increasing_in_window(self, eps: float) -> bool:
        ordered = sorted(self.window_grid)
        probs = [self.probabilities[(eps, w)] for w in ordered]
        return all(a <= b for a, b in zip(probs, probs[1:]))

    def csv_rows(self) -> list[tuple]:
        rows = []
        n = self.n_replicas
        for eps in self.eps_grid:
            for w in self.window_grid:
                p = self.probabilities[(eps, w)]
                rows.append(
                    base_row(
                        "modulus", self.frame, f"p_osc[eps={eps:g};window={w:g}]",
                        p, binomial_stderr(p, n), n, self.seed0,
                    )
                )
        return rows


def modulus_of_continuity(
    frame: ScalingFrame,
    m_span: float = 1.0,
    window_grid: tuple[float, ...] = (0.5, 0.25, 0.125),
    eps_grid: tuple[float, ...] = (0.5, 1.0),
    n_replicas: int = 2_000,
    seed0: int = 0,
    coupling_group: str = "modulus",
) -> ModulusReport:
    if m_span <= 0.0:
        raise ValueError(f"m_span must be positive, got {m_span}")
    if max(window_grid) > m_span:
        raise ValueError(f"windows {window_grid} exceed the profile span {m_span}")
    n_pos = math.floor(m_span * frame.spatial_scale)
    if frame.N - n_pos < 0:
        raise ValueError(f"span {m_span} walks off the half-space at N={frame.N}")
    ends = np.array(
        [(frame.N + k, frame.N - k) for k in range(n_pos + 1)], dtype=np.int64
    )
    models = model_rows([PointToPoint(frame.rho - 0.5)], frame.N, seed0, coupling_group)
    raw = _kernels.drv_values(
        n_replicas, np.uint64(seed0), np.uint64(group_hash(coupling_group)), models, ends
    )[:, 0, :]
    profile = rescale_pp(frame, raw, 1.0)

    # max_step[:, d-1] = per replica max |x_{k+d} - x_k|; a running maximum
    # over d then gives omega for every window in one pass.
    steps = [int(round(w * frame.spatial_scale)) for w in window_grid]
    d_max = max(steps)
    if d_max < 1:
        raise ValueError(f"smallest window {min(window_grid)} is below one lattice step")
    osc = np.empty((n_replicas, d_max))
    running = np.zeros(n_replicas)
    for d in range(1, d_max + 1):
        step = np.abs(profile[:, d:] - profile[:, :-d]).max(axis=1)
        running = np.maximum(running, step)
        osc[:, d - 1] = running

    probabilities = {}
    for eps in eps_grid:
        for w, d in zip(window_grid, steps):
            omega = osc[:, max(d, 1) - 1]
            probabilities[(float(eps), float(w))] = float(
                np.count_nonzero(omega >= eps) / n_replicas
            )
    return ModulusReport(
        frame=frame,
        m_span=float(m_span),
        window_grid=tuple(float(w) for w in window_grid),
        eps_grid=tuple(float(e) for e in eps_grid),
        n_replicas=n_replicas,
        seed0=seed0,
        probabilities=probabilities,
    )
