"""The KPZ scaling dictionary used by every experiment.

One frame bundles (N, tau, delta, kappa, M1, M_tau) and derives the two
densities

    rho       = 1/2 + delta 2^(-4/3) N^(-1/3)
    rho_minus = 1/2 + (delta - kappa) 2^(-4/3) N^(-1/3)

plus the lattice endpoints Q(u) = (base + off, base - off) with
base = floor(level*N) and off = floor(u (2N)^(2/3)), and the rescaling
(raw - 4 level N) / (2^(4/3) N^(1/3)).  The offset is floored once and
applied to both coordinates so endpoints sit exactly on the level's
anti-diagonal; that keeps the stationary increment accounting exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

Point = tuple[int, int]

_C_RHO = 2.0 ** (-4.0 / 3.0)


class RescaledValue(NamedTuple):
    raw: float
    centered_scaled: float


@dataclass(frozen=True)
class ScalingFrame:
    """m1 and m_tau are the already-converted spatial positions
    M = (1-tau)^(2/3) * M-tilde; build from the tilde form via from_config."""

    N: int
    tau: float = 1.0
    delta: float = 0.0
    kappa: float = 0.0
    m1: float = 0.0
    m_tau: float = 0.0

    def __post_init__(self) -> None:
        if self.N < 1:
            raise ValueError(f"N must be >= 1, got {self.N}")
        if not 0.0 < self.tau <= 1.0:
            raise ValueError(f"tau must lie in (0,1], got {self.tau}")
        for name, rho in (("rho", self.rho), ("rho_minus", self.rho_minus)):
            if not 0.0 < rho < 1.0:
                raise ValueError(f"derived {name} = {rho} outside (0,1); N too small for this offset")

    @property
    def rho(self) -> float:
        return 0.5 + self.delta * _C_RHO * self.N ** (-1.0 / 3.0)

    @property
    def rho_minus(self) -> float:
        return 0.5 + (self.delta - self.kappa) * _C_RHO * self.N ** (-1.0 / 3.0)

    @property
    def spatial_scale(self) -> float:
        """(2N)^(2/3), the lattice units of one spatial unit of u."""
        return (2.0 * self.N) ** (2.0 / 3.0)

    @property
    def value_scale(self) -> float:
        """2^(4/3) N^(1/3), the lattice units of one unit of rescaled value."""
        return 2.0 ** (4.0 / 3.0) * self.N ** (1.0 / 3.0)

    def q_point(self, u: float, level: float) -> Point:
        return q_point(self, u, level)

    def to_config(self) -> dict:
        if self.tau < 1.0:
            conv = (1.0 - self.tau) ** (2.0 / 3.0)
            m1_tilde, mtau_tilde = self.m1 / conv, self.m_tau / conv
        else:
            m1_tilde, mtau_tilde = 0.0, 0.0
        return {
            "N": self.N,
            "tau": self.tau,
            "delta": self.delta,
            "kappa": self.kappa,
            "m1_tilde": m1_tilde,
            "mtau_tilde": mtau_tilde,
        }

    @classmethod
    def from_config(cls, cfg: dict) -> "ScalingFrame":
        tau = float(cfg.get("tau", 1.0))
        conv = (1.0 - tau) ** (2.0 / 3.0) if tau < 1.0 else 0.0
        return cls(
            N=int(cfg["N"]),
            tau=tau,
            delta=float(cfg.get("delta", 0.0)),
            kappa=float(cfg.get("kappa", 0.0)),
            m1=conv * float(cfg.get("m1_tilde", 0.0)),
            m_tau=conv * float(cfg.get("mtau_tilde", 0.0)),
        )


def q_point(frame: ScalingFrame, u: float, level: float) -> Point:
    """Endpoint at spatial position u on the level anti-diagonal."""
    base = math.floor(level * frame.N)
    off = math.floor(u * frame.spatial_scale)
    i, j = base + off, base - off
    if j < 0 or j > i:
        raise ValueError(f"Q(u={u}, level={level}) = ({i},{j}) falls outside the half-space")
    return i, j


def rescale_pp(frame: ScalingFrame, raw: float, level: float) -> float:
    """(raw - 4 level N) / (2^(4/3) N^(1/3)); level must be one of the frame's
    two times so both times of a two-time experiment share one frame."""
    if level != 1.0 and level != frame.tau:
        raise ValueError(f"level must be frame.tau={frame.tau} or 1, got {level}")
    return (raw - 4.0 * level * frame.N) / frame.value_scale


def threshold_S(frame: ScalingFrame, u2: float) -> float:
    """Midpoint threshold separating the stationary value from the
    diagonal-avoiding value at Q(u2): 4N + 2^(4/3)N^(1/3) ((kappa-delta)^2/2
    - 2 u2 (kappa-delta)).  Sits below the stationary mean by the
    (kappa-delta)^2/2 term and above the avoiding bulk by the rest."""
    gap = frame.kappa - frame.delta
    if gap < 0:
        raise ValueError(f"threshold_S needs kappa >= delta, got gap {gap}")
    return 4.0 * frame.N + frame.value_scale * (0.5 * gap * gap - 2.0 * u2 * gap)
