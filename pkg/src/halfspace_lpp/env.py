"""Coupled random environments on the half-space lattice.

The lattice is {(i, j) : 0 <= j <= i} with three boundary regions: the
origin, the diagonal {i = j >= 1} and the bottom row {j = 0, i >= 1};
everything else is bulk.  A model kind assigns exponential rates to the two
boundary regions while the bulk is always Exp(1), except for the full-space
model which extends the lattice to the whole quadrant.

Environments are never materialized.  A spec is (kind, size, seed,
coupling_group) and ``weight_at`` evaluates any site on demand from the
counter-based uniforms in :mod:`halfspace_lpp.rng`.  Specs sharing
(seed, coupling_group) share those uniforms, so across kinds the bulk
weights are literally equal and the boundary weights are monotone in the
rates, sample by sample.  That pathwise coupling is what the comparison
experiments consume.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import NamedTuple, Union

from halfspace_lpp import rng

Point = tuple[int, int]


class RegionTag(Enum):
    ORIGIN = "origin"
    DIAGONAL = "diagonal"
    BOTTOM_ROW = "bottom_row"
    BULK = "bulk"


def classify_region(p: Point) -> RegionTag:
    """Classify a half-space point; the tags partition the lattice."""
    i, j = p
    if i < 0 or j < 0:
        raise ValueError(f"negative coordinates: {p}")
    if j > i:
        raise ValueError(f"outside half-space (j > i): {p}")
    if i == 0 and j == 0:
        return RegionTag.ORIGIN
    if i == j:
        return RegionTag.DIAGONAL
    if j == 0:
        return RegionTag.BOTTOM_ROW
    return RegionTag.BULK


@dataclass(frozen=True)
class StationaryRho:
    """Boundary rates (Exp(rho) diagonal, Exp(1-rho) bottom row).

    Tuned so increments along an anti-diagonal are iid two-sided
    exponentials; the workhorse of the stationary experiments.
    """

    rho: float

    def __post_init__(self) -> None:
        if not 0.0 < self.rho < 1.0:
            raise ValueError(f"rho must lie in (0,1), got {self.rho}")


@dataclass(frozen=True)
class PointToPoint:
    """Diagonal Exp(1/2 + alpha), zero bottom row; alpha=inf zeroes the diagonal."""

    alpha: float

    def __post_init__(self) -> None:
        if math.isinf(self.alpha) and self.alpha > 0:
            return
        if not 0.0 < 0.5 + self.alpha <= 1.0:
            raise ValueError(f"1/2 + alpha must lie in (0,1] (or alpha=inf), got alpha={self.alpha}")


@dataclass(frozen=True)
class PointToPointRate:
    """Diagonal Exp(rho), zero bottom row; covers rho=1 and rho=inf (zero diagonal)."""

    rho: float

    def __post_init__(self) -> None:
        if not self.rho > 0.0:
            raise ValueError(f"rho must be positive (inf allowed), got {self.rho}")


@dataclass(frozen=True)
class ZeroDiagonal:
    """Zero diagonal, bottom row Exp(1 - rho_minus): the diagonal-avoiding proxy."""

    rho_minus: float

    def __post_init__(self) -> None:
        if not 0.0 < self.rho_minus < 1.0:
            raise ValueError(f"rho_minus must lie in (0,1), got {self.rho_minus}")


@dataclass(frozen=True)
class AlphaBeta:
    """Diagonal Exp(1/2 + alpha), bottom row Exp(1/2 + beta); needs alpha + beta > 0."""

    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if not self.alpha + self.beta > 0.0:
            raise ValueError(f"alpha + beta must be positive, got {self.alpha + self.beta}")
        if not 0.5 + self.alpha > 0.0:
            raise ValueError(f"diagonal rate 1/2 + alpha must be positive, got {0.5 + self.alpha}")
        if not 0.5 + self.beta > 0.0:
            raise ValueError(f"bottom rate 1/2 + beta must be positive, got {0.5 + self.beta}")


@dataclass(frozen=True)
class FullSpaceSquare:
    """Exp(1) iid on the full quadrant {i, j >= 1}, zero on both axes.

    Shares the lower triangle and the diagonal with the coupled half-space
    models (the diagonal is drawn from the same stream as a rate-1 diagonal),
    so the full-space/half-space comparison is pathwise.
    """


@dataclass(frozen=True)
class Tilted:
    """A stationary environment with weights zeroed on a late, near-diagonal strip.

    Zero on {(i,j) : i + j >= 2*tau*N, i - j <= 2*m1*(2N)^(2/3)}.  Killing
    the strip pushes the geodesic away from the diagonal, which is what makes
    it an upper envelope in the geodesic ordering.
    """

    base: StationaryRho
    tau: float
    m1: float

    def __post_init__(self) -> None:
        if not 0.0 < self.tau < 1.0:
            raise ValueError(f"tau must lie in (0,1), got {self.tau}")
        if self.m1 < 0.0:
            raise ValueError(f"m1 must be nonnegative, got {self.m1}")


ModelKind = Union[
    StationaryRho,
    PointToPoint,
    PointToPointRate,
    ZeroDiagonal,
    AlphaBeta,
    FullSpaceSquare,
    Tilted,
]

_KIND_NAMES: dict[type, str] = {
    StationaryRho: "stationary",
    PointToPoint: "point_to_point",
    PointToPointRate: "point_to_point_rate",
    ZeroDiagonal: "zero_diagonal",
    AlphaBeta: "alpha_beta",
    FullSpaceSquare: "full_space_square",
    Tilted: "tilted",
}


def boundary_rates(kind: ModelKind) -> tuple[float, float]:
    """(diagonal rate, bottom-row rate); rate 0.0 encodes a deterministic zero weight."""
    if isinstance(kind, StationaryRho):
        return kind.rho, 1.0 - kind.rho
    if isinstance(kind, PointToPoint):
        return (0.0 if math.isinf(kind.alpha) else 0.5 + kind.alpha), 0.0
    if isinstance(kind, PointToPointRate):
        return (0.0 if math.isinf(kind.rho) else kind.rho), 0.0
    if isinstance(kind, ZeroDiagonal):
        return 0.0, 1.0 - kind.rho_minus
    if isinstance(kind, AlphaBeta):
        return 0.5 + kind.alpha, 0.5 + kind.beta
    if isinstance(kind, FullSpaceSquare):
        return 1.0, 0.0
    if isinstance(kind, Tilted):
        return boundary_rates(kind.base)
    raise TypeError(f"unknown model kind: {kind!r}")


@dataclass(frozen=True)
class EnvironmentSpec:
    """Immutable description of one random environment.

    ``size`` is the nominal system size N used by scaled quantities (e.g. the
    tilted strip); weights themselves are defined lazily on the whole lattice,
    so endpoints like (N + u(2N)^{2/3}, ...) are evaluable without ceremony.
    """

    kind: ModelKind
    size: int
    seed: int
    coupling_group: str = "default"

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValueError(f"size must be >= 1, got {self.size}")

    @property
    def key(self) -> int:
        return _env_key(self.seed, self.coupling_group)


@lru_cache(maxsize=4096)
def _env_key(seed: int, coupling_group: str) -> int:
    return rng.environment_key(seed, coupling_group)


def _tilted_dead(kind: Tilted, size: int, i: int, j: int) -> bool:
    return i + j >= 2.0 * kind.tau * size and i - j <= 2.0 * kind.m1 * (2.0 * size) ** (2.0 / 3.0)


def weight_at(spec: EnvironmentSpec, p: Point) -> float:
    """Evaluate one site weight; pure in (seed, coupling_group, kind, p).

    The origin weighs 0 in every model.  Exponentials are inverse-CDF samples
    -log(u)/rate of the shared site uniforms, so for two coupled specs the
    diagonal weight is decreasing and the bottom-row weight increasing in the
    respective rate, pathwise.
    """
    i, j = p
    if i < 0 or j < 0:
        raise ValueError(f"negative coordinates: {p}")
    full = isinstance(spec.kind, FullSpaceSquare)
    if not full and j > i:
        raise ValueError(f"outside half-space (j > i): {p}")
    if i == 0 and j == 0:
        return 0.0
    key = spec.key
    if full:
        if i == 0 or j == 0:
            return 0.0
        if i == j:
            return -math.log(rng.site_uniform(key, i, j, rng.STREAM_DIAGONAL))
        return -math.log(rng.site_uniform(key, i, j, rng.STREAM_BULK))
    kind = spec.kind
    if isinstance(kind, Tilted) and _tilted_dead(kind, spec.size, i, j):
        return 0.0
    if i == j:
        diag_rate, _ = boundary_rates(kind)
        if diag_rate == 0.0:
            return 0.0
        return -math.log(rng.site_uniform(key, i, j, rng.STREAM_DIAGONAL)) / diag_rate
    if j == 0:
        _, bottom_rate = boundary_rates(kind)
        if bottom_rate == 0.0:
            return 0.0
        return -math.log(rng.site_uniform(key, i, j, rng.STREAM_BULK)) / bottom_rate
    return -math.log(rng.site_uniform(key, i, j, rng.STREAM_BULK))


class IncrementDecomposition(NamedTuple):
    x_hat: float
    y_hat: float
    p: float
    q: float


def decompose_increment_pair(
    u_uniform: float, v_uniform: float, rho: float, rho_minus: float
) -> IncrementDecomposition:
    """Split one (U, V) pair into the coupled exponential quadruple.

    X-hat = -ln(u)/(1-rho) and Y-hat = -ln(v)/rho are the rho-environment
    samples; P = X-hat - X-tilde >= 0 and Q = Y-tilde - Y-hat >= 0 are the
    (independent, exponential) surcharges between the rho and rho_minus
    environments built from the same uniforms.  Marginally
    P ~ Exp((1-rho)(1-rho_minus)/(rho-rho_minus)) and
    Q ~ Exp(rho*rho_minus/(rho-rho_minus)).
    """
    if not 0.0 < u_uniform <= 1.0 or not 0.0 < v_uniform <= 1.0:
        raise ValueError("uniforms must lie in (0, 1]")
    if not 0.0 < rho_minus < 1.0 or not 0.0 < rho < 1.0:
        raise ValueError("rates must lie in (0, 1)")
    if rho_minus >= rho:
        raise ValueError(f"requires rho_minus < rho, got {rho_minus} >= {rho}")
    lu = -math.log(u_uniform)
    lv = -math.log(v_uniform)
    x_hat = lu / (1.0 - rho)
    y_hat = lv / rho
    p = x_hat - lu / (1.0 - rho_minus)
    q = lv / rho_minus - y_hat
    return IncrementDecomposition(x_hat, y_hat, p, q)


def _params_dict(kind: ModelKind) -> dict:
    if isinstance(kind, StationaryRho):
        return {"rho": kind.rho}
    if isinstance(kind, PointToPoint):
        return {"alpha": "inf" if math.isinf(kind.alpha) else kind.alpha}
    if isinstance(kind, PointToPointRate):
        return {"rho": "inf" if math.isinf(kind.rho) else kind.rho}
    if isinstance(kind, ZeroDiagonal):
        return {"rho_minus": kind.rho_minus}
    if isinstance(kind, AlphaBeta):
        return {"alpha": kind.alpha, "beta": kind.beta}
    if isinstance(kind, FullSpaceSquare):
        return {}
    if isinstance(kind, Tilted):
        return {"rho": kind.base.rho, "tau": kind.tau, "m1": kind.m1}
    raise TypeError(f"unknown model kind: {kind!r}")


def _kind_from(name: str, params: dict) -> ModelKind:
    def num(x):
        return math.inf if x == "inf" else float(x)

    if name == "stationary":
        return StationaryRho(num(params["rho"]))
    if name == "point_to_point":
        return PointToPoint(num(params["alpha"]))
    if name == "point_to_point_rate":
        return PointToPointRate(num(params["rho"]))
    if name == "zero_diagonal":
        return ZeroDiagonal(num(params["rho_minus"]))
    if name == "alpha_beta":
        return AlphaBeta(num(params["alpha"]), num(params["beta"]))
    if name == "full_space_square":
        return FullSpaceSquare()
    if name == "tilted":
        return Tilted(StationaryRho(num(params["rho"])), num(params["tau"]), num(params["m1"]))
    raise ValueError(f"unknown model kind name: {name!r}")


def spec_to_json(spec: EnvironmentSpec) -> str:
    obj = {
        "kind": _KIND_NAMES[type(spec.kind)],
        "params": _params_dict(spec.kind),
        "N": spec.size,
        "seed": spec.seed,
        "coupling_group": spec.coupling_group,
    }
    return json.dumps(obj, sort_keys=True)


def spec_from_json(text: str) -> EnvironmentSpec:
    obj = json.loads(text)
    kind = _kind_from(obj["kind"], obj.get("params", {}))
    return EnvironmentSpec(
        kind=kind,
        size=int(obj["N"]),
        seed=int(obj["seed"]),
        coupling_group=str(obj["coupling_group"]),
    )


class Constraint(Enum):
    """Path constraint for restricted last-passage values."""

    UNRESTRICTED = 0
    MUST_TOUCH_DIAGONAL = 1
    AVOID_DIAGONAL = 2
