"""Shared plumbing between the experiment modules and the JIT drivers."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from halfspace_lpp.engine import model_code
from halfspace_lpp.env import Constraint, EnvironmentSpec, ModelKind
from halfspace_lpp.rng import fnv1a64
from halfspace_lpp.scaling import ScalingFrame

# Pathwise inequalities hold exactly in real arithmetic; this absolute slack
# covers float rounding of passage values of size O(N).
TOL_PATHWISE = 1e-9


def group_hash(coupling_group: str) -> int:
    return fnv1a64(coupling_group.encode())


def model_rows(
    kinds: Sequence[ModelKind],
    size: int,
    seed0: int,
    coupling_group: str,
    constraints: Sequence[Constraint] | None = None,
) -> np.ndarray:
    """Encode coupled model kinds as driver rows (shared size and group)."""
    if constraints is None:
        constraints = [Constraint.UNRESTRICTED] * len(kinds)
    rows = [
        model_code(
            EnvironmentSpec(kind=k, size=size, seed=seed0, coupling_group=coupling_group),
            constraint=c,
        )
        for k, c in zip(kinds, constraints)
    ]
    return np.vstack(rows)


def base_row(
    experiment: str,
    frame: ScalingFrame,
    param: str,
    value,
    stderr,
    n: int,
    seed0: int,
) -> tuple:
    return (experiment, frame.N, frame.tau, frame.delta, frame.kappa, param, value, stderr, n, seed0)
