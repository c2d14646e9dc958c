"""Pathwise increment comparisons between coupled boundary conditions.

Every family below is a deterministic consequence of the shared-bulk
coupling, so the expected violation count is exactly zero; Monte Carlo over
environments and endpoint pairs is exhaustive-style evidence, not a
statistical test.  Two families are conditional: their inequality only
applies on replicas where the relevant geodesics cross in the bulk (and,
for the reversed one, where the stationary geodesic stays off the
diagonal), so those events gate the check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from halfspace_lpp import _kernels
from halfspace_lpp.env import (
    FullSpaceSquare,
    PointToPoint,
    PointToPointRate,
    StationaryRho,
    ZeroDiagonal,
)
from halfspace_lpp.experiments._mc import TOL_PATHWISE, base_row, group_hash, model_rows
from halfspace_lpp.scaling import ScalingFrame

# Model row order expected by the driver: rows 0 and 2 are the ones whose
# geodesics define the crossing / diagonal-avoidance events.
ROW_PP = 0
ROW_STAT_PLUS = 1
ROW_STAT_MINUS = 2
ROW_AVOIDING = 3
ROW_FULL_SQUARE = 4
ROW_PP_RATE1 = 5


@dataclass(frozen=True)
class FamilyResult:
    name: str
    violations: int
    checked: int


@dataclass(frozen=True)
class ComparisonsReport:
    frame: ScalingFrame
    n_replicas: int
    n_pairs: int
    seed0: int
    families: tuple[FamilyResult, ...]

    @property
    def invariant_failures(self) -> tuple[str, ...]:
        return tuple(
            f"{f.name}: {f.violations} violations out of {f.checked} checks"
            for f in self.families
            if f.violations
        )

    def csv_rows(self) -> list[tuple]:
        rows = []
        for f in self.families:
            rows.append(
                base_row(
                    "comparisons", self.frame, f"violations[{f.name}]",
                    f.violations, None, f.checked, self.seed0,
                )
            )
        return rows


def check_comparisons(
    frame: ScalingFrame,
    n_replicas: int,
    n_pairs: int = 10,
    seed0: int = 0,
    coupling_group: str = "default",
    levels: tuple[float, ...] = (0.4, 0.6, 0.8, 1.0),
    max_offset_u: float = 2.0,
) -> ComparisonsReport:
    """Run every comparison family over random bulk pairs p <= q.

    Pairs are drawn per replica on a few anti-diagonals (levels * N), with
    both points strictly between the bottom row and the diagonal.
    """
    if frame.kappa < 0.0:
        raise ValueError("comparisons need kappa >= 0 so the two stationary densities are ordered")
    bases = np.array([math.floor(lv * frame.N) for lv in levels], dtype=np.int64)
    if np.any(bases < 2):
        raise ValueError(f"levels {levels} give anti-diagonal bases {bases.tolist()}; need >= 2")
    cap = math.floor(max_offset_u * frame.spatial_scale)
    off_maxes = np.minimum(bases - 1, np.int64(max(cap, 1)))

    alpha = frame.rho - 0.5
    kinds = [
        PointToPoint(alpha),
        StationaryRho(frame.rho),
        StationaryRho(frame.rho_minus),
        ZeroDiagonal(frame.rho_minus),
        FullSpaceSquare(),
        PointToPointRate(1.0),
    ]
    models = model_rows(kinds, frame.N, seed0, coupling_group)

    inc, crossed_a, crossed_b, avoids = _kernels.drv_comparisons(
        n_replicas,
        np.uint64(seed0),
        np.uint64(group_hash(coupling_group)),
        models,
        len(levels),
        bases,
        off_maxes,
        n_pairs,
    )

    total = n_replicas * n_pairs

    def unconditional(name: str, lo: int, hi: int) -> FamilyResult:
        bad = int(np.count_nonzero(inc[:, :, lo] > inc[:, :, hi] + TOL_PATHWISE))
        return FamilyResult(name, bad, total)

    mask_a = crossed_a.astype(bool)
    bad_a = int(
        np.count_nonzero(
            (inc[:, :, ROW_STAT_MINUS] > inc[:, :, ROW_PP] + TOL_PATHWISE) & mask_a
        )
    )
    mask_b = crossed_b.astype(bool) & avoids.astype(bool)
    bad_b = int(
        np.count_nonzero(
            (inc[:, :, ROW_PP] > inc[:, :, ROW_STAT_MINUS] + TOL_PATHWISE) & mask_b
        )
    )

    families = (
        unconditional("pp_le_stat_plus", ROW_PP, ROW_STAT_PLUS),
        unconditional("stat_minus_le_stat_plus", ROW_STAT_MINUS, ROW_STAT_PLUS),
        unconditional("stat_minus_le_avoiding", ROW_STAT_MINUS, ROW_AVOIDING),
        unconditional("full_square_le_pp_rate1", ROW_FULL_SQUARE, ROW_PP_RATE1),
        FamilyResult("crossed:stat_minus_le_pp", bad_a, int(np.count_nonzero(mask_a))),
        FamilyResult("crossed_off_diagonal:pp_le_stat_minus", bad_b, int(np.count_nonzero(mask_b))),
    )
    return ComparisonsReport(
        frame=frame,
        n_replicas=n_replicas,
        n_pairs=n_pairs,
        seed0=seed0,
        families=families,
    )
