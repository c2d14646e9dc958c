"""Geodesics: backtracking, ordering, crossings, excursion measurements.

Paths are recovered from PassageTable predecessor bits.  Internally a
geodesic from the origin is just its i-coordinate per anti-diagonal level
(one lattice point per level), which makes intersection and ordering checks
O(length) scans.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from halfspace_lpp import _kernels
from halfspace_lpp.engine import PassageTable
from halfspace_lpp.env import EnvironmentSpec, PointToPoint, StationaryRho
from halfspace_lpp.errors import InvariantViolation

Point = tuple[int, int]


@dataclass(frozen=True)
class Geodesic:
    """Maximal up-right path; points run from start to end inclusive.

    size is the ambient N used by scaled observables like max_excursion.
    """

    points: list[Point]
    value: float
    size: int

    def levels(self) -> np.ndarray:
        """i-coordinate per anti-diagonal level; defined for origin-rooted paths."""
        return np.array([p[0] for p in self.points], dtype=np.int64)


@dataclass(frozen=True)
class CrossingReport:
    crossed: bool
    last_crossing: Point | None
    touched_diagonal: bool


def backtrack(table: PassageTable, b: Point) -> Geodesic:
    """Follow predecessor bits from b back to the table origin."""
    bi, bj = b
    ei, ej = table.extent
    if not (0 <= bi <= ei and 0 <= bj <= ej):
        raise ValueError(f"endpoint {b} outside table extent {table.extent}")
    value = table.values[bi, bj]
    if value == -np.inf:
        raise ValueError(f"endpoint {b} unreachable in this table")
    pts: list[Point] = []
    i, j = bi, bj
    while (i, j) != table.origin:
        pts.append((i, j))
        if table.pred[i, j] == 1:
            i -= 1
        else:
            j -= 1
    pts.append(table.origin)
    pts.reverse()
    return Geodesic(points=pts, value=float(value), size=table.size)


def geodesic_ordering(g1: Geodesic, g2: Geodesic) -> bool:
    """True iff g1 stays weakly left of g2: on every shared anti-diagonal
    level the i-coordinate of g1 is <= that of g2 (equivalently every joint
    down-right transversal meets them in the order p <= q)."""
    l1 = {p[0] + p[1]: p[0] for p in g1.points}
    l2 = {p[0] + p[1]: p[0] for p in g2.points}
    shared = set(l1) & set(l2)
    return all(l1[lvl] <= l2[lvl] for lvl in shared)


def max_excursion(g: Geodesic) -> float:
    """Largest diagonal distance reached, in units of (2N)^(2/3):
    the biggest M such that the path touches {i - j = M (2N)^(2/3)}."""
    d = max(p[0] - p[1] for p in g.points)
    return d / (2.0 * g.size) ** (2.0 / 3.0)


def _level_i(points: list[Point]) -> np.ndarray:
    return np.array([p[0] for p in points], dtype=np.int32)


def crossing_event(
    spec_st: EnvironmentSpec,
    spec_pp: EnvironmentSpec,
    p: Point,
    q: Point,
) -> CrossingReport:
    """Do the stationary geodesic to q and the point-to-point geodesic to p
    share a bulk point?

    The endpoints must be ordered down-right (p above-left of q).  The
    specs must be coupled (same seed and coupling_group), otherwise the
    event is meaningless and a misuse error is raised.  The report also
    notes whether the stationary geodesic touched the diagonal; by the
    planarity argument behind the crossing bound, touching forces a bulk
    crossing, and that implication is asserted here rather than trusted.
    """
    if not isinstance(spec_st.kind, StationaryRho):
        raise TypeError(f"spec_st must be stationary, got {type(spec_st.kind).__name__}")
    if not isinstance(spec_pp.kind, PointToPoint):
        raise TypeError(f"spec_pp must be point-to-point, got {type(spec_pp.kind).__name__}")
    if (spec_st.seed, spec_st.coupling_group) != (spec_pp.seed, spec_pp.coupling_group):
        raise ValueError(
            "specs are not coupled: "
            f"(seed, group) {(spec_st.seed, spec_st.coupling_group)} vs "
            f"{(spec_pp.seed, spec_pp.coupling_group)}"
        )
    if not (p[0] <= q[0] and p[1] >= q[1]):
        raise ValueError(f"need p above-left of q (p.i <= q.i, p.j >= q.j), got p={p}, q={q}")

    from halfspace_lpp.engine import last_passage_line

    table_pp = last_passage_line(spec_pp, p)
    table_st = last_passage_line(spec_st, q)
    g_pp = backtrack(table_pp, p)
    g_st = backtrack(table_st, q)
    xs_pp = _level_i(g_pp.points)
    xs_st = _level_i(g_st.points)
    ci, cj = _kernels._bulk_crossing(xs_pp, xs_st)
    crossed = ci >= 0
    touched = bool(_kernels._touches_diagonal(xs_st))
    if touched and not crossed:
        raise InvariantViolation(
            f"stationary geodesic touched the diagonal without a bulk crossing (p={p}, q={q})"
        )
    return CrossingReport(
        crossed=crossed,
        last_crossing=(int(ci), int(cj)) if crossed else None,
        touched_diagonal=touched,
    )


def geodesic_to_csv(g: Geodesic, path: str) -> None:
    """Export for plotting: one row per step (step, i, j)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["step", "i", "j"])
        for k, (i, j) in enumerate(g.points):
            writer.writerow([k, i, j])
