"""Last-passage dynamic programming over the half-space lattice.

L(a, b) maximizes the weight sum over up-right paths from a to b, with the
convention that the starting point's weight is excluded, so L(a, a) = 0 and
the values concatenate: L(a, b) = max_c (L(a, c) + L(c, b)) over any
separating set of c.

Two evaluation modes: rolling-buffer sweeps when only endpoint values are
needed (O(width) memory) and full tables with predecessor bits when a
geodesic must be recovered.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np

from halfspace_lpp import _kernels
from halfspace_lpp.env import (
    Constraint,
    EnvironmentSpec,
    FullSpaceSquare,
    StationaryRho,
    Tilted,
    boundary_rates,
)
from halfspace_lpp.errors import CapacityError, NoPathError

Point = tuple[int, int]

# Generous cap for a single DP table (values + predecessor bits); a bigger
# request is almost certainly a misparameterized experiment.
MEMORY_BUDGET_BYTES = 2 << 30


def model_code(spec: EnvironmentSpec, constraint: Constraint = Constraint.UNRESTRICTED) -> np.ndarray:
    """Encode a spec for the JIT kernels; see _kernels for the row layout."""
    kind = spec.kind
    diag, bottom = boundary_rates(kind)
    geom = 1.0 if isinstance(kind, FullSpaceSquare) else 0.0
    if isinstance(kind, Tilted):
        tilt = 1.0
        sum_min = 2.0 * kind.tau * spec.size
        diff_max = 2.0 * kind.m1 * (2.0 * spec.size) ** (2.0 / 3.0)
    else:
        tilt, sum_min, diff_max = 0.0, 0.0, 0.0
    return np.array(
        [geom, diag, bottom, tilt, sum_min, diff_max, float(constraint.value)],
        dtype=np.float64,
    )


def _check_point(spec: EnvironmentSpec, p: Point) -> None:
    i, j = p
    if i < 0 or j < 0:
        raise ValueError(f"negative coordinates: {p}")
    if not isinstance(spec.kind, FullSpaceSquare) and j > i:
        raise ValueError(f"outside half-space (j > i): {p}")


def last_passage_many(
    spec: EnvironmentSpec,
    a: Point,
    ends: list[Point] | np.ndarray,
    constraint: Constraint = Constraint.UNRESTRICTED,
) -> np.ndarray:
    """Values L(a, e) for several endpoints in one DP sweep.

    Endpoints not reachable under the constraint come back as -inf; callers
    decide whether that is an error (see last_passage).
    """
    _check_point(spec, a)
    ends_arr = np.asarray(ends, dtype=np.int64).reshape(-1, 2)
    for e in ends_arr:
        _check_point(spec, (int(e[0]), int(e[1])))
        if e[0] < a[0] or e[1] < a[1]:
            raise ValueError(f"endpoint {tuple(int(x) for x in e)} not above-right of start {a}")
    code = model_code(spec, constraint)
    return _kernels._values_at(code, np.uint64(spec.key), np.int64(a[0]), np.int64(a[1]), ends_arr)


def last_passage(
    spec: EnvironmentSpec,
    a: Point,
    b: Point,
    constraint: Constraint = Constraint.UNRESTRICTED,
) -> float:
    """Maximal up-right weight sum from a to b, start excluded.

    AvoidDiagonal yields -inf when every path would touch the diagonal (an
    explicit no-path value, since the restricted maximum is over an empty
    set); MustTouchDiagonal raises NoPathError instead, because there the
    caller asked for a path that cannot exist.
    """
    value = float(last_passage_many(spec, a, [b], constraint)[0])
    if value == -math.inf and constraint is Constraint.MUST_TOUCH_DIAGONAL:
        raise NoPathError(f"no diagonal-touching path from {a} to {b}")
    return value


@dataclass(frozen=True)
class PassageTable:
    """Origin-rooted DP table with predecessor bits.

    values[i, j] = L(origin, (i, j)); pred: 0 from below, 1 from left,
    255 none.  size is the ambient N of the generating spec, carried along
    for scaled observables.
    """

    origin: Point
    extent: Point
    values: np.ndarray
    pred: np.ndarray
    size: int

    def value_at(self, p: Point) -> float:
        i, j = p
        bi, bj = self.extent
        if not (0 <= i <= bi and 0 <= j <= bj):
            raise ValueError(f"point {p} outside table extent {self.extent}")
        return float(self.values[i, j])


def last_passage_line(spec: EnvironmentSpec, b: Point) -> PassageTable:
    """Full table of L(origin, p) for origin <= p <= b, with backtracking bits."""
    _check_point(spec, b)
    bi, bj = b
    cells = (bi + 1) * (bj + 1)
    if cells * 9 > MEMORY_BUDGET_BYTES:
        raise CapacityError(
            f"table to {b} needs {cells * 9 / 1e9:.1f} GB, budget is {MEMORY_BUDGET_BYTES / 1e9:.1f} GB"
        )
    code = model_code(spec)
    values, pred = _kernels._build_table(code, np.uint64(spec.key), np.int64(bi), np.int64(bj))
    return PassageTable(origin=(0, 0), extent=(bi, bj), values=values, pred=pred, size=spec.size)


def antidiagonal_increment(spec: EnvironmentSpec, u1: float, u2: float, frame) -> float:
    """L(Q(u2)) - L(Q(u1)) along the level-1 anti-diagonal of a stationary model.

    By stationarity this is a sum of iid Exp(1-rho) - Exp(rho) terms, one per
    lattice offset between the two endpoints, which the distributional tests
    exploit.
    """
    if not isinstance(spec.kind, StationaryRho):
        raise TypeError(f"antidiagonal_increment needs a stationary spec, got {type(spec.kind).__name__}")
    if spec.size != frame.N:
        raise ValueError(f"spec size {spec.size} != frame N {frame.N}")
    if not 0 <= u1 < u2:
        raise ValueError(f"need 0 <= u1 < u2, got u1={u1}, u2={u2}")
    q1 = frame.q_point(u1, 1.0)
    q2 = frame.q_point(u2, 1.0)
    vals = last_passage_many(spec, (0, 0), [q1, q2])
    return float(vals[1] - vals[0])


_DUMP_MAGIC = b"HSLP"


def dump_table(table: PassageTable, path: str) -> None:
    """Debugging dump: header (N, origin, extent), then row-major values.

    Not a stability contract; load_table is the inverse for round-trip tests.
    """
    bi, bj = table.extent
    with open(path, "wb") as fh:
        fh.write(_DUMP_MAGIC)
        fh.write(struct.pack("<7q", table.size, *table.origin, bi, bj, 0, 0))
        fh.write(np.ascontiguousarray(table.values, dtype=np.float64).tobytes())
        fh.write(np.ascontiguousarray(table.pred, dtype=np.uint8).tobytes())


def load_table(path: str) -> PassageTable:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _DUMP_MAGIC:
            raise ValueError(f"not a passage-table dump: {path}")
        size, o_i, o_j, b_i, b_j, _, _ = struct.unpack("<7q", fh.read(56))
        n = (b_i + 1) * (b_j + 1)
        values = np.frombuffer(fh.read(8 * n), dtype=np.float64).reshape(b_i + 1, b_j + 1)
        pred = np.frombuffer(fh.read(n), dtype=np.uint8).reshape(b_i + 1, b_j + 1)
    return PassageTable(origin=(o_i, o_j), extent=(b_i, b_j), values=values.copy(), pred=pred.copy(), size=size)
