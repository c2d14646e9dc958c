"""Environment kinds: validation, regions, pathwise coupling, serialization."""

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from halfspace_lpp.env import (
    AlphaBeta,
    EnvironmentSpec,
    FullSpaceSquare,
    PointToPoint,
    PointToPointRate,
    RegionTag,
    StationaryRho,
    Tilted,
    ZeroDiagonal,
    boundary_rates,
    classify_region,
    decompose_increment_pair,
    spec_from_json,
    spec_to_json,
    weight_at,
)


def spec(kind, size=50, seed=0, group="default"):
    return EnvironmentSpec(kind=kind, size=size, seed=seed, coupling_group=group)


def test_region_classification():
    assert classify_region((0, 0)) is RegionTag.ORIGIN
    assert classify_region((4, 4)) is RegionTag.DIAGONAL
    assert classify_region((9, 0)) is RegionTag.BOTTOM_ROW
    assert classify_region((5, 2)) is RegionTag.BULK
    with pytest.raises(ValueError):
        classify_region((2, 3))
    with pytest.raises(ValueError):
        classify_region((-1, 0))


@pytest.mark.parametrize(
    "bad",
    [
        lambda: StationaryRho(0.0),
        lambda: StationaryRho(1.0),
        lambda: PointToPoint(-0.5),
        lambda: PointToPoint(0.6),  # rate above 1
        lambda: PointToPointRate(0.0),
        lambda: ZeroDiagonal(1.0),
        lambda: AlphaBeta(0.3, -0.3),  # alpha + beta must be positive
        lambda: AlphaBeta(-0.6, 0.7),  # diagonal rate would be negative
        lambda: Tilted(StationaryRho(0.5), tau=1.0, m1=0.0),
        lambda: Tilted(StationaryRho(0.5), tau=0.5, m1=-1.0),
        lambda: EnvironmentSpec(kind=StationaryRho(0.5), size=0, seed=0),
    ],
)
def test_invalid_parameters_rejected(bad):
    with pytest.raises(ValueError):
        bad()


def test_point_to_point_accepts_infinite_alpha():
    assert boundary_rates(PointToPoint(math.inf)) == (0.0, 0.0)
    assert boundary_rates(PointToPointRate(math.inf))[0] == 0.0


def test_boundary_rates_table():
    assert boundary_rates(StationaryRho(0.55)) == (0.55, 1.0 - 0.55)
    assert boundary_rates(PointToPoint(0.2)) == (0.7, 0.0)
    assert boundary_rates(ZeroDiagonal(0.3)) == (0.0, 0.7)
    assert boundary_rates(AlphaBeta(0.1, 0.2)) == (0.6, 0.7)
    assert boundary_rates(FullSpaceSquare()) == (1.0, 0.0)
    assert boundary_rates(Tilted(StationaryRho(0.4), 0.5, 1.0)) == (0.4, 0.6)


def test_origin_weighs_zero_everywhere():
    for kind in (StationaryRho(0.5), PointToPoint(0.1), FullSpaceSquare()):
        assert weight_at(spec(kind), (0, 0)) == 0.0


def test_bulk_weights_shared_across_coupled_kinds():
    kinds = [StationaryRho(0.3), StationaryRho(0.7), PointToPoint(0.25), ZeroDiagonal(0.4)]
    specs = [spec(k) for k in kinds]
    for p in [(3, 1), (7, 2), (10, 4)]:
        vals = {weight_at(s, p) for s in specs}
        assert len(vals) == 1  # identical floats, not just close


def test_boundary_weights_monotone_in_rate():
    lo, hi = spec(StationaryRho(0.3)), spec(StationaryRho(0.7))
    for i in range(1, 30):
        # Diagonal rate rises 0.3 -> 0.7, so the weight falls; bottom-row
        # rate falls 0.7 -> 0.3, so that weight rises.
        assert weight_at(lo, (i, i)) > weight_at(hi, (i, i))
        assert weight_at(lo, (i, 0)) < weight_at(hi, (i, 0))


def test_zero_rate_regions_weigh_zero():
    s = spec(ZeroDiagonal(0.4))
    assert weight_at(s, (5, 5)) == 0.0
    assert weight_at(s, (5, 0)) > 0.0
    s = spec(PointToPoint(0.1))
    assert weight_at(s, (5, 0)) == 0.0


def test_full_space_square_geometry():
    s = spec(FullSpaceSquare())
    assert weight_at(s, (2, 5)) > 0.0  # upper triangle exists here
    assert weight_at(s, (0, 3)) == 0.0
    assert weight_at(s, (3, 0)) == 0.0
    # The diagonal comes from the same stream as a rate-1 half-space diagonal.
    ref = spec(PointToPointRate(1.0))
    for i in (1, 4, 9):
        assert weight_at(s, (i, i)) == weight_at(ref, (i, i))


def test_half_space_rejects_upper_triangle():
    with pytest.raises(ValueError):
        weight_at(spec(StationaryRho(0.5)), (2, 3))


def test_tilted_strip_kills_weights():
    base = StationaryRho(0.6)
    tilted = Tilted(base, tau=0.5, m1=0.25)
    size = 40
    st_spec, ti_spec = spec(base, size=size), spec(tilted, size=size)
    strip_width = 2.0 * 0.25 * (2.0 * size) ** (2.0 / 3.0)
    hits = dead = 0
    for i in range(size + 1):
        for j in range(i + 1):
            inside = i + j >= 2 * 0.5 * size and i - j <= strip_width
            w_ti = weight_at(ti_spec, (i, j))
            if inside:
                assert w_ti == 0.0
                dead += 1
            elif (i, j) != (0, 0):
                assert w_ti == weight_at(st_spec, (i, j))
                hits += 1
    assert dead > 10 and hits > 100  # the strip is neither empty nor everything


def test_decompose_increment_pair_worked_example():
    u = v = math.exp(-1.0)
    dec = decompose_increment_pair(u, v, rho=0.6, rho_minus=0.4)
    assert dec.x_hat == pytest.approx(2.5)
    assert dec.y_hat == pytest.approx(5.0 / 3.0)
    assert dec.p == pytest.approx(5.0 / 6.0)
    assert dec.q == pytest.approx(5.0 / 6.0)


@given(
    st.floats(1e-6, 1.0), st.floats(1e-6, 1.0),
    st.floats(0.05, 0.45), st.floats(0.5, 0.95),
)
def test_decompose_increment_pair_reconstructs(u, v, rho_minus, rho):
    dec = decompose_increment_pair(u, v, rho=rho, rho_minus=rho_minus)
    assert dec.p >= 0.0 and dec.q >= 0.0
    # x_hat - p and y_hat + q are the rho_minus environment's samples.
    assert dec.x_hat - dec.p == pytest.approx(-math.log(u) / (1.0 - rho_minus))
    assert dec.y_hat + dec.q == pytest.approx(-math.log(v) / rho_minus)


def test_decompose_increment_pair_rejects_misuse():
    with pytest.raises(ValueError):
        decompose_increment_pair(0.0, 0.5, rho=0.6, rho_minus=0.4)
    with pytest.raises(ValueError):
        decompose_increment_pair(0.5, 0.5, rho=0.4, rho_minus=0.6)


@pytest.mark.parametrize(
    "kind",
    [
        StationaryRho(0.55),
        PointToPoint(0.125),
        PointToPoint(math.inf),
        PointToPointRate(1.0),
        ZeroDiagonal(0.35),
        AlphaBeta(-0.05, 0.5),
        FullSpaceSquare(),
        Tilted(StationaryRho(0.5), 0.5, 0.75),
    ],
)
def test_spec_json_round_trip(kind):
    s = EnvironmentSpec(kind=kind, size=123, seed=42, coupling_group="rt")
    assert spec_from_json(spec_to_json(s)) == s


def test_same_group_means_same_key():
    a = spec(StationaryRho(0.4), seed=5, group="g")
    b = spec(ZeroDiagonal(0.2), seed=5, group="g")
    c = spec(StationaryRho(0.4), seed=5, group="h")
    assert a.key == b.key != c.key
