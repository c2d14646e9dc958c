"""Independent oracles the test suite checks the engine against.

Everything here is deliberately naive: exhaustive path enumeration instead
of dynamic programming, textbook closed-form CDFs, a from-scratch SplitMix64
step, and a plain numpy Monte Carlo for the zero-diagonal law.  None of it
imports the package's kernels, so agreement is evidence rather than
tautology.
"""

from __future__ import annotations

import math
from itertools import combinations
from typing import Callable, Iterator

import numpy as np
from scipy import integrate

Point = tuple[int, int]

MASK64 = (1 << 64) - 1


# ---------------------------------------------------------------------------
# Path enumeration.


def iter_paths(a: Point, b: Point, half_space: bool = True) -> Iterator[list[Point]]:
    """Every monotone lattice path from a to b, inclusive of both ends.

    A path is the set of positions of its up-steps among all steps;
    combinations() enumerates them without recursion.  half_space skips
    paths leaving {j <= i}.
    """
    di, dj = b[0] - a[0], b[1] - a[1]
    if di < 0 or dj < 0:
        return
    steps = di + dj
    for up_positions in combinations(range(steps), dj):
        ups = set(up_positions)
        path = [a]
        i, j = a
        ok = True
        for k in range(steps):
            if k in ups:
                j += 1
            else:
                i += 1
            if half_space and j > i:
                ok = False
                break
            path.append((i, j))
        if ok:
            yield path


def path_value(weight: Callable[[Point], float], path: list[Point]) -> float:
    # Running left-to-right sum, the same association order the DP uses, so
    # agreement can be asserted exactly rather than within a tolerance.
    acc = 0.0
    for p in path[1:]:
        acc += weight(p)
    return acc


def _touches_diag(path: list[Point]) -> bool:
    return any(i == j and i >= 1 for i, j in path)


def brute_force_values(
    weight: Callable[[Point], float],
    a: Point,
    b: Point,
    half_space: bool = True,
) -> dict[str, float]:
    """Maxima over all paths: unrestricted, diagonal-avoiding, diagonal-touching.

    The avoiding maximum excludes any path visiting {i = j >= 1} (the start
    included); the touching maximum keeps only paths that visit it.  Empty
    path sets give -inf.
    """
    best = {"unrestricted": -math.inf, "avoid": -math.inf, "touch": -math.inf}
    for path in iter_paths(a, b, half_space):
        v = path_value(weight, path)
        if v > best["unrestricted"]:
            best["unrestricted"] = v
        if _touches_diag(path):
            if v > best["touch"]:
                best["touch"] = v
        elif v > best["avoid"]:
            best["avoid"] = v
    return best


def brute_force_geodesic(
    weight: Callable[[Point], float], a: Point, b: Point
) -> tuple[float, list[Point]]:
    best_v, best_p = -math.inf, []
    for path in iter_paths(a, b):
        v = path_value(weight, path)
        if v > best_v:
            best_v, best_p = v, path
    return best_v, best_p


# ---------------------------------------------------------------------------
# Closed-form distributional facts for the stationary model.


def stationary_mean(end: Point, rho: float) -> float:
    """E L(origin -> end) = i/(1-rho) + j/rho, exact at every size."""
    return end[0] / (1.0 - rho) + end[1] / rho


def two_sided_exp_cdf(t: np.ndarray, rho: float) -> np.ndarray:
    """CDF of X - Y with X ~ Exp(1-rho), Y ~ Exp(rho) independent."""
    t = np.asarray(t, dtype=float)
    pos = 1.0 - rho * np.exp(-(1.0 - rho) * np.clip(t, 0.0, None))
    neg = (1.0 - rho) * np.exp(rho * np.clip(t, None, 0.0))
    return np.where(t >= 0.0, pos, neg)


# ---------------------------------------------------------------------------
# Zero-diagonal law at tiny endpoints.


def zero_diagonal_cdf_31(s: float, beta: float) -> float:
    """Exact P(L(3,1) <= s) for the zero-diagonal model, by nested quadrature.

    With bottom-row rate b = 1/2 + beta and bulk rate 1, the three admissible
    paths to (3,1) share X1 and W31, so

        L = X1 + W31 + max(X2 + max(X3, W21), W21),

    X* ~ Exp(b) iid, W* ~ Exp(1) iid.  The inner max has an elementary
    conditional CDF given W21 = w; one quadrature over w and one over the
    X1 + W31 convolution finish the job.
    """
    b = 0.5 + beta

    def inner_cdf(t: float, w: float) -> float:
        # P(X2 + max(X3, w) <= t) for a fixed w <= t.
        ebw, ebt = math.exp(-b * w), math.exp(-b * t)
        head = (1.0 - ebw) * (1.0 - math.exp(-b * (t - w)))
        tail = ebw - ebt - b * (t - w) * ebt
        return head + tail

    def max_cdf(t: float) -> float:
        if t <= 0.0:
            return 0.0
        val, _ = integrate.quad(lambda w: math.exp(-w) * inner_cdf(t, w), 0.0, t)
        return val

    def conv_density(z: float) -> float:
        # X1 + W31 with distinct rates b and 1.
        return b / (1.0 - b) * (math.exp(-b * z) - math.exp(-z))

    val, _ = integrate.quad(
        lambda z: conv_density(z) * max_cdf(s - z), 0.0, s, limit=200
    )
    return val


def mc_zero_diagonal_cdf(
    end: Point,
    rho_minus: float,
    s_values: np.ndarray,
    n_rep: int,
    seed: int,
) -> np.ndarray:
    """Monte Carlo CDF of the zero-diagonal value at a small endpoint.

    Plain numpy: exponential draws per site in (i outer, j inner) order and a
    vectorized Bellman recursion across replicas.  Kept allocation-light so a
    few million replicas fit in memory.
    """
    qi, qj = end
    bottom = 1.0 - rho_minus
    rng = np.random.default_rng(seed)
    neg = -1e18
    prev = np.full((n_rep, qj + 1), neg)
    cur = np.empty_like(prev)
    for i in range(qi + 1):
        cur.fill(neg)
        for j in range(min(i, qj) + 1):
            if i == 0 and j == 0:
                cur[:, 0] = 0.0
                continue
            if j == 0:
                w = rng.exponential(1.0 / bottom, n_rep)
            elif i == j:
                w = 0.0
            else:
                w = rng.exponential(1.0, n_rep)
            best = prev[:, j] if i > 0 else np.full(n_rep, neg)
            if j > 0:
                best = np.maximum(best, cur[:, j - 1])
            cur[:, j] = best + w
        prev, cur = cur, prev
    values = prev[:, qj]
    return np.array([(values <= s).mean() for s in np.atleast_1d(s_values)])


# ---------------------------------------------------------------------------
# A third SplitMix64, written from the published recipe.


def splitmix64_reference(z: int) -> int:
    z &= MASK64
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & MASK64
    return z ^ (z >> 31)
