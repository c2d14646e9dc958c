"""JIT-compiled inner loops: site hashing, DP sweeps, replica drivers.

Private module.  Everything here mirrors the plain-Python definitions in
:mod:`halfspace_lpp.rng` and :mod:`halfspace_lpp.env` bit for bit (tested);
the duplication buys lattice evaluation at a few ns/site, which is what makes
1e5-replica experiments feasible on one core.

Model encoding (one float64 row per environment, see engine.model_code):

    [0] geometry: 0 = half-space, 1 = full quadrant
    [1] diagonal rate     (0 encodes a deterministic zero weight)
    [2] bottom-row rate   (0 encodes a deterministic zero weight)
    [3] tilt flag
    [4] tilt sum threshold   (zero weights where i+j >= this ...)
    [5] tilt diff threshold  (... and i-j <= this)
    [6] path constraint: 0 unrestricted, 1 must touch diagonal, 2 avoid diagonal

Replica r of an experiment with base seed s0 uses the environment key
key = fmix(fmix(derive_seed(s0, r) + GOLDEN) ^ group_hash), the same chain as
rng.derive_seed / rng.environment_key.

All drivers write only to per-replica output slots, so results do not depend
on the prange schedule or thread count.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

U64 = np.uint64
GOLDEN = U64(0x9E3779B97F4A7C15)
MIX1 = U64(0xBF58476D1CE4E5B9)
MIX2 = U64(0x94D049BB133111EB)
S30 = U64(30)
S27 = U64(27)
S31 = U64(31)
S32 = U64(32)
S11 = U64(11)
INV_2_53 = 2.0**-53

NEG_INF = -np.inf


@njit(cache=True, inline="always")
def _fmix64(z):
    z ^= z >> S30
    z *= MIX1
    z ^= z >> S27
    z *= MIX2
    z ^= z >> S31
    return z


@njit(cache=True, inline="always")
def _site_u(key, i, j, stream):
    h = _fmix64(key ^ ((U64(i) << S32) | U64(j)))
    h = _fmix64(h ^ (U64(stream) + GOLDEN))
    return (np.float64(h >> S11) + 1.0) * INV_2_53


@njit(cache=True, inline="always")
def _replica_key(seed0, r, group_hash):
    s = _fmix64(_fmix64(U64(seed0) + GOLDEN) ^ (U64(r) + GOLDEN))
    return _fmix64(_fmix64(s + GOLDEN) ^ U64(group_hash))


@njit(cache=True, inline="always")
def _weight(model, key, i, j):
    if i == 0 and j == 0:
        return 0.0
    if model[0] == 1.0:  # full quadrant: zero axes, Exp(1) everywhere else
        if i == 0 or j == 0:
            return 0.0
        if i == j:
            return -np.log(_site_u(key, i, j, 1))
        return -np.log(_site_u(key, i, j, 0))
    if model[3] == 1.0 and np.float64(i + j) >= model[4] and np.float64(i - j) <= model[5]:
        return 0.0
    if i == j:
        r = model[1]
        if r <= 0.0:
            return 0.0
        return -np.log(_site_u(key, i, j, 1)) / r
    if j == 0:
        r = model[2]
        if r <= 0.0:
            return 0.0
        return -np.log(_site_u(key, i, j, 0)) / r
    return -np.log(_site_u(key, i, j, 0))


@njit(cache=True)
def _values_at(model, key, a_i, a_j, ends):
    """Last-passage values from (a_i, a_j) to every endpoint, one DP sweep.

    A single pass over the bounding box computes L(a, p) for all p at once;
    endpoints outside the reachable cone come back as -inf.  Constraint
    handling: `avoid` removes diagonal sites; `must touch` runs a second DP
    layer restricted to paths that have already met the diagonal.
    """
    constraint = np.int64(model[6])
    full = model[0] == 1.0
    n_ends = ends.shape[0]
    out = np.full(n_ends, NEG_INF)
    b_i = a_i
    b_j = a_j
    for e in range(n_ends):
        if ends[e, 0] > b_i:
            b_i = ends[e, 0]
        if ends[e, 1] > b_j:
            b_j = ends[e, 1]
    if constraint == 2 and a_i == a_j and a_i >= 1:
        return out  # start sits on the diagonal: every path is disqualified
    width = b_j - a_j + 1
    prev = np.full(width, NEG_INF)
    cur = np.full(width, NEG_INF)
    tprev = np.full(width, NEG_INF)
    tcur = np.full(width, NEG_INF)
    for i in range(a_i, b_i + 1):
        hi = b_j if full else min(i, b_j)
        for jj in range(width):
            cur[jj] = NEG_INF
            tcur[jj] = NEG_INF
        for j in range(a_j, hi + 1):
            jj = j - a_j
            if i == a_i and j == a_j:
                cur[jj] = 0.0  # start excluded from the weight sum
                if constraint == 1:
                    tcur[jj] = 0.0 if (a_i == a_j and a_i >= 1) else NEG_INF
                continue
            left = prev[jj] if i > a_i else NEG_INF
            below = cur[jj - 1] if j > a_j else NEG_INF
            best = left if left >= below else below
            if best == NEG_INF:
                continue
            if constraint == 2 and i == j and i >= 1:
                continue
            w = _weight(model, key, i, j)
            cur[jj] = w + best
            if constraint == 1:
                if i == j and i >= 1:
                    tcur[jj] = cur[jj]
                else:
                    tleft = tprev[jj] if i > a_i else NEG_INF
                    tbelow = tcur[jj - 1] if j > a_j else NEG_INF
                    tbest = tleft if tleft >= tbelow else tbelow
                    if tbest > NEG_INF:
                        tcur[jj] = w + tbest
        for e in range(n_ends):
            if ends[e, 0] == i:
                jj = ends[e, 1] - a_j
                if 0 <= jj < width:
                    out[e] = tcur[jj] if constraint == 1 else cur[jj]
        tmp = prev
        prev = cur
        cur = tmp
        ttmp = tprev
        tprev = tcur
        tcur = ttmp
    return out


@njit(cache=True)
def _build_table(model, key, b_i, b_j):
    """Full origin-rooted DP table with predecessor bits for backtracking.

    pred: 0 = from below (i, j-1), 1 = from left (i-1, j), 255 = none.
    Ties favor below, so injected equal-weight tests stay reproducible.
    """
    full = model[0] == 1.0
    values = np.full((b_i + 1, b_j + 1), NEG_INF)
    pred = np.full((b_i + 1, b_j + 1), 255, np.uint8)
    values[0, 0] = 0.0
    for i in range(b_i + 1):
        hi = b_j if full else min(i, b_j)
        for j in range(hi + 1):
            if i == 0 and j == 0:
                continue
            left = values[i - 1, j] if i > 0 else NEG_INF
            below = values[i, j - 1] if j > 0 else NEG_INF
            if left == NEG_INF and below == NEG_INF:
                continue
            w = _weight(model, key, i, j)
            if left > below:
                values[i, j] = w + left
                pred[i, j] = 1
            else:
                values[i, j] = w + below
                pred[i, j] = 0
    return values, pred


@njit(cache=True)
def _backtrack_levels(pred, b_i, b_j):
    """Geodesic as its i-coordinate per anti-diagonal level 0..b_i+b_j."""
    levels = b_i + b_j
    xs = np.empty(levels + 1, np.int32)
    i = b_i
    j = b_j
    while i + j > 0:
        xs[i + j] = i
        if pred[i, j] == 1:
            i -= 1
        else:
            j -= 1
    xs[0] = np.int32(i)
    return xs


@njit(cache=True, inline="always")
def _max_excursion_int(xs):
    """max(i - j) along a level-indexed path (i - j = 2i - level)."""
    best = np.int64(0)
    for lvl in range(xs.shape[0]):
        d = np.int64(2) * np.int64(xs[lvl]) - np.int64(lvl)
        if d > best:
            best = d
    return best


@njit(cache=True, inline="always")
def _touches_diagonal(xs):
    # a level-2k point sits on the diagonal iff i == k, excluding the origin
    for lvl in range(2, xs.shape[0], 2):
        if np.int64(2) * np.int64(xs[lvl]) == np.int64(lvl):
            return True
    return False


@njit(cache=True)
def _bulk_crossing(xs_a, xs_b):
    """Shared bulk point of two origin-rooted paths, or (-1, -1).

    Returns the intersection farthest from the origin in L-infinity distance
    (ties: larger i, then larger j).  Along an up-right path both coordinates
    are nondecreasing, so scanning levels upward and keeping the last bulk
    meeting point realizes exactly that rule.
    """
    n = min(xs_a.shape[0], xs_b.shape[0])
    ci = np.int64(-1)
    cj = np.int64(-1)
    for lvl in range(n):
        ia = np.int64(xs_a[lvl])
        if ia == np.int64(xs_b[lvl]):
            j = np.int64(lvl) - ia
            if j > 0 and j < ia:
                ci = ia
                cj = j
    return ci, cj


# ---------------------------------------------------------------------------
# Replica drivers.  Each writes to its own slot of the output arrays, so the
# results are independent of the prange schedule.


@njit(cache=True, parallel=True)
def drv_values(n_rep, seed0, group_hash, models, ends):
    """Values of every model at every endpoint, per replica."""
    n_models = models.shape[0]
    n_ends = ends.shape[0]
    out = np.empty((n_rep, n_models, n_ends))
    for r in prange(n_rep):
        key = _replica_key(U64(seed0), U64(r), U64(group_hash))
        for m in range(n_models):
            out[r, m, :] = _values_at(models[m], key, np.int64(0), np.int64(0), ends)
    return out


@njit(cache=True, parallel=True)
def drv_comparisons(n_rep, seed0, group_hash, models, n_levels, level_bases, off_maxes, n_pairs):
    """Increment samples plus crossing/diagonal-avoidance events per pair.

    Pair k of replica r is sampled from hash stream 2 (untouched by weights):
    a level base B and two offsets 1 <= a <= b giving p = (B+a, B-a),
    q = (B+b, B-b).  Offsets start at 1 so both points sit strictly below the
    diagonal (the conditional comparisons need bulk endpoints).  Returns
      inc[r, k, m]    = L_m(q) - L_m(p) for each model row m
      crossed_a[r, k] = pi_pp(p) and pi_st-(q) share a bulk point
      crossed_b[r, k] = pi_st-(p) and pi_pp(q) share a bulk point
      avoids[r, k]    = pi_st-(p) never touches the diagonal
    Model rows 0 and 2 must be the point-to-point and the rho_minus-stationary
    environments (they are the ones whose geodesics the events use).
    """
    n_models = models.shape[0]
    inc = np.empty((n_rep, n_pairs, n_models))
    crossed_a = np.zeros((n_rep, n_pairs), np.uint8)
    crossed_b = np.zeros((n_rep, n_pairs), np.uint8)
    avoids = np.zeros((n_rep, n_pairs), np.uint8)
    for r in prange(n_rep):
        key = _replica_key(U64(seed0), U64(r), U64(group_hash))
        ends = np.empty((2 * n_pairs, 2), np.int64)
        for k in range(n_pairs):
            u_lev = _site_u(key, np.int64(k), np.int64(0), np.int64(2))
            lev = np.int64(u_lev * n_levels)
            if lev >= n_levels:
                lev = n_levels - 1
            base = level_bases[lev]
            omax = off_maxes[lev]
            a = np.int64(1) + np.int64(_site_u(key, np.int64(k), np.int64(1), np.int64(2)) * omax)
            b = np.int64(1) + np.int64(_site_u(key, np.int64(k), np.int64(2), np.int64(2)) * omax)
            if a > omax:  # u = 1 exactly is in-range for the uniform
                a = omax
            if b > omax:
                b = omax
            if a > b:
                t = a
                a = b
                b = t
            ends[2 * k, 0] = base + a
            ends[2 * k, 1] = base - a
            ends[2 * k + 1, 0] = base + b
            ends[2 * k + 1, 1] = base - b
        vals = np.empty((n_models, 2 * n_pairs))
        for m in range(n_models):
            vals[m] = _values_at(models[m], key, np.int64(0), np.int64(0), ends)
        for k in range(n_pairs):
            for m in range(n_models):
                inc[r, k, m] = vals[m, 2 * k + 1] - vals[m, 2 * k]
        b_i = np.int64(0)
        b_j = np.int64(0)
        for e in range(2 * n_pairs):
            if ends[e, 0] > b_i:
                b_i = ends[e, 0]
            if ends[e, 1] > b_j:
                b_j = ends[e, 1]
        vals_pp, pred_pp = _build_table(models[0], key, b_i, b_j)
        vals_st, pred_st = _build_table(models[2], key, b_i, b_j)
        for k in range(n_pairs):
            p_i = ends[2 * k, 0]
            p_j = ends[2 * k, 1]
            q_i = ends[2 * k + 1, 0]
            q_j = ends[2 * k + 1, 1]
            xs_pp_p = _backtrack_levels(pred_pp, p_i, p_j)
            xs_pp_q = _backtrack_levels(pred_pp, q_i, q_j)
            xs_st_p = _backtrack_levels(pred_st, p_i, p_j)
            xs_st_q = _backtrack_levels(pred_st, q_i, q_j)
            ci, cj = _bulk_crossing(xs_pp_p, xs_st_q)
            if ci >= 0:
                crossed_a[r, k] = 1
            ci, cj = _bulk_crossing(xs_st_p, xs_pp_q)
            if ci >= 0:
                crossed_b[r, k] = 1
            if not _touches_diagonal(xs_st_p):
                avoids[r, k] = 1
    return inc, crossed_a, crossed_b, avoids


@njit(cache=True, parallel=True)
def drv_crossing(n_rep, seed0, group_hash, model_pp, models_st, p_i, p_j, q_i, q_j):
    """Crossing events of pi_pp(p) with pi_st(q) for a family of densities.

    Returns crossed/touched flags, the last crossing point, and the four
    passage values needed for the conditional increment comparison.
    """
    n_st = models_st.shape[0]
    crossed = np.zeros((n_rep, n_st), np.uint8)
    touched = np.zeros((n_rep, n_st), np.uint8)
    last_i = np.full((n_rep, n_st), -1, np.int64)
    last_j = np.full((n_rep, n_st), -1, np.int64)
    inc_pp = np.empty(n_rep)
    inc_st = np.empty((n_rep, n_st))
    b_i = max(p_i, q_i)
    b_j = max(p_j, q_j)
    for r in prange(n_rep):
        key = _replica_key(U64(seed0), U64(r), U64(group_hash))
        vpp, ppp = _build_table(model_pp, key, b_i, b_j)
        xs_pp = _backtrack_levels(ppp, p_i, p_j)
        inc_pp[r] = vpp[q_i, q_j] - vpp[p_i, p_j]
        for m in range(n_st):
            vst, pst = _build_table(models_st[m], key, b_i, b_j)
            xs_st = _backtrack_levels(pst, q_i, q_j)
            ci, cj = _bulk_crossing(xs_pp, xs_st)
            if ci >= 0:
                crossed[r, m] = 1
                last_i[r, m] = ci
                last_j[r, m] = cj
            if _touches_diagonal(xs_st):
                touched[r, m] = 1
            inc_st[r, m] = vst[q_i, q_j] - vst[p_i, p_j]
    return crossed, touched, last_i, last_j, inc_pp, inc_st


@njit(cache=True, parallel=True)
def drv_excursions(n_rep, seed0, group_hash, models, q_i, q_j):
    """Geodesic max excursions (max i-j) plus pairwise ordering violations.

    Models are expected closest-to-the-diagonal first (pp, stationary,
    tilted); ordv[r, m] counts levels where geodesic m+1 sits left of
    geodesic m, i.e. violations of the expected ordering.
    """
    n_models = models.shape[0]
    exc = np.empty((n_rep, n_models), np.int64)
    ordv = np.zeros((n_rep, n_models - 1), np.int64)
    for r in prange(n_rep):
        key = _replica_key(U64(seed0), U64(r), U64(group_hash))
        xs_prev = np.empty(0, np.int32)
        for m in range(n_models):
            v, pd = _build_table(models[m], key, q_i, q_j)
            xs = _backtrack_levels(pd, q_i, q_j)
            exc[r, m] = _max_excursion_int(xs)
            if m > 0:
                nv = np.int64(0)
                for lvl in range(xs.shape[0]):
                    if xs[lvl] < xs_prev[lvl]:
                        nv += 1
                ordv[r, m - 1] = nv
            xs_prev = xs
    return exc, ordv


@njit(cache=True, parallel=True)
def drv_random_walk(n_rep, seed0, group_hash, n_terms, rate_x, rate_y, drift, scale):
    """Centered two-sided exponential random walk: final value and running sup.

    W_k = (sum_{l<=k} (Exp(rate_x) - Exp(rate_y)) - k*drift) / scale; returns
    (W_final, max_k W_k) per replica, cumulative max taken over k = 0..n_terms.
    """
    out = np.empty((n_rep, 2))
    for r in prange(n_rep):
        key = _replica_key(U64(seed0), U64(r), U64(group_hash))
        s = 0.0
        sup = 0.0  # W_0 = 0 participates in the sup
        for k in range(1, n_terms + 1):
            x = -np.log(_site_u(key, np.int64(k), np.int64(0), np.int64(0))) / rate_x
            y = -np.log(_site_u(key, np.int64(k), np.int64(0), np.int64(1))) / rate_y
            s += x - y
            w = (s - k * drift) / scale
            if w > sup:
                sup = w
        out[r, 0] = (s - n_terms * drift) / scale
        out[r, 1] = sup
    return out


@njit(cache=True, parallel=True)
def drv_surcharge_sums(n_rep, seed0, group_hash, n_terms, rate_p, rate_q):
    """Sums of independent P_i + Q_i surcharges (both exponential)."""
    out = np.empty(n_rep)
    for r in prange(n_rep):
        key = _replica_key(U64(seed0), U64(r), U64(group_hash))
        s = 0.0
        for k in range(1, n_terms + 1):
            p = -np.log(_site_u(key, np.int64(k), np.int64(0), np.int64(0))) / rate_p
            q = -np.log(_site_u(key, np.int64(k), np.int64(0), np.int64(1))) / rate_q
            s += p + q
        out[r] = s
    return out
