"""Counter-based uniforms for coupled environments.

Every weight in every environment is a deterministic function of
``(seed, coupling_group, i, j, stream)``.  Two environment specs that share a
seed and a coupling group therefore see the *same* uniform at the same site
and stream, which is what makes the couplings in the comparison experiments
pathwise rather than distributional.  Weights are drawn by inverse CDF,
``-log(u) / rate``, so monotonicity in the rate holds sample by sample.

The generator is the SplitMix64 output permutation (Steele, Lea, Flood 2014)
used as a keyed hash of the site counter.  It is stateless: any site can be
evaluated in O(1) without materializing the lattice, which the lazy
``weight_at`` accessor and the numba DP kernels both rely on.

Streams: 0 for the bottom row and the bulk (the "X" side of the coupling),
1 for the diagonal (the "Y" side).  Keeping the diagonal on its own stream
means changing the diagonal rate never perturbs bulk samples and vice versa.

This module is the plain-Python reference; ``_kernels`` carries a numba twin
that must stay bit-identical (tested).
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB

STREAM_BULK = 0
STREAM_DIAGONAL = 1

# (h >> 11) is uniform on {0, ..., 2^53 - 1}; +1 shifts the range to (0, 1]
# so that log(u) is always finite.
_INV_2_53 = 2.0**-53


def fmix64(z: int) -> int:
    """SplitMix64 finalizer: a bijective avalanche permutation of u64."""
    z &= MASK64
    z ^= z >> 30
    z = (z * MIX1) & MASK64
    z ^= z >> 27
    z = (z * MIX2) & MASK64
    z ^= z >> 31
    return z


def fnv1a64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for b in data:
        h ^= b
        h = (h * 0x100000001B3) & MASK64
    return h


def environment_key(seed: int, coupling_group: str) -> int:
    """Fold (seed, coupling_group) into the 64-bit key the site hash uses.

    Environments in the same group share the key, hence the uniforms.
    """
    return fmix64(fmix64((seed + GOLDEN) & MASK64) ^ fnv1a64(coupling_group.encode("utf-8")))


def derive_seed(seed0: int, index: int) -> int:
    """Per-replica seed: an independent-looking stream for replica ``index``."""
    return fmix64(fmix64((seed0 + GOLDEN) & MASK64) ^ ((index + GOLDEN) & MASK64))


def site_hash(key: int, i: int, j: int, stream: int) -> int:
    h = fmix64(key ^ ((i << 32) | j))
    return fmix64(h ^ ((stream + GOLDEN) & MASK64))


def site_uniform(key: int, i: int, j: int, stream: int) -> float:
    """Uniform on (0, 1], identical across every caller for fixed arguments."""
    return ((site_hash(key, i, j, stream) >> 11) + 1) * _INV_2_53


def site_uniform_array(
    key: int, i: np.ndarray, j: np.ndarray, stream: int
) -> np.ndarray:
    """Vectorized :func:`site_uniform` over integer arrays of sites."""
    i64 = np.asarray(i, dtype=np.uint64)
    j64 = np.asarray(j, dtype=np.uint64)
    with np.errstate(over="ignore"):  # u64 wraparound is the point
        h = _fmix64_np(np.uint64(key) ^ ((i64 << np.uint64(32)) | j64))
        h = _fmix64_np(h ^ np.uint64((stream + GOLDEN) & MASK64))
    return ((h >> np.uint64(11)).astype(np.float64) + 1.0) * _INV_2_53


def _fmix64_np(z: np.ndarray) -> np.ndarray:
    # uint64 throughout; mixing in Python ints would promote to float64.
    z = z ^ (z >> np.uint64(30))
    z = z * np.uint64(MIX1)
    z = z ^ (z >> np.uint64(27))
    z = z * np.uint64(MIX2)
    z = z ^ (z >> np.uint64(31))
    return z
