"""Counter-based deterministic randomness.

Every random quantity in a trial is a pure function of
(master_seed, trial_index, stream_tag, counter...) pushed through a
SplitMix64-style avalanche.  Nothing is stateful, so the result of a
simulation does not depend on evaluation order, chunking, or the number
of worker processes.  The same mixing runs either on Python ints or on
numpy uint64 arrays; the two paths are bit-identical (tested).

Stream tags 0..7 are reserved for the sampler.  Callers supplying their
own tag (edge thinning) should use 8 or above.
"""

from __future__ import annotations

import math

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB

TAG_POINT_COUNT = 0
TAG_POINT_COORDS = 1
TAG_EDGES = 2
TAG_COUPLING = 3
TAG_USER_BASE = 8

# Mean at or above which node counts switch from CDF inversion to the
# transformed-rejection sampler.  Pinned so golden outputs stay stable.
POISSON_INVERSION_LIMIT = 30.0


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a Python int, mod 2**64."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def mix64_array(z: np.ndarray) -> np.ndarray:
    """Same finalizer on a uint64 array. Multiplication wraps mod 2**64."""
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
        return z ^ (z >> np.uint64(31))


def stream_key(master_seed: int, trial_index: int, stream_tag: int) -> int:
    """Fold the identifying words into one 64-bit stream key."""
    h = mix64(GOLDEN ^ (master_seed & MASK64))
    h = mix64(h ^ (trial_index & MASK64))
    h = mix64(h ^ (stream_tag & MASK64))
    return h


def _word(key: int, w: int) -> int:
    return mix64((key + GOLDEN * w) & MASK64)


def _to_unit(h: int) -> float:
    # top 53 bits -> [0, 1)
    return (h >> 11) * 2.0**-53


def uniform(key: int, counter: int) -> float:
    """Uniform [0, 1) at position `counter` of the stream `key`."""
    return _to_unit(_word(key, counter))


def uniform_array(key: int, counters: np.ndarray) -> np.ndarray:
    """Vectorized `uniform` over a uint64 counter array."""
    counters = np.asarray(counters, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(key) + np.uint64(GOLDEN) * counters
    h = mix64_array(z)
    return (h >> np.uint64(11)).astype(np.float64) * 2.0**-53


def pair_uniform(key: int, i: int, j: int) -> float:
    """Uniform [0, 1) attached to the unordered point pair (i, j), i < j."""
    return _to_unit(_word(_word(key, i), j))


def pair_uniform_array(key: int, i: np.ndarray, j: np.ndarray) -> np.ndarray:
    """Vectorized `pair_uniform` over index arrays (elementwise i < j)."""
    i = np.asarray(i, dtype=np.uint64)
    j = np.asarray(j, dtype=np.uint64)
    g = np.uint64(GOLDEN)
    with np.errstate(over="ignore"):
        h = mix64_array(np.uint64(key) + g * i)
        h = mix64_array(h + g * j)
    return (h >> np.uint64(11)).astype(np.float64) * 2.0**-53


def poisson_sample(mean: float, key: int) -> int:
    """Poisson draw from the counter stream `key`.

    CDF inversion below POISSON_INVERSION_LIMIT, transformed rejection
    (PTRS) at or above it.  Consumption of the stream is deterministic
    given (mean, key).
    """
    if mean < 0:
        raise ValueError(f"mean must be >= 0, got {mean}")
    if mean == 0:
        return 0
    if mean < POISSON_INVERSION_LIMIT:
        return _poisson_inversion(mean, key)
    return _poisson_ptrs(mean, key)


def _poisson_inversion(mean: float, key: int) -> int:
    u = uniform(key, 0)
    p = math.exp(-mean)
    s = p
    k = 0
    # float tail guard: the partial sums cannot reach a u extremely close
    # to 1 once p underflows, so cap the walk well past the bulk
    cap = int(mean + 40.0 * math.sqrt(mean) + 25.0)
    while u > s and k < cap:
        k += 1
        p *= mean / k
        s += p
    return k


def _poisson_ptrs(mean: float, key: int) -> int:
    # Transformed rejection with squeeze, valid for mean >= 10.
    b = 0.931 + 2.53 * math.sqrt(mean)
    a = -0.059 + 0.02483 * b
    inv_alpha = 1.1239 + 1.1328 / (b - 3.4)
    v_r = 0.9277 - 3.6224 / (b - 2.0)
    log_mean = math.log(mean)
    c = 0
    while True:
        u = uniform(key, c) - 0.5
        v = uniform(key, c + 1)
        c += 2
        us = 0.5 - abs(u)
        if us <= 0.0:
            continue
        k = math.floor((2.0 * a / us + b) * u + mean + 0.43)
        if us >= 0.07 and v <= v_r:
            return int(k)
        if k < 0 or (us < 0.013 and v > us):
            continue
        lhs = math.log(v * inv_alpha / (a / (us * us) + b))
        if lhs <= k * log_mean - mean - math.lgamma(k + 1.0):
            return int(k)
