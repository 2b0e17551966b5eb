"""Counter-based deterministic randomness for transmission schedules.

The access function f(s_m, u_n) must be recomputable by the receiver for any
(user, slot) cell, in any order, long after the fact. A stateful stream
generator cannot do that, so every cell is hashed independently: the tuple
(seed, user index, slot index) is injected into a 64-bit word and passed
through the splitmix64 finalizer, and the user transmits when the hash falls
below round(p * 2^64). Random access to any cell costs one hash.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_MASK = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

_U64_GOLDEN = np.uint64(_GOLDEN)
_U64_MIX1 = np.uint64(_MIX1)
_U64_MIX2 = np.uint64(_MIX2)

# Threshold sentinel for p >= 1: a float-derived threshold never exceeds
# 2^64 - 2^11, so the all-ones word is free to mean "always transmit".
ALWAYS = np.uint64(_MASK)


def mix64(z: int) -> int:
    """splitmix64 finalizer; a bijective avalanche on 64-bit words."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return (z ^ (z >> 31)) & _MASK


def cell_hash(seed: int, user_index: int, slot_index: int) -> int:
    """Uniform 64-bit hash of one (user, slot) cell under the given seed.

    The pre-mix injection seed + (m+1)*GOLDEN + (n<<32)*GOLDEN is injective
    over all practical index ranges (n, m < 2^32), so distinct cells never
    share a hash input.
    """
    z = seed + (slot_index + 1) * _GOLDEN + ((user_index << 32) * _GOLDEN)
    return mix64(z & _MASK)


def threshold_u64(p: float) -> np.uint64:
    """Compare threshold for probability p: transmit iff hash < threshold."""
    if p >= 1.0:
        return ALWAYS
    if p <= 0.0:
        return np.uint64(0)
    return np.uint64(int(p * 2.0**64))


def derive_seed(seed: int, *indices: int) -> int:
    """Derive an independent child seed by hashing indices into the master.

    Used for per-run and per-round seeds so that every Monte Carlo run is
    individually replayable from (master seed, run index).
    """
    h = mix64((seed + _GOLDEN) & _MASK)
    for ix in indices:
        h = mix64((h + (ix + 1) * _GOLDEN) & _MASK)
    return h


@njit(cache=True)
def _fill_hits(seed, slot_lo, slot_hi, num_users, thresholds, out_users, out_slots):
    # Scans all (user, slot) cells for slots in [slot_lo, slot_hi) and records
    # the transmitting pairs. Returns the total hit count, which may exceed
    # the buffer capacity; the caller retries with a larger buffer then.
    cap = out_users.shape[0]
    k = 0
    for m in range(slot_lo, slot_hi):
        t = thresholds[m - slot_lo]
        if t == np.uint64(0):
            continue
        always = t == ALWAYS
        base = np.uint64(seed) + np.uint64(m + 1) * _U64_GOLDEN
        for n in range(num_users):
            z = base + (np.uint64(n) << np.uint64(32)) * _U64_GOLDEN
            z = (z ^ (z >> np.uint64(30))) * _U64_MIX1
            z = (z ^ (z >> np.uint64(27))) * _U64_MIX2
            z = z ^ (z >> np.uint64(31))
            if always or z < t:
                if k < cap:
                    out_users[k] = n
                    out_slots[k] = m
                k += 1
    return k


def generate_hits(seed, slot_lo, slot_hi, num_users, thresholds):
    """All transmitting (user, slot) pairs for slots in [slot_lo, slot_hi).

    thresholds holds one uint64 compare threshold per slot in the window.
    Returns (users, slots) int64 arrays ordered by slot, then user. Bit-exact
    with the scalar cell_hash path.
    """
    num_slots = slot_hi - slot_lo
    thresholds = np.ascontiguousarray(thresholds, dtype=np.uint64)
    if thresholds.shape[0] != num_slots:
        raise ValueError("need one threshold per slot in the window")
    seed_word = np.uint64(int(seed) & _MASK)
    # Expected hits plus slack; the kernel reports the true count on overflow.
    cap = int(2.0 ** -64 * float(thresholds.sum(dtype=np.float64)) * num_users * 2) + 256
    while True:
        out_users = np.empty(cap, dtype=np.int64)
        out_slots = np.empty(cap, dtype=np.int64)
        k = _fill_hits(seed_word, slot_lo, slot_hi, num_users, thresholds, out_users, out_slots)
        if k <= cap:
            return out_users[:k], out_slots[:k]
        cap = int(k * 1.2) + 1024
