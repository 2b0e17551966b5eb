"""Slot access probabilities, Poisson degree formulas, and round generation.

The protocol's contract: in slot s_m every one of the N users transmits
independently with probability p_m = G_m/N, where G_m is the expected slot
degree. The decision for each (user, slot) cell is a pure function of the
round seed, so the receiver can reconstruct the complete schedule of any
resolved user. The framed-ALOHA baseline with an irregular user degree
distribution is also generated here for comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import build_graph
from .prng import cell_hash, generate_hits, threshold_u64


@dataclass(frozen=True)
class AccessSchedule:
    """Expected slot degrees G_m for N users; p_m = G_m/N per slot.

    A schedule holds an explicit prefix of per-slot degrees and, optionally, a
    constant fill value beta for every slot beyond the prefix. Frameless
    rounds do not know M in advance, so constant-beta schedules extend on
    demand; a purely explicit schedule raises when read past its end.
    """

    num_users: int
    beta: float | None = None
    slot_expected_degrees: tuple = ()

    def __post_init__(self):
        if self.num_users < 1:
            raise ValueError("num_users must be >= 1")
        if self.beta is None and not self.slot_expected_degrees:
            raise ValueError("need a constant beta or explicit slot degrees")
        if self.beta is not None and not 0.0 <= self.beta <= self.num_users:
            raise ValueError(f"beta {self.beta} outside [0, N]")
        degrees = tuple(float(g) for g in self.slot_expected_degrees)
        object.__setattr__(self, "slot_expected_degrees", degrees)
        for m, g in enumerate(degrees):
            if not 0.0 <= g <= self.num_users:
                raise ValueError(f"G_{m} = {g} outside [0, N]")

    @classmethod
    def constant(cls, num_users, beta):
        return cls(num_users=num_users, beta=beta)

    @classmethod
    def explicit(cls, num_users, slot_expected_degrees, fill_beta=None):
        return cls(
            num_users=num_users,
            beta=fill_beta,
            slot_expected_degrees=tuple(slot_expected_degrees),
        )

    def expected_degree(self, slot_index):
        """G_m for the given slot, falling back to the constant fill."""
        if slot_index < 0:
            raise IndexError("slot index must be non-negative")
        if slot_index < len(self.slot_expected_degrees):
            return self.slot_expected_degrees[slot_index]
        if self.beta is None:
            raise IndexError(f"slot {slot_index} beyond explicit schedule")
        return self.beta

    def access_probability(self, slot_index):
        """p_m = G_m / N."""
        return self.expected_degree(slot_index) / self.num_users

    def thresholds(self, slot_lo, slot_hi):
        """uint64 compare thresholds for slots [slot_lo, slot_hi)."""
        return np.array(
            [threshold_u64(self.access_probability(m)) for m in range(slot_lo, slot_hi)],
            dtype=np.uint64,
        )


@dataclass(frozen=True)
class IrregularDistribution:
    """User degree distribution Lambda as (degree, probability) pairs."""

    pairs: tuple

    def __post_init__(self):
        pairs = tuple((int(d), float(p)) for d, p in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        degrees = [d for d, _ in pairs]
        if len(set(degrees)) != len(degrees):
            raise ValueError("degrees must be distinct")
        if any(d < 1 for d in degrees):
            raise ValueError("degrees must be positive integers")
        if any(not 0.0 <= p <= 1.0 for _, p in pairs):
            raise ValueError("probabilities must lie in [0, 1]")
        total = math.fsum(p for _, p in pairs)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {total}, not 1")

    @property
    def degrees(self):
        return np.array([d for d, _ in self.pairs], dtype=np.int64)

    @property
    def probabilities(self):
        return np.array([p for _, p in self.pairs], dtype=np.float64)

    def mean_degree(self):
        """Lambda'(1), the average number of transmissions per user."""
        return float(np.dot(self.degrees, self.probabilities))


# Baseline from the framed-ALOHA literature: Lambda(x) = 0.5x^2 + 0.28x^3 + 0.22x^8.
IRREGULAR_BASELINE = IrregularDistribution(((2, 0.5), (3, 0.28), (8, 0.22)))


def slot_access_probability(expected_degree, num_users):
    """p_m = G_m / N. Errors when the probability would leave [0, 1]."""
    if num_users < 1:
        raise ValueError("num_users must be >= 1")
    if expected_degree < 0:
        raise ValueError("expected degree must be non-negative")
    if expected_degree > num_users:
        raise ValueError(
            f"G_m = {expected_degree} > N = {num_users} implies p > 1"
        )
    return expected_degree / num_users


def slot_degree_pmf(expected_degree, k):
    """Poisson slot-degree pmf: P(|s| = k) = G^k e^{-G} / k!."""
    if expected_degree < 0:
        raise ValueError("expected degree must be non-negative")
    if k < 0 or k != int(k):
        raise ValueError("k must be a non-negative integer")
    k = int(k)
    if expected_degree == 0.0:
        return 1.0 if k == 0 else 0.0
    # lgamma keeps this finite for large k where G^k and k! overflow.
    return math.exp(k * math.log(expected_degree) - expected_degree - math.lgamma(k + 1))


def user_transmits(user_index, slot_index, p_m, seed):
    """The access function f(s_m, u_n): does user n transmit in slot m?

    Pure in (seed, user_index, slot_index, p_m); marginally Bernoulli(p_m)
    across cells. Bit-exact with the batched round generation.
    """
    if not 0.0 <= p_m <= 1.0:
        raise ValueError(f"p_m = {p_m} outside [0, 1]")
    if user_index < 0 or slot_index < 0:
        raise ValueError("indices must be non-negative")
    if p_m >= 1.0:
        return True
    if p_m <= 0.0:
        return False
    return cell_hash(seed, user_index, slot_index) < int(threshold_u64(p_m))


def generate_round(schedule, num_slots, seed):
    """Sample the contention graph of one round under a schedule.

    Edge (n, m) exists iff user_transmits(n, m, p_m, seed); the kernel
    evaluates all N*M cells and the result is a pure function of
    (schedule, num_slots, seed).
    """
    if num_slots < 1:
        raise ValueError("num_slots must be >= 1")
    thresholds = schedule.thresholds(0, num_slots)
    users, slots = generate_hits(seed, 0, num_slots, schedule.num_users, thresholds)
    return build_graph(
        schedule.num_users, num_slots, zip(users.tolist(), slots.tolist())
    )


def generate_round_irregular(dist, num_users, num_slots, seed):
    """Framed-ALOHA baseline round: degrees from dist, slots without replacement.

    Each user draws a degree d from the distribution and transmits in d
    distinct slots chosen uniformly from the M-slot frame.
    """
    if num_slots < 1:
        raise ValueError("num_slots must be >= 1")
    if int(dist.degrees.max()) > num_slots:
        raise ValueError("a degree exceeds the frame length")
    rng = np.random.default_rng(seed)
    degrees = rng.choice(dist.degrees, size=num_users, p=dist.probabilities)
    edges = []
    for u in range(num_users):
        for m in rng.choice(num_slots, size=degrees[u], replace=False):
            edges.append((u, int(m)))
    return build_graph(num_users, num_slots, edges)
