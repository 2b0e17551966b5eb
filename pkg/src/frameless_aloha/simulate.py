"""Monte Carlo engine for contention rounds.

Two round shapes: fixed-M frames (the optimization and baseline-comparison
setting) and frameless rounds that append slots until the fraction of
resolved users reaches a termination threshold. Peeling runs incrementally
as slots arrive, which by confluence of the peeling decoder is equivalent to
re-peeling the whole prefix from scratch after every slot.

Every Monte Carlo run derives its own seed from (master seed, run index), so
runs are independent, individually replayable, and the aggregate depends only
on the run-indexed outcomes, never on execution interleaving.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .access import AccessSchedule, IrregularDistribution
from .graph import IncrementalPeeler
from .prng import derive_seed, generate_hits

_BLOCK_SLOTS = 512


@dataclass(frozen=True)
class FixedM:
    """Frame of exactly num_slots slots."""

    num_slots: int


@dataclass(frozen=True)
class Frameless:
    """Slots appended until resolution_fraction >= threshold.

    max_slots caps a round whose threshold is unattainable at the configured
    access; None means 4N, far beyond the useful M/N range.
    """

    threshold: float
    max_slots: int | None = None


@dataclass(frozen=True)
class ConstantBeta:
    beta: float


@dataclass(frozen=True)
class PerSlot:
    slot_expected_degrees: tuple

    def __post_init__(self):
        degrees = tuple(float(g) for g in self.slot_expected_degrees)
        object.__setattr__(self, "slot_expected_degrees", degrees)


@dataclass(frozen=True)
class Irregular:
    distribution: IrregularDistribution


@dataclass(frozen=True)
class RoundConfig:
    num_users: int
    mode: FixedM | Frameless
    access: ConstantBeta | PerSlot | Irregular
    seed: int
    record_trace: bool = False

    def __post_init__(self):
        n = self.num_users
        if n < 1:
            raise ValueError("num_users must be >= 1")
        mode, access = self.mode, self.access
        if isinstance(mode, FixedM):
            if mode.num_slots < 1:
                raise ValueError("num_slots must be >= 1")
        elif isinstance(mode, Frameless):
            if not 0.0 < mode.threshold <= 1.0:
                raise ValueError("threshold must lie in (0, 1]")
            if mode.max_slots is not None and mode.max_slots < 1:
                raise ValueError("max_slots must be >= 1")
            if isinstance(access, Irregular):
                raise ValueError("irregular access requires fixed_M mode")
        else:
            raise TypeError("mode must be FixedM or Frameless")
        if isinstance(access, ConstantBeta):
            if not 0.0 <= access.beta <= n:
                raise ValueError(f"beta {access.beta} outside [0, N]")
        elif isinstance(access, PerSlot):
            degrees = access.slot_expected_degrees
            if not degrees:
                raise ValueError("per-slot schedule must be non-empty")
            if any(not 0.0 <= g <= n for g in degrees):
                raise ValueError("slot degrees must lie in [0, N]")
            if len(degrees) < self.required_slots():
                raise ValueError("per-slot schedule shorter than the round")
        elif isinstance(access, Irregular):
            if int(access.distribution.degrees.max()) > mode.num_slots:
                raise ValueError("a user degree exceeds the frame length")
        else:
            raise TypeError("access must be ConstantBeta, PerSlot or Irregular")

    def required_slots(self):
        """Slots the round may consume: M, or the frameless cap."""
        if isinstance(self.mode, FixedM):
            return self.mode.num_slots
        if self.mode.max_slots is not None:
            return self.mode.max_slots
        return 4 * self.num_users


@dataclass(frozen=True)
class RoundOutcome:
    slots_used: int
    resolved_count: int
    resolution_fraction: float
    realized_throughput: float
    reached_threshold: bool
    per_slot_resolution_trace: tuple | None = None


@dataclass(frozen=True)
class AggregateStats:
    runs: int
    mean_slots_used: float
    sd_slots_used: float
    mean_resolution_fraction: float
    sd_resolution_fraction: float
    mean_realized_throughput: float
    sd_realized_throughput: float
    fraction_reached_threshold: float


def _schedule_for(config):
    if isinstance(config.access, ConstantBeta):
        return AccessSchedule.constant(config.num_users, config.access.beta)
    return AccessSchedule.explicit(config.num_users, config.access.slot_expected_degrees)


def _bernoulli_blocks(schedule, seed, num_slots):
    """Yield (slot_index, users_array) in slot order, generated block-wise.

    The cell hash is counter-based, so the split into blocks has no effect on
    the generated transmissions.
    """
    n = schedule.num_users
    for lo in range(0, num_slots, _BLOCK_SLOTS):
        hi = min(lo + _BLOCK_SLOTS, num_slots)
        thresholds = schedule.thresholds(lo, hi)
        users, slots = generate_hits(seed, lo, hi, n, thresholds)
        bounds = np.searchsorted(slots, np.arange(lo, hi + 1))
        for m in range(lo, hi):
            yield m, users[bounds[m - lo] : bounds[m - lo + 1]]


def _irregular_slots(config):
    """Per-slot user lists for the framed irregular baseline."""
    num_slots = config.mode.num_slots
    dist = config.access.distribution
    rng = np.random.default_rng(config.seed)
    degrees = rng.choice(dist.degrees, size=config.num_users, p=dist.probabilities)
    slot_users = [[] for _ in range(num_slots)]
    for u in range(config.num_users):
        for m in rng.choice(num_slots, size=degrees[u], replace=False):
            slot_users[m].append(u)
    return slot_users


def run_round_fixed(config):
    """Simulate one fixed-M round: generate all M slots, peel, report."""
    if not isinstance(config.mode, FixedM):
        raise ValueError("run_round_fixed needs fixed_M mode")
    num_slots = config.mode.num_slots
    peeler = IncrementalPeeler(config.num_users)
    trace = [] if config.record_trace else None
    if isinstance(config.access, Irregular):
        slot_iter = enumerate(_irregular_slots(config))
    else:
        slot_iter = _bernoulli_blocks(_schedule_for(config), config.seed, num_slots)
    for _, users in slot_iter:
        peeler.add_slot(users)
        if trace is not None:
            trace.append(peeler.num_resolved)
    resolved = peeler.num_resolved
    return RoundOutcome(
        slots_used=num_slots,
        resolved_count=resolved,
        resolution_fraction=resolved / config.num_users,
        realized_throughput=resolved / num_slots,
        reached_threshold=True,
        per_slot_resolution_trace=None if trace is None else tuple(trace),
    )


def run_round_frameless(config):
    """Simulate one frameless round.

    Slots are appended one at a time; after each slot settles, the round
    stops at the first slot where resolution_fraction >= threshold, or
    unsuccessfully once max_slots have been spent.
    """
    if not isinstance(config.mode, Frameless):
        raise ValueError("run_round_frameless needs frameless mode")
    n = config.num_users
    threshold = config.mode.threshold
    cap = config.required_slots()
    peeler = IncrementalPeeler(n)
    trace = [] if config.record_trace else None
    reached = False
    slots_used = 0
    for m, users in _bernoulli_blocks(_schedule_for(config), config.seed, cap):
        peeler.add_slot(users)
        slots_used = m + 1
        if trace is not None:
            trace.append(peeler.num_resolved)
        if peeler.num_resolved / n >= threshold:
            reached = True
            break
    resolved = peeler.num_resolved
    return RoundOutcome(
        slots_used=slots_used,
        resolved_count=resolved,
        resolution_fraction=resolved / n,
        realized_throughput=resolved / slots_used if slots_used else 0.0,
        reached_threshold=reached,
        per_slot_resolution_trace=None if trace is None else tuple(trace),
    )


def run_multi_round(rounds, template, seed):
    """Independent back-to-back frameless rounds with derived per-round seeds.

    Each round starts with a fresh batch of N users; unresolved users are
    dropped, not carried over. Round r runs under derive_seed(seed, r), so a
    single round can be replayed without regenerating the whole sequence.
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    if not isinstance(template.mode, Frameless):
        raise ValueError("run_multi_round needs a frameless template")
    return [
        run_round_frameless(replace(template, seed=derive_seed(seed, r)))
        for r in range(rounds)
    ]


def aggregate_outcomes(outcomes):
    """Reduce run-indexed outcomes to means and sample standard deviations.

    The reduction consumes outcomes by run index, so any execution order or
    worker count that fills the same run slots yields identical stats.
    """
    if not outcomes:
        raise ValueError("need at least one outcome")
    runs = len(outcomes)
    slots = np.array([o.slots_used for o in outcomes], dtype=np.float64)
    fractions = np.array([o.resolution_fraction for o in outcomes], dtype=np.float64)
    throughputs = np.array([o.realized_throughput for o in outcomes], dtype=np.float64)
    reached = np.array([o.reached_threshold for o in outcomes], dtype=np.float64)

    def sd(values):
        return float(np.std(values, ddof=1)) if runs > 1 else 0.0

    return AggregateStats(
        runs=runs,
        mean_slots_used=float(slots.mean()),
        sd_slots_used=sd(slots),
        mean_resolution_fraction=float(fractions.mean()),
        sd_resolution_fraction=sd(fractions),
        mean_realized_throughput=float(throughputs.mean()),
        sd_realized_throughput=sd(throughputs),
        fraction_reached_threshold=float(reached.mean()),
    )


def monte_carlo(config, runs):
    """Aggregate statistics over independent runs with derived per-run seeds."""
    if runs < 1:
        raise ValueError("runs must be >= 1")
    if isinstance(config.mode, Frameless):
        outcomes = run_multi_round(runs, config, config.seed)
    else:
        outcomes = [
            run_round_fixed(replace(config, seed=derive_seed(config.seed, r)))
            for r in range(runs)
        ]
    return aggregate_outcomes(outcomes)
