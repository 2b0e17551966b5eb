"""Bipartite contention graphs and the SIC peeling decoder.

A contention round is a bipartite graph: users on one side, slots on the
other, an edge per transmission. Successive interference cancellation is
exactly iterative peeling on this graph: any slot of degree 1 yields its user,
and all other edges of that user are erased, possibly exposing new degree-1
slots. The resolved set is the unique maximal peelable set regardless of
processing order; `peel_oracle` certifies that by peeling in randomized order.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ContentionGraph:
    """Immutable bipartite user/slot graph; edges are (user, slot) pairs."""

    num_users: int
    num_slots: int
    edges: frozenset


@dataclass(frozen=True)
class PeelResult:
    """Outcome of peeling: who got resolved, by which slot, in which order."""

    resolved: frozenset
    iterations: int
    residual_edges: int
    resolution_order: tuple


def build_graph(num_users, num_slots, transmissions):
    """Construct a validated graph from (user, slot) transmission pairs.

    Out-of-range indices and duplicate pairs are construction errors: the
    Bernoulli access model transmits at most once per user per slot, so a
    duplicate always indicates a harness bug upstream.
    """
    if num_users < 0 or num_slots < 0:
        raise ValueError("num_users and num_slots must be non-negative")
    pairs = [(int(u), int(m)) for u, m in transmissions]
    for u, m in pairs:
        if not (0 <= u < num_users):
            raise ValueError(f"user index {u} out of range [0, {num_users})")
        if not (0 <= m < num_slots):
            raise ValueError(f"slot index {m} out of range [0, {num_slots})")
    edges = frozenset(pairs)
    if len(edges) != len(pairs):
        dup = Counter(pairs).most_common(1)[0][0]
        raise ValueError(f"duplicate transmission {dup}")
    return ContentionGraph(num_users, num_slots, edges)


def _adjacency(graph):
    """Mutable slot->user sets and user->slot lists for a peeling pass."""
    slot_users = [set() for _ in range(graph.num_slots)]
    user_slots = [[] for _ in range(graph.num_users)]
    for u, m in graph.edges:
        slot_users[m].add(u)
        user_slots[u].append(m)
    return slot_users, user_slots


def _erase_user(u, user_slots, slot_users, slot_deg, newly_uncovered):
    """Remove all edges of a resolved user; collect slots that drop to degree 1."""
    for m2 in user_slots[u]:
        s = slot_users[m2]
        if u in s:
            s.discard(u)
            slot_deg[m2] -= 1
            if slot_deg[m2] == 1:
                newly_uncovered.append(m2)
    user_slots[u] = []


def peel(graph):
    """Peel to completion, deterministically.

    Degree-1 slots are processed in sweeps: one iteration consumes the entire
    current queue (lowest slot index first), and any slots uncovered during the
    sweep wait for the next one. This makes the iteration counter comparable
    to the density-evolution iteration index.
    """
    slot_users, user_slots = _adjacency(graph)
    slot_deg = [len(s) for s in slot_users]
    resolved = set()
    order = []
    queue = sorted(m for m, d in enumerate(slot_deg) if d == 1)
    iterations = 0
    while queue:
        iterations += 1
        uncovered = []
        for m in queue:
            if slot_deg[m] != 1:
                continue  # emptied earlier in this sweep
            (u,) = slot_users[m]
            resolved.add(u)
            order.append((u, m))
            _erase_user(u, user_slots, slot_users, slot_deg, uncovered)
        queue = sorted(set(uncovered))
    return PeelResult(
        resolved=frozenset(resolved),
        iterations=iterations,
        residual_edges=sum(slot_deg),
        resolution_order=tuple(order),
    )


def peel_oracle(graph, seed):
    """Reference peeler: identical semantics, randomized processing order.

    At every step one degree-1 slot is chosen uniformly at random among those
    currently available. Used to certify that the resolved set is invariant
    to processing order; `iterations` counts individual resolution steps here,
    since randomized scheduling has no sweep structure.
    """
    rng = random.Random(seed)
    slot_users, user_slots = _adjacency(graph)
    slot_deg = [len(s) for s in slot_users]
    resolved = set()
    order = []
    ready = [m for m, d in enumerate(slot_deg) if d == 1]
    while ready:
        i = rng.randrange(len(ready))
        ready[i], ready[-1] = ready[-1], ready[i]
        m = ready.pop()
        if slot_deg[m] != 1:
            continue  # went stale after an earlier erasure
        (u,) = slot_users[m]
        resolved.add(u)
        order.append((u, m))
        _erase_user(u, user_slots, slot_users, slot_deg, ready)
    return PeelResult(
        resolved=frozenset(resolved),
        iterations=len(order),
        residual_edges=sum(slot_deg),
        resolution_order=tuple(order),
    )


def degree_histograms(graph):
    """(user_degree_histogram, slot_degree_histogram) as degree->count dicts.

    Both weighted sums equal |edges|; users or slots touching no edge show up
    at degree 0.
    """
    user_deg = Counter()
    slot_deg = Counter()
    for u, m in graph.edges:
        user_deg[u] += 1
        slot_deg[m] += 1
    user_hist = Counter(user_deg.values())
    slot_hist = Counter(slot_deg.values())
    user_hist[0] = graph.num_users - len(user_deg)
    slot_hist[0] = graph.num_slots - len(slot_deg)
    return (
        {d: c for d, c in sorted(user_hist.items()) if c > 0},
        {d: c for d, c in sorted(slot_hist.items()) if c > 0},
    )


class IncrementalPeeler:
    """Peeling that resumes as slots arrive, for frameless rounds.

    Slots are appended one at a time; edges to already-resolved users are
    cancelled on arrival (the receiver knows those schedules and subtracts
    them immediately), and peeling settles after each append. Confluence of
    peeling makes the state after m appends identical to a from-scratch peel
    of the first m slots.
    """

    def __init__(self, num_users):
        self.num_users = num_users
        self.user_slots = [[] for _ in range(num_users)]
        self.slot_users = []
        self.slot_deg = []
        self.resolved = np.zeros(num_users, dtype=bool)
        self.num_resolved = 0

    @property
    def num_slots(self):
        return len(self.slot_users)

    def resolved_set(self):
        return frozenset(int(u) for u in np.flatnonzero(self.resolved))

    def add_slot(self, users):
        """Append one slot with the given transmitting users; settle peeling."""
        m = len(self.slot_users)
        live = [u for u in users if not self.resolved[u]]
        self.slot_users.append(set(live))
        self.slot_deg.append(len(live))
        for u in live:
            self.user_slots[u].append(m)
        if len(live) == 1:
            self._settle([m])
        return m

    def _settle(self, queue):
        while queue:
            m = queue.pop()
            if self.slot_deg[m] != 1:
                continue
            (u,) = self.slot_users[m]
            self.resolved[u] = True
            self.num_resolved += 1
            for m2 in self.user_slots[u]:
                s = self.slot_users[m2]
                if u in s:
                    s.discard(u)
                    self.slot_deg[m2] -= 1
                    if self.slot_deg[m2] == 1:
                        queue.append(m2)
            self.user_slots[u] = []
