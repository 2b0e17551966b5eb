"""And-or tree density evolution for SIC, plus the closed-form design formulas.

In the asymptotic limit the peeling decoder is tracked by the edge-survival
recursion: q_i is the probability an edge incident to a user survives
iteration i, r_i the same on the slot side. With M = (1+eps)N slots of
expected degrees G_m,

    r_i     = 1 - (1/(G*M)) * sum_m G_m * exp(-G_m * q_i)
    q_{i+1} = exp(-(1+eps) * G * (1 - r_i)),    q_0 = 1,

where G is the average expected slot degree. For a constant-beta schedule the
slot side collapses to r_i = 1 - exp(-beta * q_i) and the slot count cancels
entirely. The resolution probability is P_R = 1 - q at the fixed point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 10_000


@dataclass(frozen=True)
class EvolutionResult:
    """Trace and fixed point of the recursion."""

    q_trace: tuple
    r_trace: tuple
    resolution_probability: float
    converged: bool
    iterations_used: int


def _check_common(epsilon, max_iter, tol):
    if epsilon <= -1.0:
        raise ValueError("epsilon must exceed -1 (M must be positive)")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if tol <= 0.0:
        raise ValueError("tol must be positive")


def evolve(slot_degrees=None, *, beta=None, epsilon, max_iter=DEFAULT_MAX_ITER, tol=DEFAULT_TOL):
    """Run the recursion for an explicit G_m sequence or a constant beta.

    Exactly one of slot_degrees / beta must be given. The constant-beta form
    needs no slot count: with all G_m = beta the average degree equals beta
    and M cancels out of the slot-side update. Non-convergence at max_iter is
    reported through the converged flag, not an error, since the slow region
    near the phase transition is itself of interest.
    """
    _check_common(epsilon, max_iter, tol)
    if (slot_degrees is None) == (beta is None):
        raise ValueError("pass exactly one of slot_degrees or beta")

    if beta is not None:
        if beta < 0:
            raise ValueError("beta must be non-negative")
        return _evolve_constant(float(beta), epsilon, max_iter, tol)

    gm = np.asarray(slot_degrees, dtype=np.float64)
    if gm.size == 0:
        raise ValueError("slot_degrees must be non-empty")
    if np.any(gm < 0):
        raise ValueError("slot degrees must be non-negative")
    g_avg = float(gm.mean())
    if g_avg == 0.0:
        return _no_transmissions()
    q = 1.0
    q_trace = [q]
    r_trace = []
    converged = False
    scale = (1.0 + epsilon) * g_avg
    denom = g_avg * gm.size
    for _ in range(max_iter):
        survive = float(np.dot(gm, np.exp(-gm * q))) / denom
        r = 1.0 - survive
        q_next = math.exp(-scale * survive)
        r_trace.append(r)
        q_trace.append(q_next)
        if abs(q_next - q) < tol:
            q = q_next
            converged = True
            break
        q = q_next
    return EvolutionResult(
        q_trace=tuple(q_trace),
        r_trace=tuple(r_trace),
        resolution_probability=1.0 - q_trace[-1],
        converged=converged,
        iterations_used=len(r_trace),
    )


def _no_transmissions():
    # G = 0: the slot-side update is vacuous and nothing ever resolves.
    return EvolutionResult(
        q_trace=(1.0,),
        r_trace=(),
        resolution_probability=0.0,
        converged=True,
        iterations_used=0,
    )


def _evolve_constant(beta, epsilon, max_iter, tol):
    if beta == 0.0:
        return _no_transmissions()
    q = 1.0
    q_trace = [q]
    r_trace = []
    converged = False
    scale = (1.0 + epsilon) * beta
    for _ in range(max_iter):
        survive = math.exp(-beta * q)
        r_trace.append(1.0 - survive)
        q_next = math.exp(-scale * survive)
        q_trace.append(q_next)
        if abs(q_next - q) < tol:
            q = q_next
            converged = True
            break
        q = q_next
    return EvolutionResult(
        q_trace=tuple(q_trace),
        r_trace=tuple(r_trace),
        resolution_probability=1.0 - q_trace[-1],
        converged=converged,
        iterations_used=len(r_trace),
    )


def _evolve_constant_grid(betas, epsilon, max_iter=DEFAULT_MAX_ITER, tol=DEFAULT_TOL):
    """Vectorized fixed points of the constant-beta recursion over a beta grid.

    Converged entries are frozen while the rest keep iterating, so a whole
    optimizer grid costs one array loop. Returns (resolution_probability,
    converged) arrays aligned with betas.
    """
    _check_common(epsilon, max_iter, tol)
    b = np.asarray(betas, dtype=np.float64)
    if np.any(b < 0):
        raise ValueError("beta must be non-negative")
    q = np.ones_like(b)
    active = b > 0.0
    scale = (1.0 + epsilon) * b
    for _ in range(max_iter):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        q_act = q[idx]
        q_next = np.exp(-scale[idx] * np.exp(-b[idx] * q_act))
        q[idx] = q_next
        active[idx[np.abs(q_next - q_act) < tol]] = False
    p_r = 1.0 - q
    p_r[b == 0.0] = 0.0
    return p_r, ~active


def resolution_upper_bound(g_avg, epsilon):
    """P_UB = 1 - exp(-(1+eps)*G): users idle for a whole round are lost."""
    if g_avg < 0:
        raise ValueError("average degree must be non-negative")
    if epsilon <= -1.0:
        raise ValueError("epsilon must exceed -1")
    return 1.0 - math.exp(-(1.0 + epsilon) * g_avg)


def min_degree_for_target(delta, epsilon):
    """Minimum average slot degree G so that P_UB reaches 1 - delta."""
    if not 0.0 < delta <= 1.0:
        raise ValueError("delta must lie in (0, 1]")
    if epsilon <= -1.0:
        raise ValueError("epsilon must exceed -1")
    return max(0.0, -math.log(delta) / (1.0 + epsilon))


def throughput(resolution_probability, epsilon):
    """T = P_R / (M/N): resolved users per slot spent."""
    if not 0.0 <= resolution_probability <= 1.0:
        raise ValueError("resolution probability must lie in [0, 1]")
    if epsilon <= -1.0:
        raise ValueError("epsilon must exceed -1")
    return resolution_probability / (1.0 + epsilon)


def classical_sa_throughput(g):
    """Slotted-ALOHA baseline T = G * exp(-G); peaks at 1/e for G = 1."""
    if g < 0:
        raise ValueError("load must be non-negative")
    return g * math.exp(-g)
