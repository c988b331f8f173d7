"""Asymptotic threshold, dual networks, capacity regions and activation plans."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .degree_dist import (
    DegreeDistribution,
    OPTIMAL_DMAX8,
    edge_perspective,
    mean_degree,
    mix_distributions,
)
from .errors import (
    ExceedsThreshold,
    LengthMismatch,
    NotTwoDimensional,
    OutsideRegion,
    ZeroTotalLoad,
)
from .sic_core import round_half_up
from .sim_engine import LoadVector, NetworkSpec

RESOLVED = 1e-6
ASYMPTOTIC_THRESHOLD_DMAX8 = 0.938


def de_trace(d: DegreeDistribution, G: float, max_iters: int = 100_000, tol: float = 1e-12) -> list[float]:
    """Unresolved-replica probability per density-evolution iteration.

    ``x <- lambda(1 - exp(-G * Lambda'(1) * x))`` from ``x = 1``; the
    returned list starts with the initial value.
    """
    lam = edge_perspective(d)
    mean = mean_degree(d)
    x = 1.0
    trace = [x]
    for _ in range(max_iters):
        x_new = float(lam(1.0 - math.exp(-G * mean * x)))
        trace.append(x_new)
        if abs(x_new - x) < tol:
            break
        x = x_new
    return trace


def de_iterate(d: DegreeDistribution, G: float, max_iters: int = 100_000, tol: float = 1e-12) -> float:
    return de_trace(d, G, max_iters, tol)[-1]


def de_threshold(d: DegreeDistribution, tol: float = 1e-4, max_iters: int = 100_000) -> float:
    """Largest load in [0, 1] at which density evolution drives x below 1e-6.

    Bisection; the result is the last load known to resolve (0.0 when none
    does, e.g. for degree-1 users).
    """
    lo, hi = 0.0, 1.0
    if de_iterate(d, hi, max_iters) < RESOLVED:
        return hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if de_iterate(d, mid, max_iters) < RESOLVED:
            lo = mid
        else:
            hi = mid
    return lo


@dataclass(frozen=True)
class DualNetwork:
    population: int
    distribution: DegreeDistribution
    load: float | None = None


def make_dual(spec: NetworkSpec, load: LoadVector) -> DualNetwork:
    """Single-class network with the same population and the load-weighted mix."""
    if len(load.loads) != spec.k:
        raise LengthMismatch(f"{len(load.loads)} loads for {spec.k} classes")
    if load.total <= 0:
        raise ZeroTotalLoad("total load must be positive")
    mixed = mix_distributions(load.loads, spec.distributions)
    return DualNetwork(spec.total_population, mixed, load.total)


@dataclass(frozen=True)
class CapacityRegion:
    """Polytope ``{T >= 0, T_i <= caps[i], sum(T) <= sum_cap}``."""

    caps: tuple
    sum_cap: float
    t_star: float
    outer_bound: bool

    @property
    def k(self) -> int:
        return len(self.caps)


def capacity_region(spec: NetworkSpec, t_star: float) -> CapacityRegion:
    """Caps ``min(T*, N_i/M)`` and ``min(T*, sum N_i/M)``.

    With ``t_star = 1`` this is the generic outer bound that holds for any
    network size.
    """
    if not 0 < t_star <= 1:
        raise ValueError(f"t_star must be in (0, 1], got {t_star}")
    M = spec.frame_size
    caps = tuple(min(t_star, n / M) for n in spec.populations)
    return CapacityRegion(caps, min(t_star, spec.total_population / M), t_star, t_star == 1)


def contains(region: CapacityRegion, t: Sequence[float], atol: float = 1e-12) -> bool:
    if len(t) != region.k:
        raise LengthMismatch(f"tuple of length {len(t)} for a {region.k}-class region")
    if any(x < -atol for x in t):
        return False
    if any(x > c + atol for x, c in zip(t, region.caps)):
        return False
    return math.fsum(t) <= region.sum_cap + atol


def boundary_2d(region: CapacityRegion, resolution: int = 0) -> list[tuple[float, float]]:
    """Counter-clockwise polygon vertices starting at the origin.

    ``resolution`` extra points are interpolated on every edge (plotting).
    """
    if region.k != 2:
        raise NotTwoDimensional(f"region has {region.k} classes")
    c1, c2 = region.caps
    s = region.sum_cap
    verts = [(0.0, 0.0), (min(c1, s), 0.0)]
    if c1 < s:
        verts.append((c1, min(c2, s - c1)))
    if c2 < s and c1 + c2 > s:
        verts.append((s - c2, c2))
    verts.append((0.0, min(c2, s)))
    unique = []
    for v in verts:
        if not unique or not np.allclose(v, unique[-1], atol=1e-12):
            unique.append(v)
    if resolution <= 0:
        return unique
    dense = []
    closed = unique + [unique[0]]
    for a, b in zip(closed[:-1], closed[1:]):
        for frac in np.linspace(0.0, 1.0, resolution + 2)[:-1]:
            dense.append((a[0] + frac * (b[0] - a[0]), a[1] + frac * (b[1] - a[1])))
    return dense


@dataclass(frozen=True)
class ActivationPlan:
    counts: tuple
    distribution: DegreeDistribution
    load: LoadVector
    shortfall: tuple

    def network(self, spec: NetworkSpec) -> NetworkSpec:
        """``spec`` with every class switched to the plan's distribution."""
        return NetworkSpec(spec.populations, spec.frame_size, [self.distribution] * spec.k)


def achievability_plan(
    t: Sequence[float],
    region: CapacityRegion,
    spec: NetworkSpec,
    g_star: float = ASYMPTOTIC_THRESHOLD_DMAX8,
    distribution: DegreeDistribution = OPTIMAL_DMAX8,
) -> ActivationPlan:
    """Activate ``round(M * t_i)`` users per class, all with the optimal distribution.

    ``shortfall`` is the per-class gap ``t_i - L_i / M`` left by rounding.
    """
    if not contains(region, t):
        raise OutsideRegion(f"{tuple(t)} is outside the capacity region")
    if math.fsum(t) > g_star + 1e-12:
        raise ExceedsThreshold(f"sum {math.fsum(t)} exceeds threshold {g_star}")
    M = spec.frame_size
    counts = tuple(round_half_up(M * x) for x in t)
    return ActivationPlan(
        counts=counts,
        distribution=distribution,
        load=LoadVector([L / M for L in counts]),
        shortfall=tuple(x - L / M for x, L in zip(t, counts)),
    )
