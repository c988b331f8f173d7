"""Multi-frame Monte Carlo simulation of a k-class IRSA network."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .degree_dist import sample_degrees
from .errors import LengthMismatch, LoadExceedsPopulation
from .scheduling import (
    ClassState,
    DelayStats,
    Policy,
    record_outcome,
    select_random,
    select_round_robin,
)
from .sic_core import SlotDegreeHistogram, build_frame, peel_mask, round_half_up

BLOCK_FRAMES = 1000
Z95 = 1.959963984540054

CHANNELS = ("sic", "collision_free")


@dataclass(frozen=True)
class NetworkSpec:
    """k-class network: class populations, frame size and per-class distributions."""

    populations: tuple
    frame_size: int
    distributions: tuple

    def __post_init__(self):
        object.__setattr__(self, "populations", tuple(int(n) for n in self.populations))
        object.__setattr__(self, "distributions", tuple(self.distributions))
        if not self.populations:
            raise ValueError("network needs at least one class")
        if len(self.populations) != len(self.distributions):
            raise LengthMismatch("one distribution per class required")
        if min(self.populations) < 1 or self.frame_size < 1:
            raise ValueError("populations and frame size must be >= 1")

    @property
    def k(self) -> int:
        return len(self.populations)

    @property
    def total_population(self) -> int:
        return sum(self.populations)


@dataclass(frozen=True)
class LoadVector:
    loads: tuple

    def __post_init__(self):
        object.__setattr__(self, "loads", tuple(float(g) for g in self.loads))
        if any(g < 0 for g in self.loads):
            raise ValueError("loads must be nonnegative")

    @property
    def total(self) -> float:
        return sum(self.loads)

    def active_counts(self, frame_size: int) -> list[int]:
        """``L_i = round(M * G_i)``, rounding half up."""
        return [round_half_up(frame_size * g) for g in self.loads]


@dataclass(frozen=True)
class FrameResult:
    successes: tuple
    activated: tuple


@dataclass
class SimReport:
    throughput: tuple
    throughput_ci: tuple
    total_throughput: float
    total_ci: float
    offered_load: tuple
    loss_rate: tuple
    delay: DelayStats
    frames: int
    seed: int
    frame_size: int
    slot_counts: tuple = field(repr=False)

    @property
    def slot_histogram(self) -> SlotDegreeHistogram:
        counts = np.asarray(self.slot_counts, dtype=float)
        return SlotDegreeHistogram(counts / counts.sum() if counts.sum() else counts, self.frame_size)

    def as_dict(self) -> dict:
        return {
            "throughput": list(self.throughput),
            "throughput_ci": list(self.throughput_ci),
            "total_throughput": self.total_throughput,
            "total_ci": self.total_ci,
            "offered_load": list(self.offered_load),
            "loss_rate": list(self.loss_rate),
            "delay_avg": self.delay.avg,
            "delay_max": self.delay.worst,
            "delay_samples": list(self.delay.counts),
            "frames": self.frames,
            "seed": self.seed,
            "slot_counts": list(self.slot_counts),
        }


@dataclass(frozen=True)
class SweepPoint:
    total_load: float
    report: SimReport


def _check_load(spec: NetworkSpec, load: LoadVector) -> list[int]:
    if len(load.loads) != spec.k:
        raise LengthMismatch(f"{len(load.loads)} loads for {spec.k} classes")
    counts = load.active_counts(spec.frame_size)
    for i, (L, N) in enumerate(zip(counts, spec.populations)):
        if L > N:
            raise LoadExceedsPopulation(f"class {i}: L = {L} active users > N = {N}")
    return counts


def run_frame(
    spec: NetworkSpec,
    load: LoadVector,
    states: Sequence[ClassState],
    policy: Policy,
    rng: np.random.Generator,
    frame_index: int = 0,
    stats: DelayStats | None = None,
    channel: str = "sic",
    slot_counts: np.ndarray | None = None,
) -> FrameResult:
    """Simulate one frame and update the schedulers' delay bookkeeping.

    ``channel="collision_free"`` decodes every active user; it stands in for
    the large-network regime where the loss probability vanishes.
    ``slot_counts``, when given, accumulates the slot occupancy histogram.
    """
    counts = _check_load(spec, load)
    policy = Policy(policy)
    if stats is None:
        stats = DelayStats(spec.k)
    active = []
    for state, L in zip(states, counts):
        if policy == Policy.RANDOM:
            active.append(select_random(state, L, rng))
        else:
            active.append(select_round_robin(state, L))

    if channel == "sic":
        degrees = np.concatenate(
            [sample_degrees(d, rng, L) for d, L in zip(spec.distributions, counts)]
        )
        frame = build_frame(degrees, spec.frame_size, rng)
        mask, _, _ = peel_mask(frame)
        if slot_counts is not None:
            occ = np.bincount(np.bincount(frame.slots, minlength=spec.frame_size))
            slot_counts[: len(occ)] += occ
    elif channel == "collision_free":
        mask = np.ones(sum(counts), dtype=bool)
    else:
        raise ValueError(f"unknown channel {channel!r}")

    successes = []
    start = 0
    for state, users in zip(states, active):
        decoded = users[mask[start : start + len(users)]]
        start += len(users)
        record_outcome(state, users, decoded, frame_index, stats, policy)
        successes.append(len(decoded))
    return FrameResult(tuple(successes), tuple(counts))


def block_rng(seed: int, block: int) -> np.random.Generator:
    """Independent stream for frames ``block*BLOCK_FRAMES ...``; keyed by (seed, block)."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))


def child_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence(seed, spawn_key=(0xC0FFEE, index)).generate_state(1, np.uint64)[0])


def run_simulation(
    spec: NetworkSpec,
    load: LoadVector,
    policy: Policy | str = Policy.RANDOM,
    frames: int = 10_000,
    seed: int = 0,
    channel: str = "sic",
) -> SimReport:
    """Average per-frame successes over ``frames`` frames.

    Identical arguments give identical reports: frames draw from per-block
    streams derived from ``seed``.
    """
    if frames < 1:
        raise ValueError("frames must be >= 1")
    counts = _check_load(spec, load)
    M = spec.frame_size
    states = [ClassState(i, n) for i, n in enumerate(spec.populations)]
    stats = DelayStats(spec.k)
    slot_counts = np.zeros(sum(counts) + 1, dtype=np.int64)
    s_sum = np.zeros(spec.k, dtype=np.int64)
    s_sq = np.zeros(spec.k, dtype=np.int64)
    tot_sum = tot_sq = 0
    rng = None
    for f in range(frames):
        if f % BLOCK_FRAMES == 0:
            rng = block_rng(seed, f // BLOCK_FRAMES)
        res = run_frame(spec, load, states, policy, rng, f, stats, channel, slot_counts)
        s = np.array(res.successes, dtype=np.int64)
        s_sum += s
        s_sq += s * s
        tot = int(s.sum())
        tot_sum += tot
        tot_sq += tot * tot

    def ci(total, total_sq):
        if frames < 2:
            return math.nan
        var = max(total_sq - total * total / frames, 0.0) / (frames - 1)
        return Z95 * math.sqrt(var / frames) / M

    throughput = tuple(float(x) / frames / M for x in s_sum)
    offered = tuple(L / M for L in counts)
    return SimReport(
        throughput=throughput,
        throughput_ci=tuple(ci(int(a), int(b)) for a, b in zip(s_sum, s_sq)),
        total_throughput=tot_sum / frames / M,
        total_ci=ci(tot_sum, tot_sq),
        offered_load=offered,
        loss_rate=tuple(1.0 - t / g if g > 0 else 0.0 for t, g in zip(throughput, offered)),
        delay=stats,
        frames=frames,
        seed=seed,
        frame_size=M,
        slot_counts=tuple(int(c) for c in slot_counts),
    )


def _sweep_point(args):
    spec, load, policy, frames, seed, channel = args
    return run_simulation(spec, load, policy, frames, seed, channel)


def sweep_load(
    spec: NetworkSpec,
    direction: Sequence[float],
    grid: Sequence[float],
    policy: Policy | str = Policy.RANDOM,
    frames: int = 10_000,
    seed: int = 0,
    workers: int = 1,
    channel: str = "sic",
) -> list[SweepPoint]:
    """Throughput curve along a load direction.

    ``direction`` is rescaled to sum to one, so grid values are total loads.
    Each grid point gets its own seed derived from ``seed`` and its index;
    the result does not depend on ``workers``.
    """
    grid = [float(g) for g in grid]
    if not grid:
        raise ValueError("empty load grid")
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError("load grid must be nondecreasing")
    direction = np.asarray(direction, dtype=float)
    if len(direction) != spec.k:
        raise LengthMismatch(f"direction has {len(direction)} entries for {spec.k} classes")
    if direction.sum() <= 0 or (direction < 0).any():
        raise ValueError("direction must be nonnegative with positive sum")
    direction = direction / direction.sum()
    jobs = [
        (spec, LoadVector(g * direction), policy, frames, child_seed(seed, i), channel)
        for i, g in enumerate(grid)
    ]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            reports = list(pool.map(_sweep_point, jobs))
    else:
        reports = [_sweep_point(job) for job in jobs]
    return [SweepPoint(g, r) for g, r in zip(grid, reports)]


def peak(curve: Sequence[SweepPoint]) -> SweepPoint:
    """Grid point with the largest total throughput (first one on ties)."""
    return max(curve, key=lambda p: p.report.total_throughput)
