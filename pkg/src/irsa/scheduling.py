"""Active-user selection policies and per-user delay accounting.

User indices are 0-based within a class. Delays are measured in frames; a
user decoded in the same frame its packet became pending has delay 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import CountExceedsPopulation, DecodedNotActivated


class Policy(str, Enum):
    RANDOM = "random"
    ROUND_ROBIN = "round_robin"


@dataclass
class ClassState:
    """Scheduler state of one class.

    ``pending_failures`` maps a user that failed to the frame it failed in;
    only the round-robin policy populates it.
    """

    class_id: int
    population: int
    queue: np.ndarray = field(default=None, repr=False)
    head: int = 0
    pending_failures: dict = field(default_factory=dict)
    pending_since: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.queue is None:
            self.queue = np.arange(self.population, dtype=np.int64)
        if self.pending_since is None:
            self.pending_since = np.zeros(self.population, dtype=np.int64)


@dataclass
class DelayStats:
    """Running per-class delay accumulators (frames)."""

    k: int
    sums: list = field(default=None)
    counts: list = field(default=None)
    maxima: list = field(default=None)

    def __post_init__(self):
        self.sums = self.sums or [0] * self.k
        self.counts = self.counts or [0] * self.k
        self.maxima = self.maxima or [0] * self.k

    def add(self, class_id: int, delays: np.ndarray):
        if len(delays) == 0:
            return
        # integer sums are exact, so aggregation order does not matter
        self.sums[class_id] += int(delays.sum())
        self.counts[class_id] += len(delays)
        self.maxima[class_id] = max(self.maxima[class_id], int(delays.max()))

    def merge(self, other: "DelayStats") -> "DelayStats":
        return DelayStats(
            self.k,
            [a + b for a, b in zip(self.sums, other.sums)],
            [a + b for a, b in zip(self.counts, other.counts)],
            [max(a, b) for a, b in zip(self.maxima, other.maxima)],
        )

    @property
    def avg(self) -> list[float]:
        """Per-class average delay ``D_a,i``; nan for classes with no success."""
        return [s / c if c else math.nan for s, c in zip(self.sums, self.counts)]

    @property
    def worst(self) -> list[int]:
        return list(self.maxima)

    @property
    def network_avg(self) -> float:
        return float(np.mean(self.avg))

    @property
    def network_worst(self) -> int:
        return max(self.maxima)

    @property
    def samples(self) -> int:
        return sum(self.counts)


def select_random(state: ClassState, count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform sample of ``count`` distinct users, ignoring past outcomes."""
    if not 0 <= count <= state.population:
        raise CountExceedsPopulation(f"class {state.class_id}: {count} > N = {state.population}")
    if count == 0:
        return np.empty(0, dtype=np.int64)
    return np.sort(rng.choice(state.population, count, replace=False))


def select_round_robin(state: ClassState, count: int) -> np.ndarray:
    """Failed users first, then the next users in the circular queue.

    When more users are pending than ``count``, the oldest failures (ties by
    user index) fill the whole selection and the rest wait. Users that are
    already pending are skipped when drawing from the queue.
    """
    if not 0 <= count <= state.population:
        raise CountExceedsPopulation(f"class {state.class_id}: {count} > N = {state.population}")
    retry = sorted(state.pending_failures, key=lambda u: (state.pending_failures[u], u))[:count]
    chosen = list(retry)
    taken = set(retry)
    while len(chosen) < count:
        u = int(state.queue[state.head])
        state.head = (state.head + 1) % state.population
        if u in state.pending_failures or u in taken:
            continue
        chosen.append(u)
        taken.add(u)
    return np.array(sorted(chosen), dtype=np.int64)


def record_outcome(
    state: ClassState,
    activated: np.ndarray,
    decoded: np.ndarray,
    frame_index: int,
    stats: DelayStats,
    policy: Policy = Policy.RANDOM,
):
    """Log delays of decoded users and queue the failed ones for retry."""
    activated = np.asarray(activated, dtype=np.int64)
    decoded = np.asarray(decoded, dtype=np.int64)
    if len(decoded) and not np.isin(decoded, activated).all():
        raise DecodedNotActivated(f"class {state.class_id}: decoded users were not active")
    stats.add(state.class_id, frame_index - state.pending_since[decoded] + 1)
    state.pending_since[decoded] = frame_index + 1
    if policy == Policy.ROUND_ROBIN:
        for u in decoded.tolist():
            state.pending_failures.pop(u, None)
        if len(decoded) != len(activated):
            for u in np.setdiff1d(activated, decoded).tolist():
                state.pending_failures.setdefault(u, frame_index)
    return state, stats
