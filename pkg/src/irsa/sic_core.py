"""Per-frame replica placement and ideal SIC (peeling) decoding.

A frame is a bipartite graph between active users and the ``M`` slots of a
frame. It is stored in CSR form: ``slots[offsets[u]:offsets[u + 1]]`` are
the distinct slots user ``u`` transmits in.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numba
import numpy as np
from scipy.stats import binom

from .errors import DegreeExceedsFrame, EmptyFrame, InconsistentLoad


@numba.njit(cache=True)
def _place_replicas(offsets, highs_draws, num_slots):
    # Partial Fisher-Yates on a shared permutation. The permutation is never
    # reset: a partial shuffle of any fixed ordering is a uniform subset.
    perm = np.arange(num_slots)
    slots = np.empty(highs_draws.shape[0], dtype=np.int64)
    for u in range(offsets.shape[0] - 1):
        start = offsets[u]
        for i in range(offsets[u + 1] - start):
            j = i + highs_draws[start + i]
            tmp = perm[i]
            perm[i] = perm[j]
            perm[j] = tmp
            slots[start + i] = perm[i]
    return slots


@numba.njit(cache=True)
def _peel(offsets, slots, num_slots, priority, reorder):
    num_users = offsets.shape[0] - 1
    occupancy = np.zeros(num_slots, dtype=np.int64)
    user_sum = np.zeros(num_slots, dtype=np.int64)
    for u in range(num_users):
        for e in range(offsets[u], offsets[u + 1]):
            occupancy[slots[e]] += 1
            user_sum[slots[e]] += u
    decoded = np.zeros(num_users, dtype=np.bool_)

    wave = np.empty(num_slots, dtype=np.int64)
    n_wave = 0
    for s in range(num_slots):
        if occupancy[s] == 1:
            wave[n_wave] = s
            n_wave += 1
    # each slot turns singleton at most once, so a wave never exceeds M
    nxt = np.empty(num_slots, dtype=np.int64)
    iterations = 0
    while n_wave > 0:
        if reorder:
            order = np.argsort(priority[wave[:n_wave]])
            wave[:n_wave] = wave[:n_wave][order]
        n_next = 0
        progressed = False
        for w in range(n_wave):
            s = wave[w]
            if occupancy[s] != 1:
                continue
            u = user_sum[s]
            decoded[u] = True
            progressed = True
            for e in range(offsets[u], offsets[u + 1]):
                t = slots[e]
                occupancy[t] -= 1
                user_sum[t] -= u
                if occupancy[t] == 1:
                    nxt[n_next] = t
                    n_next += 1
        if progressed:
            iterations += 1
        wave, nxt = nxt, wave
        n_wave = n_next
    residual = 0
    for s in range(num_slots):
        if occupancy[s] >= 2:
            residual += 1
    return decoded, iterations, residual


@dataclass(frozen=True, eq=False)
class FrameGraph:
    """Replica placements of the active users in one frame."""

    num_slots: int
    offsets: np.ndarray
    slots: np.ndarray

    @property
    def num_users(self) -> int:
        return len(self.offsets) - 1

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.offsets)

    @property
    def occupancy(self) -> np.ndarray:
        return np.bincount(self.slots, minlength=self.num_slots)

    @property
    def transmissions(self) -> list[list[int]]:
        return [self.slots[a:b].tolist() for a, b in zip(self.offsets[:-1], self.offsets[1:])]

    @classmethod
    def from_transmissions(cls, transmissions: Sequence[Sequence[int]], num_slots: int) -> "FrameGraph":
        """Build a frame from explicit per-user slot lists (tests, debugging)."""
        if num_slots < 1:
            raise EmptyFrame("frame must have at least one slot")
        offsets = np.zeros(len(transmissions) + 1, dtype=np.int64)
        for u, tx in enumerate(transmissions):
            if len(set(tx)) != len(tx) or not tx:
                raise ValueError(f"user {u}: slot list must be nonempty and distinct")
            if max(tx) >= num_slots or min(tx) < 0:
                raise DegreeExceedsFrame(f"user {u}: slot outside 0..{num_slots - 1}")
            offsets[u + 1] = offsets[u] + len(tx)
        flat = np.fromiter((s for tx in transmissions for s in tx), dtype=np.int64, count=int(offsets[-1]))
        return cls(num_slots, offsets, flat)


@dataclass(frozen=True)
class SlotDegreeHistogram:
    """Slot degree distribution: ``probs[m]`` is the fraction of slots with m replicas."""

    probs: np.ndarray
    num_slots: int

    def __getitem__(self, m):
        return float(self.probs[m]) if 0 <= m < len(self.probs) else 0.0

    def tv_distance(self, other: "SlotDegreeHistogram") -> float:
        n = max(len(self.probs), len(other.probs))
        a = np.zeros(n)
        b = np.zeros(n)
        a[: len(self.probs)] = self.probs
        b[: len(other.probs)] = other.probs
        return 0.5 * float(np.abs(a - b).sum())


@dataclass(frozen=True)
class DecodeResult:
    decoded: frozenset
    iterations: int
    residual_slots: int


def build_frame(degrees, num_slots: int, rng: np.random.Generator) -> FrameGraph:
    """Place each user's replicas in distinct, uniformly chosen slots."""
    if num_slots < 1:
        raise EmptyFrame("frame must have at least one slot")
    degrees = np.asarray(degrees, dtype=np.int64)
    if len(degrees) and (degrees.max() > num_slots or degrees.min() < 1):
        raise DegreeExceedsFrame(f"degrees must lie in 1..{num_slots}")
    offsets = np.zeros(len(degrees) + 1, dtype=np.int64)
    np.cumsum(degrees, out=offsets[1:])
    # position i within a user's list draws uniformly from the M - i slots left
    positions = np.arange(offsets[-1]) - np.repeat(offsets[:-1], degrees)
    draws = rng.integers(0, num_slots - positions)
    return FrameGraph(num_slots, offsets, _place_replicas(offsets, draws, num_slots))


def peel_mask(frame: FrameGraph, priority: np.ndarray | None = None):
    """Run the peeler; return ``(decoded_mask, iterations, residual_slots)``.

    ``priority`` optionally fixes the order in which singleton slots found in
    the same round are processed (lower first). The decoded set does not
    depend on it.
    """
    reorder = priority is not None
    if priority is None:
        priority = np.empty(0, dtype=np.int64)
    return _peel(frame.offsets, frame.slots, frame.num_slots, np.asarray(priority), reorder)


def peel(frame: FrameGraph, priority: np.ndarray | None = None) -> DecodeResult:
    mask, iterations, residual = peel_mask(frame, priority)
    return DecodeResult(frozenset(np.flatnonzero(mask).tolist()), int(iterations), int(residual))


def slot_histogram(frame: FrameGraph) -> SlotDegreeHistogram:
    counts = np.bincount(frame.occupancy, minlength=frame.num_users + 1)
    return SlotDegreeHistogram(counts / frame.num_slots, frame.num_slots)


def analytic_slot_dist(G_t: float, mean_deg: float, M: int, L: int) -> SlotDegreeHistogram:
    """Binomial slot degree law: each of ``L`` users hits a slot w.p. ``mean_deg / M``."""
    if L != round_half_up(G_t * M):
        raise InconsistentLoad(f"L = {L} but G_t * M = {G_t * M}")
    rho = mean_deg / M
    return SlotDegreeHistogram(binom.pmf(np.arange(L + 1), L, rho), M)


def round_half_up(x: float) -> int:
    # tolerance absorbs binary representation error in products like 0.35 * 100
    return int(np.floor(x + 0.5 + 1e-9))


def dump_frame(frame: FrameGraph, result: DecodeResult | None = None) -> str:
    """Plain-text frame dump: ``user_id: slot,slot,...`` per user."""
    lines = [f"{u}: {','.join(map(str, tx))}" for u, tx in enumerate(frame.transmissions)]
    if result is not None:
        lines.append("decoded: " + ",".join(map(str, sorted(result.decoded))))
    return "\n".join(lines) + "\n"
