import math

import numpy as np
import pytest

from irsa.errors import CountExceedsPopulation, DecodedNotActivated
from irsa.scheduling import (
    ClassState,
    DelayStats,
    Policy,
    record_outcome,
    select_random,
    select_round_robin,
)


def test_select_random_edges(rng):
    state = ClassState(0, 10)
    assert len(select_random(state, 0, rng)) == 0
    assert select_random(state, 10, rng).tolist() == list(range(10))
    with pytest.raises(CountExceedsPopulation):
        select_random(state, 11, rng)


def test_select_random_uniform():
    rng = np.random.default_rng(31)
    state = ClassState(0, 100)
    hits = np.zeros(100)
    frames = 100_000
    for _ in range(frames):
        hits[select_random(state, 25, rng)] += 1
    sigma = math.sqrt(0.25 * 0.75 / frames)
    assert np.all(np.abs(hits / frames - 0.25) <= 3 * sigma)


def test_round_robin_cycles():
    state = ClassState(0, 4)
    stats = DelayStats(1)
    picks = []
    for f in range(3):
        chosen = select_round_robin(state, 2)
        picks.append(chosen.tolist())
        record_outcome(state, chosen, chosen, f, stats, Policy.ROUND_ROBIN)
    assert picks == [[0, 1], [2, 3], [0, 1]]


def test_round_robin_failed_first():
    state = ClassState(0, 4)
    stats = DelayStats(1)
    first = select_round_robin(state, 2)
    record_outcome(state, first, np.array([0]), 0, stats, Policy.ROUND_ROBIN)
    assert select_round_robin(state, 2).tolist() == [1, 2]


def test_round_robin_zero_count():
    state = ClassState(0, 4)
    assert len(select_round_robin(state, 0)) == 0
    assert state.head == 0


def test_round_robin_excess_failures_oldest_first():
    state = ClassState(0, 6)
    state.pending_failures = {4: 2, 1: 3, 3: 2}
    assert select_round_robin(state, 2).tolist() == [3, 4]
    assert state.head == 0


def test_round_robin_skips_pending_users_in_queue():
    state = ClassState(0, 4)
    stats = DelayStats(1)
    chosen = select_round_robin(state, 4)
    record_outcome(state, chosen, np.array([0, 2, 3]), 0, stats, Policy.ROUND_ROBIN)
    assert select_round_robin(state, 4).tolist() == [0, 1, 2, 3]


def test_immediate_success_has_delay_one():
    state = ClassState(0, 5)
    state.pending_since[2] = 3
    stats = DelayStats(1)
    record_outcome(state, np.array([2]), np.array([2]), 3, stats)
    assert stats.avg[0] == 1.0 and stats.worst[0] == 1
    assert state.pending_since[2] == 4


def test_decoded_must_be_active():
    with pytest.raises(DecodedNotActivated):
        record_outcome(ClassState(0, 5), np.array([1]), np.array([2]), 0, DelayStats(1))


def test_round_robin_loss_free_delay():
    state = ClassState(0, 100)
    stats = DelayStats(1)
    for f in range(4000):
        chosen = select_round_robin(state, 25)
        record_outcome(state, chosen, chosen, f, stats, Policy.ROUND_ROBIN)
    assert stats.worst[0] == 4
    assert stats.avg[0] == pytest.approx(4.0, abs=0.01)


def test_all_active_loss_free():
    state = ClassState(0, 10)
    stats = DelayStats(1)
    for f in range(50):
        chosen = select_round_robin(state, 10)
        record_outcome(state, chosen, chosen, f, stats, Policy.ROUND_ROBIN)
    assert stats.avg[0] == 1.0 and stats.worst[0] == 1


def test_network_aggregates():
    stats = DelayStats(2)
    stats.add(0, np.array([1, 3]))
    stats.add(1, np.array([4, 4, 10]))
    assert stats.network_avg == pytest.approx((2 + 6) / 2)
    assert stats.network_worst == 10
    merged = stats.merge(stats)
    assert merged.avg == stats.avg and merged.counts == [4, 6]
