import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from irsa.degree_dist import OPTIMAL_DMAX8, sample_degrees
from irsa.errors import DegreeExceedsFrame, EmptyFrame, InconsistentLoad
from irsa.sic_core import (
    FrameGraph,
    SlotDegreeHistogram,
    analytic_slot_dist,
    build_frame,
    dump_frame,
    peel,
    slot_histogram,
)

from conftest import brute_force_peel


def test_forced_placement(rng):
    frame = build_frame([3], 3, rng)
    assert sorted(frame.transmissions[0]) == [0, 1, 2]
    assert slot_histogram(frame)[1] == 1.0


def test_forced_collision(rng):
    frame = build_frame([1, 1], 1, rng)
    assert frame.transmissions == [[0], [0]]
    assert frame.occupancy.tolist() == [2]


@pytest.mark.parametrize("degrees, M, exc", [([9], 8, DegreeExceedsFrame), ([1], 0, EmptyFrame), ([0], 4, DegreeExceedsFrame)])
def test_build_frame_errors(rng, degrees, M, exc):
    with pytest.raises(exc):
        build_frame(degrees, M, rng)


def test_build_frame_invariants(rng):
    degrees = sample_degrees(OPTIMAL_DMAX8, rng, 300)
    frame = build_frame(degrees, 100, rng)
    for d, tx in zip(degrees, frame.transmissions):
        assert len(tx) == d == len(set(tx))
        assert all(0 <= s < 100 for s in tx)
    counts = np.zeros(100, dtype=int)
    for tx in frame.transmissions:
        counts[tx] += 1
    assert np.array_equal(counts, frame.occupancy)


def test_slot_choice_is_uniform():
    # every slot equally likely, and every 2-subset of 4 slots equally likely
    rng = np.random.default_rng(5)
    pairs = {}
    n = 60_000
    for _ in range(n // 3):
        frame = build_frame([2, 2, 2], 4, rng)
        for tx in frame.transmissions:
            key = tuple(sorted(tx))
            pairs[key] = pairs.get(key, 0) + 1
    assert len(pairs) == 6
    freqs = np.array(list(pairs.values())) / n
    sigma = np.sqrt((1 / 6) * (5 / 6) / n)
    assert np.all(np.abs(freqs - 1 / 6) < 4 * sigma)


def test_peel_chain():
    frame = FrameGraph.from_transmissions([[0], [0, 1]], 2)
    result = peel(frame)
    assert result.decoded == {0, 1}
    assert result.iterations == 2
    assert result.residual_slots == 0


def test_peel_stopping_set():
    result = peel(FrameGraph.from_transmissions([[0, 1], [0, 1]], 2))
    assert result.decoded == set()
    assert result.residual_slots == 2


def test_peel_empty_frame(rng):
    result = peel(build_frame([], 5, rng))
    assert result.decoded == set()
    assert result.iterations == 0


def test_slot_histogram_direct_count():
    hist = slot_histogram(FrameGraph.from_transmissions([[0], [0]], 2))
    assert hist[0] == 0.5 and hist[2] == 0.5 and hist[1] == 0.0


def test_analytic_slot_dist_small():
    hist = analytic_slot_dist(0.1, 1.0, 10, 1)
    assert hist.probs == pytest.approx([0.9, 0.1])


@pytest.mark.parametrize("G, mean, M", [(0.5, 3.6, 100), (1.0, 2.0, 50), (0.05, 8.0, 20)])
def test_analytic_slot_dist_normalized(G, mean, M):
    L = round(G * M)
    assert analytic_slot_dist(G, mean, M, L).probs.sum() == pytest.approx(1.0, abs=1e-9)


def test_analytic_slot_dist_inconsistent():
    with pytest.raises(InconsistentLoad):
        analytic_slot_dist(0.5, 3.6, 100, 49)


def test_empirical_slot_histogram_matches_binomial():
    rng = np.random.default_rng(77)
    counts = np.zeros(101)
    for _ in range(10_000):
        frame = build_frame(sample_degrees(OPTIMAL_DMAX8, rng, 100), 100, rng)
        counts += np.bincount(frame.occupancy, minlength=101)
    empirical = SlotDegreeHistogram(counts / counts.sum(), 100)
    analytic = analytic_slot_dist(1.0, 3.6, 100, 100)
    assert empirical.tv_distance(analytic) < 0.01


def test_dump_format():
    frame = FrameGraph.from_transmissions([[0], [0, 1]], 2)
    text = dump_frame(frame, peel(frame))
    assert text == "0: 0\n1: 0,1\ndecoded: 0,1\n"


small_frames = st.integers(1, 10).flatmap(
    lambda M: st.tuples(
        st.just(M),
        st.lists(st.sets(st.integers(0, M - 1), min_size=1).map(sorted), max_size=8),
    )
)


@settings(max_examples=300, deadline=None)
@given(small_frames, st.randoms(use_true_random=False))
def test_peel_matches_brute_force_any_order(case, rnd):
    M, tx = case
    frame = FrameGraph.from_transmissions(tx, M)
    result = peel(frame)
    assert result.decoded == brute_force_peel(tx, M)
    assert len(result.decoded) <= len(tx)
    order = list(range(M))
    rnd.shuffle(order)
    assert peel(frame, np.array(order)).decoded == result.decoded
    # at the fixed point no slot holds exactly one undecoded user
    remaining = [t for u, t in enumerate(tx) if u not in result.decoded]
    occ = np.zeros(M, dtype=int)
    for t in remaining:
        occ[t] += 1
    assert not np.any(occ == 1)
    assert result.residual_slots == int(np.sum(occ >= 2))
