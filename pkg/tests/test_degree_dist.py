import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import chisquare

from irsa.degree_dist import (
    OPTIMAL_DMAX8,
    edge_perspective,
    make_distribution,
    mean_degree,
    mix_distributions,
    sample_degree,
    sample_degrees,
)
from irsa.errors import (
    LengthMismatch,
    NegativeProbability,
    NotNormalized,
    ZeroDegree,
    ZeroTotalLoad,
)


def test_single_degree():
    d = make_distribution({1: 1.0})
    assert dict(d.probs) == {1: 1.0}
    assert d.max_degree == 1
    assert d(0.3) == pytest.approx(0.3)


def test_optimal_distribution_from_config_keys():
    d = make_distribution({"2": 0.5, "3": 0.28, "8": 0.22})
    assert d == OPTIMAL_DMAX8
    assert d.max_degree == 8
    assert d.to_config() == {"2": 0.5, "3": 0.28, "8": 0.22}


@pytest.mark.parametrize(
    "probs, exc",
    [
        ({2: 0.6, 3: 0.3}, NotNormalized),
        ({}, NotNormalized),
        ({2: 1.2, 3: -0.2}, NegativeProbability),
        ({0: 0.5, 2: 0.5}, ZeroDegree),
    ],
)
def test_invalid_distributions(probs, exc):
    with pytest.raises(exc):
        make_distribution(probs)


def test_tiny_deviation_is_renormalized():
    d = make_distribution({2: 0.5, 3: 0.5 + 5e-10})
    assert sum(d.probs.values()) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("probs, mean", [({1: 1.0}, 1.0), ({8: 1.0}, 8.0), ({2: 0.5, 3: 0.28, 8: 0.22}, 3.6)])
def test_mean_degree(probs, mean):
    assert mean_degree(make_distribution(probs)) == pytest.approx(mean, abs=1e-12)


def test_sample_point_mass(rng):
    d = make_distribution({1: 1.0})
    assert all(sample_degree(d, rng) == 1 for _ in range(20))


def test_sampling_is_reproducible():
    d = make_distribution({2: 0.5, 4: 0.5})
    a = sample_degrees(d, np.random.default_rng(7), 1000)
    b = sample_degrees(d, np.random.default_rng(7), 1000)
    assert np.array_equal(a, b)
    assert set(np.unique(a)) == {2, 4}


def test_sample_frequencies_within_three_sigma():
    n = 10**6
    draws = sample_degrees(OPTIMAL_DMAX8, np.random.default_rng(2024), n)
    for l, p in OPTIMAL_DMAX8.probs.items():
        freq = np.mean(draws == l)
        assert abs(freq - p) <= 3 * np.sqrt(p * (1 - p) / n)


def test_sample_chi_square():
    n = 10**6
    draws = sample_degrees(OPTIMAL_DMAX8, np.random.default_rng(99), n)
    observed = [np.sum(draws == l) for l in OPTIMAL_DMAX8.probs]
    expected = [n * p for p in OPTIMAL_DMAX8.probs.values()]
    assert chisquare(observed, expected).pvalue > 0.01


def test_mix_two_regular():
    mixed = mix_distributions([0.2, 0.2], [make_distribution({2: 1}), make_distribution({4: 1})])
    assert mixed.isclose(make_distribution({2: 0.5, 4: 0.5}))


def test_mix_zero_load_class_drops_out():
    mixed = mix_distributions([0.7, 0.0], [OPTIMAL_DMAX8, make_distribution({2: 1})])
    assert mixed.isclose(OPTIMAL_DMAX8)


def test_mix_identical_inputs():
    assert mix_distributions([0.3, 0.3], [OPTIMAL_DMAX8, OPTIMAL_DMAX8]).isclose(OPTIMAL_DMAX8)


def test_mix_errors():
    with pytest.raises(ZeroTotalLoad):
        mix_distributions([0.0, 0.0], [OPTIMAL_DMAX8, OPTIMAL_DMAX8])
    with pytest.raises(LengthMismatch):
        mix_distributions([0.1], [OPTIMAL_DMAX8, OPTIMAL_DMAX8])


def test_edge_perspective():
    assert dict(edge_perspective(make_distribution({2: 1})).probs) == {1: 1.0}
    assert dict(edge_perspective(make_distribution({1: 1})).probs) == {0: 1.0}
    lam = edge_perspective(OPTIMAL_DMAX8)
    expected = {1: 1.0 / 3.6, 2: 0.84 / 3.6, 7: 1.76 / 3.6}
    assert lam.isclose(type(lam)(expected), atol=1e-12)
    assert sum(lam.probs.values()) == pytest.approx(1.0)


distributions = st.dictionaries(
    st.integers(1, 12), st.floats(0.01, 1.0), min_size=1, max_size=4
).map(lambda d: make_distribution({l: p / sum(d.values()) for l, p in d.items()}))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.floats(0.0, 2.0), distributions), min_size=1, max_size=5))
def test_mix_properties(classes):
    loads = [g for g, _ in classes]
    dists = [d for _, d in classes]
    if sum(loads) <= 1e-6:
        return
    mixed = mix_distributions(loads, dists)
    assert sum(mixed.probs.values()) == pytest.approx(1.0, abs=1e-9)
    assert all(p >= 0 for p in mixed.probs.values())
    linear = sum(g * mean_degree(d) for g, d in zip(loads, dists)) / sum(loads)
    assert mean_degree(mixed) == pytest.approx(linear, rel=1e-9)
    assert mix_distributions(loads, [dists[0]] * len(dists)).isclose(dists[0], atol=1e-9)
