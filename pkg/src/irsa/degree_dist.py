"""User degree (repetition) distributions.

A distribution is the polynomial ``Lambda(x) = sum_l Lambda_l x^l``: an active
user sends ``l`` replicas of its packet with probability ``Lambda_l``.
Probabilities are stored sparsely, keyed by degree.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    LengthMismatch,
    NegativeProbability,
    NotNormalized,
    ZeroDegree,
    ZeroTotalLoad,
)

NORM_TOL = 1e-9


@dataclass(frozen=True)
class DegreeDistribution:
    """Immutable sparse degree distribution.

    Build instances with :func:`make_distribution`; the raw constructor does
    not validate (it is also used for edge-perspective polynomials, which
    carry mass on degree 0).
    """

    probs: Mapping[int, float]
    degrees: np.ndarray = field(init=False, repr=False, compare=False)
    weights: np.ndarray = field(init=False, repr=False, compare=False)
    _cdf: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        items = sorted((int(l), float(p)) for l, p in self.probs.items() if p != 0.0)
        object.__setattr__(self, "probs", MappingProxyType(dict(items)))
        degrees = np.array([l for l, _ in items], dtype=np.int64)
        weights = np.array([p for _, p in items], dtype=float)
        object.__setattr__(self, "degrees", degrees)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "_cdf", np.cumsum(weights))

    @property
    def max_degree(self) -> int:
        return int(self.degrees[-1]) if len(self.degrees) else 0

    def __call__(self, x):
        """Evaluate the generating polynomial at ``x`` (scalar or array)."""
        x = np.asarray(x, dtype=float)
        return sum(p * x**l for l, p in self.probs.items())

    def __eq__(self, other):
        if not isinstance(other, DegreeDistribution):
            return NotImplemented
        return dict(self.probs) == dict(other.probs)

    def __reduce__(self):
        return (DegreeDistribution, (dict(self.probs),))

    def __hash__(self):
        return hash(tuple(self.probs.items()))

    def isclose(self, other: "DegreeDistribution", atol: float = 1e-12) -> bool:
        keys = set(self.probs) | set(other.probs)
        return all(abs(self.probs.get(l, 0.0) - other.probs.get(l, 0.0)) <= atol for l in keys)

    def to_config(self) -> dict[str, float]:
        return {str(l): p for l, p in self.probs.items()}

    def __str__(self):
        terms = []
        for l, p in self.probs.items():
            mono = "" if l == 0 else ("x" if l == 1 else f"x^{l}")
            terms.append(f"{p:g}{mono}")
        return " + ".join(terms)


def make_distribution(probs: Mapping) -> DegreeDistribution:
    """Validate a degree -> probability map and build a distribution.

    Degree keys may be ints or numeric strings (as in JSON configs). A sum
    within ``NORM_TOL`` of one is renormalized; anything further off is
    rejected.
    """
    if not probs:
        raise NotNormalized("empty degree distribution")
    parsed = {}
    for key, p in probs.items():
        l = int(key)
        p = float(p)
        if l < 1:
            raise ZeroDegree(f"degree {l} < 1")
        if p < 0:
            raise NegativeProbability(f"Lambda_{l} = {p} < 0")
        parsed[l] = parsed.get(l, 0.0) + p
    total = sum(parsed.values())
    if abs(total - 1.0) > NORM_TOL:
        raise NotNormalized(f"probabilities sum to {total!r}, not 1")
    return DegreeDistribution({l: p / total for l, p in parsed.items()})


def mean_degree(d: DegreeDistribution) -> float:
    """Average number of replicas per user, Lambda'(1)."""
    return float(np.dot(d.degrees, d.weights))


def sample_degree(d: DegreeDistribution, rng: np.random.Generator) -> int:
    return int(sample_degrees(d, rng, 1)[0])


def sample_degrees(d: DegreeDistribution, rng: np.random.Generator, size: int) -> np.ndarray:
    """Draw ``size`` i.i.d. degrees (inverse-CDF on one uniform per draw)."""
    if len(d.degrees) == 1:
        return np.full(size, d.degrees[0], dtype=np.int64)
    u = rng.random(size)
    idx = np.searchsorted(d._cdf, u, side="right")
    np.minimum(idx, len(d.degrees) - 1, out=idx)
    return d.degrees[idx]


def mix_distributions(loads: Sequence[float], dists: Sequence[DegreeDistribution]) -> DegreeDistribution:
    """Load-weighted average of per-class distributions.

    This is the effective distribution seen by the receiver when classes
    with loads ``G_i`` transmit with ``Lambda_i``; zero-load classes drop out.
    """
    if len(loads) != len(dists):
        raise LengthMismatch(f"{len(loads)} loads vs {len(dists)} distributions")
    total = float(sum(loads))
    if total <= 0:
        raise ZeroTotalLoad("total load must be positive")
    mixed: dict[int, float] = {}
    for g, d in zip(loads, dists):
        if g == 0:
            continue
        for l, p in d.probs.items():
            mixed[l] = mixed.get(l, 0.0) + g * p / total
    return DegreeDistribution(mixed)


def edge_perspective(d: DegreeDistribution) -> DegreeDistribution:
    """Edge-perspective polynomial ``lambda(x) = Lambda'(x) / Lambda'(1)``.

    The coefficient of ``x^(l-1)`` is the probability that a randomly chosen
    replica belongs to a degree-``l`` user.
    """
    mean = mean_degree(d)
    return DegreeDistribution({l - 1: l * p / mean for l, p in d.probs.items()})


# Optimal repetition distribution with maximum degree 8 (asymptotic load
# threshold ~0.938).
OPTIMAL_DMAX8 = make_distribution({2: 0.5, 3: 0.28, 8: 0.22})
