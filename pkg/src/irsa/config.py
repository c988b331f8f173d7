"""JSON experiment configuration."""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from .degree_dist import DegreeDistribution, make_distribution
from .errors import IRSAError, ParseError, ValidationError
from .scheduling import Policy
from .sic_core import round_half_up
from .sim_engine import CHANNELS, LoadVector, NetworkSpec

KINDS = ("sweep", "region", "delay", "dual_check", "threshold")

DEFAULT_FRAMES = 10_000
DEFAULT_GRID = {"start": 0.05, "stop": 1.0, "step": 0.05}


@dataclass
class ClassConfig:
    population: int
    distribution: dict
    load: float | None = None


@dataclass
class ExperimentConfig:
    kind: str
    seed: int
    frame_size: int | None = None
    classes: list = field(default_factory=list)
    grid: list = field(default_factory=list)
    direction: list | None = None
    policy: str = Policy.RANDOM.value
    channel: str = "sic"
    frames: int = DEFAULT_FRAMES
    t_star: float | None = None
    distribution: dict | None = None
    tolerance: float = 1e-4
    trace_load: float | None = None

    def network(self) -> NetworkSpec:
        return NetworkSpec(
            [c.population for c in self.classes],
            self.frame_size,
            [make_distribution(c.distribution) for c in self.classes],
        )

    def load(self) -> LoadVector:
        return LoadVector([c.load for c in self.classes])

    def threshold_distribution(self) -> DegreeDistribution:
        return make_distribution(self.distribution)

    def canonical(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, separators=(",", ":"))

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:16]


def _require(doc: dict, key: str, path: str):
    if key not in doc:
        raise ValidationError(f"{path}{key}", "missing required field")
    return doc[key]


def _number(value, path, kind=float, minimum=None):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(path, f"expected a number, got {value!r}")
    if kind is int and int(value) != value:
        raise ValidationError(path, f"expected an integer, got {value!r}")
    value = kind(value)
    if minimum is not None and value < minimum:
        raise ValidationError(path, f"must be >= {minimum}, got {value}")
    return value


def _distribution(doc, path) -> dict:
    if not isinstance(doc, dict):
        raise ValidationError(path, "expected a degree -> probability object")
    try:
        dist = make_distribution(doc)
    except (IRSAError, ValueError, TypeError) as exc:
        raise ValidationError(path, str(exc)) from None
    return dist.to_config()


def _grid(doc, path) -> list:
    if isinstance(doc, list):
        values = [_number(v, f"{path}[{i}]", minimum=0.0) for i, v in enumerate(doc)]
    elif isinstance(doc, dict):
        start = _number(doc.get("start", DEFAULT_GRID["start"]), f"{path}.start", minimum=0.0)
        stop = _number(doc.get("stop", DEFAULT_GRID["stop"]), f"{path}.stop", minimum=0.0)
        step = _number(doc.get("step", DEFAULT_GRID["step"]), f"{path}.step")
        if step <= 0:
            raise ValidationError(f"{path}.step", "must be positive")
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        values = [round(start + i * step, 10) for i in range(max(n, 0))]
    else:
        raise ValidationError(path, "expected a list or {start, stop, step}")
    if not values:
        raise ValidationError(path, "grid is empty")
    if any(b < a for a, b in zip(values, values[1:])):
        raise ValidationError(path, "grid must be nondecreasing")
    return values


def parse_config(text: str, kind: str | None = None, seed: int | None = None) -> ExperimentConfig:
    """Parse and validate a JSON configuration document.

    ``kind`` and ``seed`` (from the command line) override the document.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ParseError("configuration must be a JSON object")

    kind = (kind or doc.get("experiment", "")).replace("-", "_")
    if kind not in KINDS:
        raise ValidationError("experiment", f"expected one of {KINDS}, got {kind!r}")
    if seed is None:
        if "seed" not in doc:
            raise ValidationError("seed", "missing required field (no implicit seed)")
        seed = doc["seed"]
    cfg = ExperimentConfig(kind=kind, seed=_number(seed, "seed", int, 0))

    if "frames" in doc:
        cfg.frames = _number(doc["frames"], "frames", int, 1)
    if "policy" in doc:
        if doc["policy"] not in [p.value for p in Policy]:
            raise ValidationError("policy", f"expected 'random' or 'round_robin', got {doc['policy']!r}")
        cfg.policy = doc["policy"]
    if "channel" in doc:
        if doc["channel"] not in CHANNELS:
            raise ValidationError("channel", f"expected one of {CHANNELS}, got {doc['channel']!r}")
        cfg.channel = doc["channel"]

    if kind == "threshold":
        if "distribution" in doc:
            cfg.distribution = _distribution(doc["distribution"], "distribution")
        else:
            classes = _require(doc, "classes", "")
            cfg.distribution = _distribution(_require(classes[0], "distribution", "classes[0]."), "classes[0].distribution")
        if "tolerance" in doc:
            cfg.tolerance = _number(doc["tolerance"], "tolerance")
            if cfg.tolerance <= 0:
                raise ValidationError("tolerance", "must be positive")
        if "trace_load" in doc:
            cfg.trace_load = _number(doc["trace_load"], "trace_load", minimum=0.0)
        return cfg

    cfg.frame_size = _number(_require(doc, "frame_size", ""), "frame_size", int, 1)
    classes = _require(doc, "classes", "")
    if not isinstance(classes, list) or not classes:
        raise ValidationError("classes", "expected a nonempty list")
    needs_load = kind in ("delay", "dual_check")
    for i, c in enumerate(classes):
        path = f"classes[{i}]"
        if not isinstance(c, dict):
            raise ValidationError(path, "expected an object")
        pop = _number(_require(c, "population", path + "."), f"{path}.population", int, 1)
        if "distribution" in c:
            dist = _distribution(c["distribution"], f"{path}.distribution")
        elif kind == "region":
            dist = None
        else:
            raise ValidationError(f"{path}.distribution", "missing required field")
        load = None
        if "load" in c:
            load = _number(c["load"], f"{path}.load", minimum=0.0)
            if round_half_up(load * cfg.frame_size) > pop:
                raise ValidationError(f"{path}.load", f"{load} * M exceeds population {pop}")
        elif needs_load:
            raise ValidationError(f"{path}.load", "missing required field")
        cfg.classes.append(ClassConfig(pop, dist, load))

    if kind == "sweep":
        cfg.grid = _grid(doc.get("grid", DEFAULT_GRID), "grid")
        if "direction" in doc:
            d = doc["direction"]
            if not isinstance(d, list) or len(d) != len(cfg.classes):
                raise ValidationError("direction", f"expected {len(cfg.classes)} numbers")
            cfg.direction = [_number(v, f"direction[{i}]", minimum=0.0) for i, v in enumerate(d)]
            if sum(cfg.direction) <= 0:
                raise ValidationError("direction", "must have a positive entry")
        else:
            cfg.direction = [float(c.population) for c in cfg.classes]
    if kind == "region":
        if len(cfg.classes) != 2:
            raise ValidationError("classes", "region output needs exactly two classes")
        if "t_star" in doc:
            cfg.t_star = _number(doc["t_star"], "t_star")
            if not 0 < cfg.t_star <= 1:
                raise ValidationError("t_star", "must be in (0, 1]")
        else:
            # empirical T* from the dual network's throughput curve
            cfg.distribution = _distribution(_require(doc, "distribution", ""), "distribution")
            cfg.grid = _grid(doc.get("grid", DEFAULT_GRID), "grid")
    if kind == "dual_check" and sum(c.load for c in cfg.classes) <= 0:
        raise ValidationError("classes", "total load must be positive")
    return cfg


def load_config(path, kind=None, seed=None) -> ExperimentConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    return parse_config(text, kind, seed)


def config_to_dict(cfg: ExperimentConfig) -> dict[str, Any]:
    return json.loads(cfg.canonical())
