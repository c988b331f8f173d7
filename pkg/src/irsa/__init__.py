"""Multi-class irregular repetition slotted ALOHA: simulation and capacity analysis."""

__version__ = "0.1.0"

from .analysis import (
    ActivationPlan,
    CapacityRegion,
    DualNetwork,
    achievability_plan,
    boundary_2d,
    capacity_region,
    contains,
    de_iterate,
    de_threshold,
    make_dual,
)
from .degree_dist import (
    OPTIMAL_DMAX8,
    DegreeDistribution,
    edge_perspective,
    make_distribution,
    mean_degree,
    mix_distributions,
    sample_degree,
)
from .scheduling import ClassState, DelayStats, Policy
from .sic_core import FrameGraph, analytic_slot_dist, build_frame, peel, slot_histogram
from .sim_engine import LoadVector, NetworkSpec, SimReport, run_frame, run_simulation, sweep_load

__all__ = [
    "ActivationPlan", "CapacityRegion", "DualNetwork", "achievability_plan", "boundary_2d",
    "capacity_region", "contains", "de_iterate", "de_threshold", "make_dual",
    "OPTIMAL_DMAX8", "DegreeDistribution", "edge_perspective", "make_distribution",
    "mean_degree", "mix_distributions", "sample_degree",
    "ClassState", "DelayStats", "Policy",
    "FrameGraph", "analytic_slot_dist", "build_frame", "peel", "slot_histogram",
    "LoadVector", "NetworkSpec", "SimReport", "run_frame", "run_simulation", "sweep_load",
]
