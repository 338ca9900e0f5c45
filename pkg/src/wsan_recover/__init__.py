"""Simulator for movement-assisted failure recovery in wireless sensor-actor networks."""

from .geometry import Position
from .metrics import BoundCheck, MetricSet, check_bounds, compute_metrics
from .recovery import EngineParams, RecoveryReport, Strategy, run_recovery
from .scenarios import ScenarioConfig, run_batch
from .topology import Node, Topology

__version__ = "0.1.0"

__all__ = [
    "BoundCheck",
    "EngineParams",
    "MetricSet",
    "Node",
    "Position",
    "RecoveryReport",
    "ScenarioConfig",
    "Strategy",
    "Topology",
    "check_bounds",
    "compute_metrics",
    "run_batch",
    "run_recovery",
]
