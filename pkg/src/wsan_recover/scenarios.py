"""Seeded experiment generation and batch execution.

Randomness comes from numpy's PCG64 bit generator, seeded per trial with
``SeedSequence([seed, trial_index])``. Each trial therefore has its own
stream, and serial and parallel batches give identical results.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .metrics import BoundCheck, BoundError, MetricSet, check_bounds, compute_metrics, summarize_rows
from .recovery import (
    EngineParams,
    PreconditionError,
    RecoveryReport,
    Strategy,
    run_recovery,
    skipped_report,
)
from .topology import (
    Topology,
    articulation_points,
    average_degree,
    connected_components,
    is_biconnected,
)

U64 = (1 << 64) - 1


class Density(str, enum.Enum):
    DENSE = "dense"
    SPARSE = "sparse"


# accepted average-degree window per class
DEGREE_TARGETS = {Density.DENSE: (8.0, math.inf), Density.SPARSE: (2.0, 4.0)}
# degree used to size the default square area (border effects pull the measured value lower)
NOMINAL_DEGREE = {Density.DENSE: 12.0, Density.SPARSE: 5.0}

DEFAULT_RANGE = 100.0
DEFAULT_STRATEGIES = (Strategy.RIM, Strategy.DARA1C, Strategy.LEDIR)


class ScenarioError(ValueError):
    pass


class GenerationError(RuntimeError):
    pass


class NoCutVertexError(ValueError):
    pass


@dataclass(frozen=True)
class ScenarioConfig:
    node_count: int = 40
    comm_range: float = DEFAULT_RANGE
    density: Density = Density.DENSE
    seed: int = 0
    trials: int = 1
    strategies: tuple[Strategy, ...] = DEFAULT_STRATEGIES
    area: Optional[tuple[float, float]] = None
    max_attempts: int = 1000

    def __post_init__(self):
        object.__setattr__(self, "density", Density(self.density))
        object.__setattr__(self, "strategies", tuple(Strategy.parse(s) for s in self.strategies))
        if self.node_count < 4:
            raise ScenarioError(f"need at least 4 nodes, got {self.node_count}")
        if not (math.isfinite(self.comm_range) and self.comm_range > 0):
            raise ScenarioError("communication range must be a positive number")
        if self.trials < 0:
            raise ScenarioError("trials must be >= 0")
        if self.area is not None:
            w, h = self.area
            if not (w > 0 and h > 0 and math.isfinite(w) and math.isfinite(h)):
                raise ScenarioError(f"bad area {self.area!r}")
        lo, _ = DEGREE_TARGETS[self.density]
        if self.node_count - 1 < lo:
            raise ScenarioError(
                f"{self.density.value} needs average degree >= {lo:g}, "
                f"impossible with {self.node_count} nodes (max {self.node_count - 1})"
            )

    @property
    def field_size(self) -> tuple[float, float]:
        if self.area is not None:
            return self.area
        side = math.sqrt((self.node_count - 1) * math.pi * self.comm_range**2 / NOMINAL_DEGREE[self.density])
        return (side, side)


def trial_rng(seed: int, trial_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed & U64, trial_index])))


def _degree_ok(config: ScenarioConfig, deg: float) -> bool:
    lo, hi = DEGREE_TARGETS[config.density]
    return lo <= deg <= hi


def _samples(config: ScenarioConfig, rng: np.random.Generator):
    """Connected topologies meeting the density target, drawn until the budget runs out."""
    w, h = config.field_size
    n, r = config.node_count, config.comm_range
    seen = []
    for _ in range(config.max_attempts):
        pts = rng.uniform(0.0, 1.0, size=(n, 2)) * (w, h)
        # cheap degree screen before building the real topology
        diff = pts[:, None, :] - pts[None, :, :]
        near = np.hypot(diff[..., 0], diff[..., 1]) <= r
        deg = (near.sum() - n) / n
        seen.append(deg)
        if not _degree_ok(config, deg):
            continue
        topo = Topology.from_points(pts.tolist(), r)
        if len(connected_components(topo)) == 1 and _degree_ok(config, average_degree(topo)):
            yield topo
    raise GenerationError(
        f"no connected {config.density.value} topology after {config.max_attempts} attempts "
        f"(N={n}, r={r:g}, area={w:g}x{h:g}, mean sampled degree {np.mean(seen):.2f}, "
        f"target {DEGREE_TARGETS[config.density]})"
    )


def generate_topology(config: ScenarioConfig, trial_index: int = 0) -> Topology:
    return next(_samples(config, trial_rng(config.seed, trial_index)))


def pick_failure(topo: Topology, rng: np.random.Generator) -> int:
    """A uniformly chosen cut vertex."""
    cuts = sorted(articulation_points(topo))
    if not cuts:
        raise NoCutVertexError("topology has no cut vertex")
    return cuts[int(rng.integers(len(cuts)))]


def generate_trial(config: ScenarioConfig, trial_index: int) -> tuple[Topology, int]:
    """Topology plus a cut-vertex failure; cut-free samples are skipped."""
    rng = trial_rng(config.seed, trial_index)
    for topo in _samples(config, rng):
        try:
            return topo, pick_failure(topo, rng)
        except NoCutVertexError:
            continue
    raise AssertionError("unreachable")


def generate_biconnected_topology(
    node_count: int, comm_range: float, seed: int, trial_index: int = 0, max_attempts: int = 1000
) -> Topology:
    """Jittered ring: consecutive nodes always in range, extra chords where jitter allows."""
    if node_count < 4:
        raise ScenarioError("need at least 4 nodes")
    rng = trial_rng(seed, trial_index)
    radius = 0.7 * comm_range / (2 * math.sin(math.pi / node_count))
    base = 2 * math.pi * np.arange(node_count) / node_count
    for _ in range(max_attempts):
        ang = base + rng.uniform(-0.15, 0.15, node_count) * (2 * math.pi / node_count)
        rad = radius + rng.uniform(-0.3, 0.3, node_count) * comm_range
        pts = np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])
        topo = Topology.from_points(pts.tolist(), comm_range)
        if is_biconnected(topo):
            return topo
    raise GenerationError("could not draw a biconnected ring")


def pick_failure_2c(topo: Topology, rng: np.random.Generator) -> int:
    """A uniformly chosen node whose loss leaves a cut vertex behind."""
    hits = [n for n in topo.live_ids if articulation_points(topo.with_failed(n))]
    if not hits:
        raise NoCutVertexError("every single failure keeps the topology 2-connected")
    return hits[int(rng.integers(len(hits)))]


@dataclass(frozen=True)
class StrategyRun:
    strategy: Strategy
    report: RecoveryReport
    metrics: MetricSet
    bounds: Optional[BoundCheck]


@dataclass(frozen=True)
class TrialResult:
    trial: int
    failed: int
    topology: Topology
    runs: dict[Strategy, StrategyRun] = field(default_factory=dict)


def run_strategy(topo: Topology, failed: int, strategy: Strategy, params: EngineParams | None = None) -> StrategyRun:
    try:
        report = run_recovery(topo, failed, strategy, params)
    except PreconditionError as exc:
        report = skipped_report(topo, failed, strategy, str(exc))
    metrics = compute_metrics(report)
    try:
        bounds = check_bounds(metrics, strategy, len(topo.nodes), topo.comm_range)
    except BoundError:
        bounds = None
    return StrategyRun(strategy, report, metrics, bounds)


def run_trial(
    topo: Topology, failed: int, strategies, trial: int = 0, params: EngineParams | None = None
) -> TrialResult:
    runs = {}
    for s in strategies:
        s = Strategy.parse(s)
        runs[s] = run_strategy(topo, failed, s, params)
    return TrialResult(trial, failed, topo, runs)


def _one(args) -> TrialResult:
    config, index = args
    topo, failed = generate_trial(config, index)
    return run_trial(topo, failed, config.strategies, index)


@dataclass(frozen=True)
class BatchResult:
    config: ScenarioConfig
    trials: list[TrialResult]

    def rows(self) -> list[dict]:
        return [row for t in self.trials for row in trial_rows(t)]

    @property
    def summary(self) -> dict:
        return summarize_rows(self.rows())


def run_batch(config: ScenarioConfig, workers: int = 1) -> BatchResult:
    jobs = [(config, i) for i in range(config.trials)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            trials = list(pool.map(_one, jobs))
    else:
        trials = [_one(j) for j in jobs]
    return BatchResult(config, trials)


def trial_rows(result: TrialResult) -> list[dict]:
    rows = []
    for s, run in result.runs.items():
        m, b = run.metrics, run.bounds
        rows.append(
            {
                "trial": result.trial,
                "algorithm": s.value.lower(),
                "failed_node": result.failed,
                "relocated_nodes": m.relocated_nodes,
                "total_distance": m.total_distance,
                "max_node_distance": m.max_node_distance,
                "messages": m.exchanged_messages,
                "extended_paths": m.extended_paths,
                "paths_not_extended": m.paths_not_extended,
                "recovered": run.report.recovered,
                "nodes_bound_ok": None if b is None else b.nodes_bound_ok,
                "node_distance_bound_ok": None if b is None else b.node_distance_bound_ok,
                "total_distance_bound_ok": None if b is None else b.total_distance_bound_ok,
            }
        )
    return rows
