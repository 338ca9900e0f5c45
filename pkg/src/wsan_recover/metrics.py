"""Recovery-overhead and path-length metrics, plus the analytical bound checks."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import asdict, dataclass
from statistics import fmean, pstdev
from typing import Optional

from .geometry import EPS_GEOM, distance
from .recovery import Cause, RecoveryReport, Strategy
from .topology import shortest_path_table


@dataclass(frozen=True)
class MetricSet:
    total_distance: float
    relocated_nodes: int
    exchanged_messages: int
    extended_paths: int
    paths_not_extended: int
    max_node_distance: float
    max_inward_offset: Optional[float] = None  # farthest inward-phase end point from the failed spot
    max_replacement_move: float = 0.0

    def as_dict(self) -> dict:
        return asdict(self)


def compute_metrics(report: RecoveryReport) -> MetricSet:
    """Overhead and path metrics for one run.

    Paths are counted over unordered surviving pairs that were reachable
    before the failure; a pair counts as extended if its hop distance grew
    (becoming unreachable included).
    """
    per_node: dict[int, float] = defaultdict(float)
    inward = []
    replacement = [0.0]
    for r in report.relocations:
        per_node[r.node] += r.distance
        if r.cause is Cause.INWARD_MOTION:
            inward.append(distance(r.end, report.event.position))
        elif r.cause is Cause.REPLACE_FAILED or report.algorithm in (Strategy.DARA1C, Strategy.DARA2C):
            replacement.append(r.distance)

    failed = report.failed
    before = shortest_path_table(report.pre_topology)
    after = shortest_path_table(report.post_topology)
    survivors = [n for n in before.nodes if n != failed]
    extended = kept = 0
    for i, a in enumerate(survivors):
        for b in survivors[i + 1:]:
            h0 = before.hop(a, b)
            if h0 is None:
                continue
            h1 = after.hop(a, b)
            if h1 is None or h1 > h0:
                extended += 1
            else:
                kept += 1

    return MetricSet(
        total_distance=float(sum(r.distance for r in report.relocations)),
        relocated_nodes=len(per_node),
        exchanged_messages=len(report.messages),
        extended_paths=extended,
        paths_not_extended=kept,
        max_node_distance=max(per_node.values(), default=0.0),
        max_inward_offset=max(inward) if inward else None,
        max_replacement_move=max(replacement),
    )


class BoundError(ValueError):
    pass


@dataclass(frozen=True)
class BoundCheck:
    algorithm: Strategy
    N: int
    r: float
    nodes_bound_ok: bool
    node_distance_bound_ok: bool
    total_distance_bound_ok: bool
    messages_within_bound: bool  # informational; depends on the counting convention


def node_bound(algorithm: Strategy, n: int) -> int:
    if algorithm is Strategy.LEDIR:
        return (n - 1) // 2
    if algorithm is Strategy.RIM:
        return n - 1
    return n - 3


def message_bound(algorithm: Strategy, n: int) -> int:
    if algorithm is Strategy.LEDIR:
        return (3 * (n - 1)) // 2
    if algorithm is Strategy.RIM:
        return 2 * n - 1
    return 5 * n - 3


def total_distance_bound(algorithm: Strategy, n: int, r: float) -> float:
    if algorithm in (Strategy.LEDIR, Strategy.RIM):
        return r / 2 * (n - 1)
    return r * (n - 3)


def check_bounds(metrics: MetricSet, algorithm: "Strategy | str", n: int, r: float) -> BoundCheck:
    algorithm = Strategy.parse(algorithm)
    if n < 1 or (algorithm in (Strategy.DARA1C, Strategy.DARA2C) and n < 4):
        raise BoundError(f"N={n} too small for the {algorithm.value} bounds")
    if not r > 0:
        raise BoundError("communication range must be positive")

    if algorithm is Strategy.RIM:
        off = metrics.max_inward_offset
        dist_ok = off is None or off <= r / 2 + EPS_GEOM
    else:
        dist_ok = metrics.max_node_distance <= r + EPS_GEOM
    return BoundCheck(
        algorithm=algorithm,
        N=n,
        r=r,
        nodes_bound_ok=metrics.relocated_nodes <= node_bound(algorithm, n),
        node_distance_bound_ok=dist_ok,
        total_distance_bound_ok=metrics.total_distance <= total_distance_bound(algorithm, n, r) + EPS_GEOM,
        messages_within_bound=metrics.exchanged_messages <= message_bound(algorithm, n),
    )


SUMMARY_FIELDS = (
    "relocated_nodes",
    "total_distance",
    "max_node_distance",
    "messages",
    "extended_paths",
    "paths_not_extended",
)

# relative gap under which two overhead means count as equal
EQUAL_TOLERANCE = 0.15


def summarize_rows(rows) -> dict[str, dict[str, tuple[float, float]]]:
    """Per-algorithm (mean, population stddev) of each result column, plus recovery rate."""
    groups: dict[str, list[dict]] = defaultdict(list)
    for row in rows:
        groups[row["algorithm"]].append(row)
    out = {}
    for algo in sorted(groups):
        rs = groups[algo]
        stats = {}
        for f in SUMMARY_FIELDS + ("recovered",):
            vals = [float(r[f]) for r in rs]
            stats[f] = (fmean(vals), pstdev(vals))
        stats["runs"] = (float(len(rs)), 0.0)
        out[algo] = stats
    return out


def relative_gap(a: float, b: float) -> float:
    hi = max(abs(a), abs(b))
    return 0.0 if hi == 0 else abs(a - b) / hi


def overhead_verdict(ledir_mean: float, rim_mean: float, tolerance: float = EQUAL_TOLERANCE) -> str:
    """How LeDiR's mean overhead compares with RIM's on one metric."""
    if relative_gap(ledir_mean, rim_mean) <= tolerance:
        return "equal"
    return "outperforms" if ledir_mean < rim_mean else "underperforms"
