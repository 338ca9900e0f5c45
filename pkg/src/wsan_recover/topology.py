"""Unit-disk network model and the graph queries the recovery schemes rely on.

A :class:`Topology` is an immutable snapshot. Adjacency is always derived
from positions, never stored, so a moved node can't carry stale links.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Mapping

from .geometry import EPS_GEOM, Position, distance


class TopologyError(ValueError):
    pass


class UnknownNodeError(TopologyError, KeyError):
    def __str__(self):
        return self.args[0] if self.args else "unknown node"


class DisconnectedError(TopologyError):
    pass


@dataclass(frozen=True)
class Node:
    id: int
    position: Position
    alive: bool = True


@dataclass(frozen=True)
class NeighborEntry:
    id: int
    position: Position
    degree: int


@dataclass(frozen=True)
class Topology:
    nodes: tuple[Node, ...]
    comm_range: float

    def __post_init__(self):
        if not (math.isfinite(self.comm_range) and self.comm_range > 0):
            raise TopologyError(f"comm_range must be a positive number, got {self.comm_range!r}")
        ordered = tuple(sorted(self.nodes, key=lambda n: n.id))
        ids = [n.id for n in ordered]
        if len(set(ids)) != len(ids):
            raise TopologyError("duplicate node ids")
        if any(i < 0 for i in ids):
            raise TopologyError("node ids must be non-negative")
        object.__setattr__(self, "nodes", ordered)

    @classmethod
    def from_points(cls, points: Iterable[tuple[float, float]], comm_range: float) -> "Topology":
        return cls(
            tuple(Node(i, Position(float(x), float(y))) for i, (x, y) in enumerate(points)),
            float(comm_range),
        )

    @cached_property
    def _by_id(self) -> dict[int, Node]:
        return {n.id: n for n in self.nodes}

    def node(self, node_id: int) -> Node:
        try:
            return self._by_id[node_id]
        except KeyError:
            raise UnknownNodeError(f"unknown node {node_id}") from None

    def position(self, node_id: int) -> Position:
        return self.node(node_id).position

    @property
    def ids(self) -> list[int]:
        return [n.id for n in self.nodes]

    @cached_property
    def live_ids(self) -> tuple[int, ...]:
        return tuple(n.id for n in self.nodes if n.alive)

    def positions(self) -> dict[int, Position]:
        return {n.id: n.position for n in self.nodes}

    def with_failed(self, node_id: int) -> "Topology":
        self.node(node_id)
        return replace(
            self,
            nodes=tuple(replace(n, alive=False) if n.id == node_id else n for n in self.nodes),
        )

    def with_positions(self, moves: Mapping[int, Position]) -> "Topology":
        for nid in moves:
            self.node(nid)
        return replace(
            self,
            nodes=tuple(
                replace(n, position=moves[n.id]) if n.id in moves else n for n in self.nodes
            ),
        )

    def linked(self, a: Position, b: Position) -> bool:
        # non-strict unit-disk rule; EPS_GEOM absorbs rounding on moves that stop exactly at r
        return distance(a, b) <= self.comm_range + EPS_GEOM

    @cached_property
    def _adjacency(self) -> dict[int, frozenset[int]]:
        live = [n for n in self.nodes if n.alive]
        adj: dict[int, set[int]] = {n.id: set() for n in live}
        for i, a in enumerate(live):
            for b in live[i + 1:]:
                if self.linked(a.position, b.position):
                    adj[a.id].add(b.id)
                    adj[b.id].add(a.id)
        return {k: frozenset(v) for k, v in adj.items()}


def adjacency(topo: Topology) -> dict[int, frozenset[int]]:
    """Live node id -> ids of live nodes within ``comm_range``."""
    return topo._adjacency


def _require_alive(topo: Topology, node_id: int) -> None:
    if not topo.node(node_id).alive:
        raise TopologyError(f"node {node_id} is not alive")


def neighbor_table(topo: Topology, node_id: int, hops: int = 1) -> list[NeighborEntry]:
    """Neighbour entries as a node would hold them, sorted by id."""
    if hops not in (1, 2):
        raise ValueError("hops must be 1 or 2")
    _require_alive(topo, node_id)
    adj = adjacency(topo)
    seen = set(adj[node_id])
    if hops == 2:
        for n in adj[node_id]:
            seen |= adj[n]
        seen.discard(node_id)
    return [NeighborEntry(i, topo.position(i), len(adj[i])) for i in sorted(seen)]


def _bfs_hops(adj: Mapping[int, Iterable[int]], source: int) -> dict[int, int]:
    hops = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in hops:
                hops[v] = hops[u] + 1
                queue.append(v)
    return hops


def _components(adj: Mapping[int, Iterable[int]]) -> list[frozenset[int]]:
    seen: set[int] = set()
    comps = []
    for s in sorted(adj):
        if s in seen:
            continue
        comp = frozenset(_bfs_hops(adj, s))
        seen |= comp
        comps.append(comp)
    return comps


def connected_components(topo: Topology) -> list[frozenset[int]]:
    """Components of the live graph, ordered by their smallest id."""
    return _components(adjacency(topo))


def articulation_points(topo: Topology) -> frozenset[int]:
    """All cut vertices of the live graph (iterative Hopcroft-Tarjan)."""
    return _articulation_points(adjacency(topo))


def _articulation_points(adj: Mapping[int, Iterable[int]]) -> frozenset[int]:
    disc: dict[int, int] = {}
    low: dict[int, int] = {}
    cuts: set[int] = set()
    clock = 0
    for root in sorted(adj):
        if root in disc:
            continue
        disc[root] = low[root] = clock
        clock += 1
        root_children = 0
        stack = [(root, -1, iter(sorted(adj[root])))]
        while stack:
            u, parent, it = stack[-1]
            for v in it:
                if v not in disc:
                    disc[v] = low[v] = clock
                    clock += 1
                    if u == root:
                        root_children += 1
                    stack.append((v, u, iter(sorted(adj[v]))))
                    break
                if v != parent:
                    low[u] = min(low[u], disc[v])
            else:
                stack.pop()
                if stack:
                    p = stack[-1][0]
                    low[p] = min(low[p], low[u])
                    if p != root and low[u] >= disc[p]:
                        cuts.add(p)
        if root_children > 1:
            cuts.add(root)
    return frozenset(cuts)


def is_cut_vertex(topo: Topology, node_id: int) -> bool:
    _require_alive(topo, node_id)
    if len(connected_components(topo)) > 1:
        raise DisconnectedError("cut-vertex test needs a connected live graph")
    return node_id in articulation_points(topo)


def blocks_after_removal(topo: Topology, failed: int) -> list[frozenset[int]]:
    """Disjoint blocks left behind once ``failed`` is gone."""
    topo.node(failed)
    adj = adjacency(topo)
    rest = {u: [v for v in vs if v != failed] for u, vs in adj.items() if u != failed}
    return _components(rest)


def smallest_block(blocks: Iterable[frozenset[int]]) -> frozenset[int]:
    bs = [b for b in blocks]
    if not bs:
        raise TopologyError("no blocks to choose from")
    return min(bs, key=lambda b: (len(b), min(b)))


@dataclass(frozen=True)
class ShortestPathTable:
    """All-pairs hop counts; ``None`` marks an unreachable pair."""

    hops: Mapping[int, Mapping[int, int]] = field(repr=False)

    def hop(self, i: int, j: int) -> int | None:
        if i not in self.hops:
            raise UnknownNodeError(f"node {i} not in table")
        if j not in self.hops:
            raise UnknownNodeError(f"node {j} not in table")
        return self.hops[i].get(j, UNREACHABLE)

    def reachable(self, i: int) -> frozenset[int]:
        return frozenset(self.hops[i])

    @property
    def nodes(self) -> list[int]:
        return sorted(self.hops)


UNREACHABLE = None


def shortest_path_table(topo: Topology) -> ShortestPathTable:
    adj = adjacency(topo)
    return ShortestPathTable({s: _bfs_hops(adj, s) for s in sorted(adj)})


def is_biconnected(topo: Topology) -> bool:
    if len(topo.live_ids) < 3:
        raise TopologyError("biconnectivity needs at least 3 live nodes")
    return len(connected_components(topo)) == 1 and not articulation_points(topo)


def average_degree(topo: Topology) -> float:
    adj = adjacency(topo)
    if not adj:
        return 0.0
    return sum(len(v) for v in adj.values()) / len(adj)
