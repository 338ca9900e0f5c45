"""Brute-force oracles shared by the test modules.

These deliberately avoid the package's own adjacency/BFS code: edges come
from raw coordinates and reachability from Floyd-Warshall or repeated
union-find, so they can cross-check the production paths.
"""

import math
import random

import pytest

from wsan_recover.geometry import EPS_GEOM
from wsan_recover.topology import Topology


def raw_edges(topo, skip=()):
    live = [n for n in topo.nodes if n.alive and n.id not in skip]
    edges = set()
    for i, a in enumerate(live):
        for b in live[i + 1:]:
            d = math.sqrt((a.position.x - b.position.x) ** 2 + (a.position.y - b.position.y) ** 2)
            if d <= topo.comm_range + EPS_GEOM:
                edges.add((a.id, b.id))
    return [n.id for n in live], edges


def oracle_components(topo, skip=()):
    ids, edges = raw_edges(topo, skip)
    parent = {i: i for i in ids}

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for a, b in edges:
        parent[find(a)] = find(b)
    groups = {}
    for i in ids:
        groups.setdefault(find(i), set()).add(i)
    return sorted((frozenset(g) for g in groups.values()), key=min)


def oracle_is_cut(topo, v):
    return len(oracle_components(topo, skip=(v,))) > len(oracle_components(topo))


def oracle_hops(topo):
    ids, edges = raw_edges(topo)
    inf = math.inf
    d = {(i, j): (0 if i == j else inf) for i in ids for j in ids}
    for a, b in edges:
        d[a, b] = d[b, a] = 1
    for k in ids:
        for i in ids:
            dik = d[i, k]
            if dik == inf:
                continue
            for j in ids:
                if dik + d[k, j] < d[i, j]:
                    d[i, j] = dik + d[k, j]
    return d


def random_topology(rng, n, side=10.0, r=3.0):
    return Topology.from_points([(rng.uniform(0, side), rng.uniform(0, side)) for _ in range(n)], r)


@pytest.fixture
def line3():
    return Topology.from_points([(0, 0), (2, 0), (4, 0)], 2)


@pytest.fixture
def rng():
    return random.Random(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
