"""Shared machinery: failure detection, best-candidate election and the two
cascade styles (follow-the-parent and fill-the-vacated-spot).
"""

from __future__ import annotations

from itertools import combinations
from typing import Collection, Iterable, Mapping

from ..geometry import (
    Position,
    approach,
    circle_intersections,
    closest_point,
    closest_point_in_disks,
    distance,
    within,
)
from ..topology import (
    Topology,
    adjacency,
    blocks_after_removal,
    connected_components,
    neighbor_table,
)
from .model import (
    Cause,
    CandidateRank,
    EngineParams,
    FailureEvent,
    MessageKind,
    RecoveryError,
    RecoveryReport,
    Strategy,
    _Log,
)


def detect_failure(topo: Topology, failed: int, heartbeat_misses: int = 3) -> FailureEvent:
    """Neighbours of ``failed`` notice the missing heartbeats.

    The absent heartbeats are tallied on the event but never counted as
    sent messages.
    """
    node = topo.node(failed)
    if not node.alive:
        raise ValueError(f"node {failed} has already failed")
    if heartbeat_misses < 1:
        raise ValueError("heartbeat_misses must be a positive integer")
    detectors = adjacency(topo)[failed]
    return FailureEvent(failed, node.position, detectors, heartbeat_misses * len(detectors))


def select_best_candidate(candidates: Iterable[CandidateRank]) -> int:
    """Least degree, then closest to the failed spot, then highest id."""
    ranks = list(candidates)
    if not ranks:
        raise ValueError("no candidates to choose from")
    return min(ranks, key=CandidateRank.sort_key).id


def local_candidates(pre: Topology, viewer: int, failed: int) -> list[CandidateRank]:
    """Candidate list as ``viewer`` builds it from its own 2-hop table.

    The failed node's neighbours sit two hops from the viewer (through the
    failed node), so the 2-hop table holds their degree and position.
    """
    fpos = pre.position(failed)
    own = CandidateRank(viewer, len(adjacency(pre)[viewer]), distance(pre.position(viewer), fpos))
    out = [own]
    for e in neighbor_table(pre, viewer, hops=2):
        if e.id != failed and pre.linked(e.position, fpos):
            out.append(CandidateRank(e.id, e.degree, distance(e.position, fpos)))
    return out


def elect(pre: Topology, failed: int, pool: Collection[int]) -> int:
    """Every node in ``pool`` runs the election on its own view; all must agree."""
    winners = set()
    for viewer in sorted(pool):
        view = [c for c in local_candidates(pre, viewer, failed) if c.id in pool]
        winners.add(select_best_candidate(view))
    if len(winners) != 1:
        raise RecoveryError(f"neighbours disagree on the best candidate: {sorted(winners)}")
    return winners.pop()


def splits_network(pre: Topology, failed: int) -> bool:
    """True when the failed node's neighbours end up in different blocks."""
    nbrs = adjacency(pre)[failed]
    if not nbrs:
        return False
    blocks = blocks_after_removal(pre, failed)
    return sum(1 for b in blocks if b & nbrs) > 1


def start_log(pre: Topology, failed: int) -> tuple[Topology, _Log]:
    after = pre.with_failed(failed)
    return after, _Log(after.positions())


def round_limit(pre: Topology, params: EngineParams | None) -> int:
    if params is not None and params.round_limit is not None:
        return params.round_limit
    return len(pre.nodes)


def finish(
    strategy: Strategy,
    pre: Topology,
    event: FailureEvent,
    log: _Log,
    recovered: bool | None = None,
    residual: Iterable[int] = (),
    note: str = "",
) -> RecoveryReport:
    post = pre.with_failed(event.failed).with_positions(
        {r.node: log.positions[r.node] for r in log.relocations}
    )
    if recovered is None:
        recovered = restored_connectivity(pre, post, event.failed)
    return RecoveryReport(
        algorithm=strategy,
        event=event,
        relocations=tuple(log.relocations),
        messages=tuple(log.messages),
        pre_topology=pre,
        post_topology=post,
        recovered=recovered,
        residual_cut_vertices=tuple(sorted(residual)),
        note=note,
    )


def restored_connectivity(pre: Topology, post: Topology, failed: int) -> bool:
    """Post-recovery component count is back to the pre-failure level.

    An isolated failed node takes its own component with it.
    """
    before = len(connected_components(pre))
    if not adjacency(pre).get(failed):
        before -= 1
    return len(connected_components(post)) <= before


# ---------------------------------------------------------------------------
# follow-the-parent cascade (inward motion and block movement)


def follow_destination(
    start: Position, lost: list[Position], parents: list[Position], reach: float
) -> Position:
    """Where a child goes to rejoin its moved parents.

    One lost parent: straight approach until exactly ``reach`` away.
    Several: the closest point where two parents' range circles cross.
    Either way the spot has to stay within range of every settled parent;
    otherwise the nearest point common to all their disks is used.
    """
    def keeps_all(p: Position) -> bool:
        return all(within(p, c, reach) for c in parents)

    if len(lost) == 1:
        p = approach(start, lost[0], reach)
        if keeps_all(p):
            return p
    else:
        pts = [q for a, b in combinations(sorted(set(lost)), 2) for q in circle_intersections(a, b, reach)]
        pts = [q for q in pts if keeps_all(q)]
        if pts:
            return closest_point(pts, start)
    p = closest_point_in_disks(start, parents, reach)
    if p is not None:
        return p
    # no spot reaches every parent: keep as many of the links as possible
    cands = [approach(start, c, reach) for c in parents]
    cands += [q for a, b in combinations(sorted(set(parents)), 2) for q in circle_intersections(a, b, reach)]

    def score(q: Position):
        return (
            -sum(within(q, c, reach) for c in parents),
            distance(q, start),
            q.x,
            q.y,
        )

    return min(cands, key=score)


def follow_cascade(
    log: _Log,
    links: Mapping[int, Collection[int]],
    settled: set[int],
    movable: Collection[int],
    reach: float,
    limit: int,
    notice: MessageKind,
) -> int:
    """Pull unsettled nodes after their settled neighbours until no link is broken.

    ``links`` lists the links that have to survive. A node moves at most
    once; afterwards it is settled and later movers must respect it.
    Returns the number of rounds used.
    """
    pos = log.positions
    rounds = 0
    while True:
        broken = sorted(
            u
            for u in movable
            if u not in settled
            and any(v in settled and not within(pos[u], pos[v], reach) for v in links[u])
        )
        if not broken:
            return rounds
        rounds += 1
        if rounds > limit:
            raise RecoveryError(f"cascade did not settle within {limit} rounds")
        for u in broken:
            parents = sorted(v for v in links[u] if v in settled)
            lost = [pos[v] for v in parents if not within(pos[u], pos[v], reach)]
            dest = follow_destination(pos[u], lost, [pos[v] for v in parents], reach)
            log.move(u, dest, Cause.CASCADE_CHILD, notice)
            settled.add(u)


# ---------------------------------------------------------------------------
# fill-the-vacated-spot cascade (DARA)


def _current(base: Topology, log: _Log) -> Topology:
    return base.with_positions(log.positions)


def replacement_cascade(
    log: _Log, base: Topology, bc: int, dest: Position, limit: int
) -> int:
    """Move ``bc`` to ``dest``; any neighbour it strands elects a replacement
    for the spot it vacated, recursively. Nodes move at most once.

    ``base`` is the post-failure snapshot (failed node dead). Returns the
    number of rounds used.
    """
    moved: set[int] = set()
    mover, cause = bc, Cause.REPLACE_FAILED
    rounds = 0
    while True:
        rounds += 1
        if rounds > limit:
            raise RecoveryError(f"cascade did not settle within {limit} rounds")
        before = _current(base, log)
        vacated = log.positions[mover]
        old_nbrs = adjacency(before)[mover]
        log.move(mover, dest, cause)
        moved.add(mover)
        now = _current(base, log)
        detached = [v for v in sorted(old_nbrs) if v not in moved and not now.linked(now.position(v), dest)]
        if not detached:
            return rounds
        adj = adjacency(now)
        ranks = [CandidateRank(v, len(adj[v]), distance(now.position(v), vacated)) for v in detached]
        mover, dest, cause = select_best_candidate(ranks), vacated, Cause.CASCADE_CHILD
