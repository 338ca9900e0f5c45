"""The four recovery schemes.

Every function takes the pre-failure snapshot plus the event returned by
:func:`detect_failure` and returns a :class:`RecoveryReport`. Protocol
decisions only use what a node could know locally (neighbour tables, and
the routing table for LeDiR); global graph checks are used to classify
the failure and to fill in the ``recovered`` flag.
"""

from __future__ import annotations

from dataclasses import replace

from ..geometry import approach
from ..topology import (
    Topology,
    adjacency,
    articulation_points,
    is_biconnected,
    shortest_path_table,
    smallest_block,
)
from .engine import (
    elect,
    finish,
    follow_cascade,
    replacement_cascade,
    round_limit,
    splits_network,
    start_log,
)
from .model import (
    Cause,
    EngineParams,
    FailureEvent,
    MessageKind,
    PreconditionError,
    RecoveryReport,
    Strategy,
)


def _surviving_links(pre: Topology, failed: int) -> dict[int, set[int]]:
    return {u: set(vs) - {failed} for u, vs in adjacency(pre).items() if u != failed}


def rim_recover(pre: Topology, event: FailureEvent, params: EngineParams | None = None) -> RecoveryReport:
    """Recovery through inward motion.

    Each neighbour of the failed node moves straight toward its spot until
    it is r/2 away, so all neighbours end up mutually in range. Nodes that
    lose a link to a mover follow it in turn.
    """
    f = event.failed
    after, log = start_log(pre, f)
    if not splits_network(pre, f):
        return finish(Strategy.RIM, pre, event, log, note="non-critical failure")
    r = pre.comm_range
    nbrs = sorted(event.detected_by)
    for n in nbrs:
        log.move(n, approach(log.positions[n], event.position, r / 2), Cause.INWARD_MOTION)
    follow_cascade(
        log,
        _surviving_links(pre, f),
        settled=set(nbrs),
        movable=after.live_ids,
        reach=r,
        limit=round_limit(pre, params),
        notice=MessageKind.MOVING,
    )
    return finish(Strategy.RIM, pre, event, log)


def dara1c_recover(pre: Topology, event: FailureEvent, params: EngineParams | None = None) -> RecoveryReport:
    f = event.failed
    after, log = start_log(pre, f)
    if not splits_network(pre, f):
        return finish(Strategy.DARA1C, pre, event, log, note="non-critical failure")
    bc = elect(pre, f, event.detected_by)
    replacement_cascade(log, after, bc, event.position, round_limit(pre, params))
    return finish(Strategy.DARA1C, pre, event, log)


def dara2c_recover(pre: Topology, event: FailureEvent, params: EngineParams | None = None) -> RecoveryReport:
    """Restore 2-connectivity by moving the best boundary neighbour into the
    failed spot. Failure leaves the report with ``recovered=False`` and the
    cut vertices that remain.
    """
    f = event.failed
    if len(pre.live_ids) < 3 or not is_biconnected(pre):
        raise PreconditionError("DARA-2C needs a biconnected pre-failure topology")
    after, log = start_log(pre, f)
    if len(after.live_ids) < 3:
        return finish(Strategy.DARA2C, pre, event, log, recovered=False,
                      note="fewer than 3 survivors; 2-connectivity unattainable")
    affected = articulation_points(after)
    if not affected:
        return finish(Strategy.DARA2C, pre, event, log, recovered=True, note="still 2-connected")
    bc = elect(pre, f, event.detected_by)
    replacement_cascade(log, after, bc, event.position, round_limit(pre, params))
    report = finish(Strategy.DARA2C, pre, event, log, recovered=False)
    residual = articulation_points(report.post_topology)
    ok = is_biconnected(report.post_topology)
    return replace(report, recovered=ok, residual_cut_vertices=tuple(sorted(residual)))


def ledir_recover(pre: Topology, event: FailureEvent, params: EngineParams | None = None) -> RecoveryReport:
    """Least-disruptive repair: only the smallest block moves.

    Neighbours of the failed node read their routing tables (with the
    failed node removed) to see which of them can still reach each other.
    The gateway of the smallest block takes over the failed spot and the
    rest of the block follows so that every link it had survives.
    """
    f = event.failed
    after, log = start_log(pre, f)
    nbrs = sorted(event.detected_by)
    srt = shortest_path_table(after)
    blocks = list({srt.reachable(n) for n in nbrs})
    if len(blocks) <= 1:
        return finish(Strategy.LEDIR, pre, event, log, note="non-critical failure")
    block = smallest_block(blocks)
    gateways = [n for n in nbrs if n in block]
    j = elect(pre, f, gateways)

    links = _surviving_links(pre, f)
    # the gateway inherits every link the failed node had
    for n in nbrs:
        if n != j:
            links[j].add(n)
            links[n].add(j)
    log.move(j, event.position, Cause.REPLACE_FAILED)
    follow_cascade(
        log,
        links,
        settled={j},
        movable=block,
        reach=pre.comm_range,
        limit=round_limit(pre, params),
        notice=MessageKind.NOTIFY_CHILD,
    )
    return finish(Strategy.LEDIR, pre, event, log)


STRATEGIES = {
    Strategy.RIM: rim_recover,
    Strategy.DARA1C: dara1c_recover,
    Strategy.DARA2C: dara2c_recover,
    Strategy.LEDIR: ledir_recover,
}
