from ..topology import Topology
from .engine import detect_failure, finish, local_candidates, select_best_candidate, start_log
from .model import (
    BROADCAST,
    CandidateRank,
    Cause,
    EngineParams,
    FailureEvent,
    Message,
    MessageKind,
    PreconditionError,
    RecoveryError,
    RecoveryReport,
    Relocation,
    Strategy,
)
from .strategies import STRATEGIES, dara1c_recover, dara2c_recover, ledir_recover, rim_recover


def run_recovery(
    topo: Topology,
    failed: int,
    strategy: "Strategy | str",
    params: EngineParams | None = None,
) -> RecoveryReport:
    """Fail ``failed`` in ``topo`` and let ``strategy`` repair the network."""
    params = params or EngineParams()
    strategy = Strategy.parse(strategy)
    event = detect_failure(topo, failed, params.heartbeat_misses)
    return STRATEGIES[strategy](topo, event, params)


def skipped_report(topo: Topology, failed: int, strategy: "Strategy | str", note: str) -> RecoveryReport:
    """No-op report for a strategy whose precondition the input does not meet."""
    strategy = Strategy.parse(strategy)
    event = detect_failure(topo, failed)
    _, log = start_log(topo, failed)
    return finish(strategy, topo, event, log, recovered=False, note=note)


__all__ = [
    "BROADCAST",
    "CandidateRank",
    "Cause",
    "EngineParams",
    "FailureEvent",
    "Message",
    "MessageKind",
    "PreconditionError",
    "RecoveryError",
    "RecoveryReport",
    "Relocation",
    "STRATEGIES",
    "Strategy",
    "dara1c_recover",
    "dara2c_recover",
    "detect_failure",
    "ledir_recover",
    "local_candidates",
    "rim_recover",
    "run_recovery",
    "select_best_candidate",
    "skipped_report",
]
