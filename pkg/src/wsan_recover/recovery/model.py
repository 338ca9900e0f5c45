from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Optional

from ..geometry import Position, distance
from ..topology import Topology


class RecoveryError(RuntimeError):
    """The engine could not finish a cascade; indicates a bug, not an outcome."""


class PreconditionError(ValueError):
    pass


class Strategy(str, enum.Enum):
    RIM = "RIM"
    DARA1C = "DARA1C"
    DARA2C = "DARA2C"
    LEDIR = "LEDIR"

    @classmethod
    def parse(cls, name: "str | Strategy") -> "Strategy":
        if isinstance(name, Strategy):
            return name
        try:
            return cls[name.upper().replace("-", "")]
        except KeyError:
            raise ValueError(f"unknown strategy {name!r}") from None


class MessageKind(str, enum.Enum):
    HELLO = "HELLO"
    HEARTBEAT = "HEARTBEAT"
    MOVING = "MOVING"
    RECOVERED = "RECOVERED"
    NOTIFY_CHILD = "NOTIFY_CHILD"


class Cause(str, enum.Enum):
    REPLACE_FAILED = "REPLACE_FAILED"
    CASCADE_CHILD = "CASCADE_CHILD"
    INWARD_MOTION = "INWARD_MOTION"


BROADCAST = None


@dataclass(frozen=True)
class Message:
    kind: MessageKind
    sender: int
    order: int
    scope: Optional[int] = BROADCAST  # None means 1-hop broadcast, else unicast target
    payload: Optional[Position] = None

    def __post_init__(self):
        if self.kind in (MessageKind.MOVING, MessageKind.NOTIFY_CHILD) and self.payload is None:
            raise ValueError(f"{self.kind.value} must carry the intended destination")


@dataclass(frozen=True)
class FailureEvent:
    failed: int
    position: Position
    detected_by: frozenset[int]
    missed_heartbeats: int = 0


@dataclass(frozen=True)
class Relocation:
    node: int
    start: Position
    end: Position
    cause: Cause
    order: int

    @property
    def distance(self) -> float:
        return distance(self.start, self.end)


@dataclass(frozen=True)
class CandidateRank:
    id: int
    degree: int
    dist_to_failed: float

    def sort_key(self):
        return (self.degree, self.dist_to_failed, -self.id)


@dataclass(frozen=True)
class EngineParams:
    heartbeat_misses: int = 3
    round_limit: Optional[int] = None  # defaults to the node count

    def __post_init__(self):
        if self.heartbeat_misses < 1:
            raise ValueError("heartbeat_misses must be a positive integer")
        if self.round_limit is not None and self.round_limit < 1:
            raise ValueError("round_limit must be positive")


@dataclass(frozen=True)
class RecoveryReport:
    algorithm: Strategy
    event: FailureEvent
    relocations: tuple[Relocation, ...]
    messages: tuple[Message, ...]
    pre_topology: Topology
    post_topology: Topology
    recovered: bool
    residual_cut_vertices: tuple[int, ...] = ()
    note: str = ""

    @property
    def failed(self) -> int:
        return self.event.failed

    @property
    def relocated_nodes(self) -> frozenset[int]:
        return frozenset(r.node for r in self.relocations)

    def events(self) -> list[Message | Relocation]:
        """Messages and relocations interleaved in the order they happened."""
        merged: Iterable[Message | Relocation] = (*self.messages, *self.relocations)
        return sorted(merged, key=lambda e: e.order)


@dataclass
class _Log:
    """Mutable scratch state for one recovery run."""

    positions: dict[int, Position]
    relocations: list[Relocation] = field(default_factory=list)
    messages: list[Message] = field(default_factory=list)
    clock: int = 0

    def _tick(self) -> int:
        self.clock += 1
        return self.clock - 1

    def send(self, kind: MessageKind, sender: int, payload: Position | None = None, scope=BROADCAST):
        self.messages.append(Message(kind, sender, self._tick(), scope, payload))

    def move(self, node: int, dest: Position, cause: Cause, notice: MessageKind = MessageKind.MOVING):
        """Announce, relocate and confirm; a zero-length move is not recorded."""
        start = self.positions[node]
        if start == dest:
            return False
        self.send(notice, node, dest)
        self.relocations.append(Relocation(node, start, dest, cause, self._tick()))
        self.positions[node] = dest
        self.send(MessageKind.RECOVERED, node)
        return True
