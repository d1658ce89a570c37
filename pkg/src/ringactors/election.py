"""Chang-Roberts ring leader election on top of the actor runtime.

Each node starts uninitialized, learns its successor from an ``Init``
message, nominates itself on ``Start`` and forwards any nomination larger
than itself. The node whose own nomination comes back has won.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

from .permute import Rng, permute
from .runtime import ActorId, Envelope, Runtime, message, say, self_id, send


class InvalidRingSize(ValueError):
    pass


class UnhandledMessage(RuntimeError):
    """A node got a message it has no case for; the actor crashes with it."""


class Msg:
    """Base class of the three election messages."""

    __slots__ = ()


@message
@dataclass(frozen=True)
class Init(Msg):
    next: ActorId

    def __str__(self) -> str:
        return f"Init {{next = {self.next}}}"


@message
@dataclass(frozen=True)
class Start(Msg):
    def __str__(self) -> str:
        return "Start"


@message
@dataclass(frozen=True)
class Nominate(Msg):
    nominee: ActorId

    def __str__(self) -> str:
        return f"Nominate {{nominee = {self.nominee}}}"


@dataclass(frozen=True)
class Uninitialized:
    pass


@dataclass(frozen=True)
class Member:
    next: ActorId


NodeState = Union[Uninitialized, Member]


@dataclass(frozen=True)
class ElectionOutcome:
    winner: ActorId
    ring: tuple[ActorId, ...]
    events: tuple[str, ...] = ()

    @property
    def winner_index(self) -> int:
        return self.ring.index(self.winner)


def node(state: NodeState, env: Envelope) -> NodeState:
    match state, env.message:
        case Uninitialized(), Init(next=successor):
            return Member(successor)
        case Member(next=successor), Start():
            send(successor, Nominate(self_id()))
            return state
        case Member(next=successor), Nominate(nominee=nom):
            me = self_id()
            if me == nom:
                say(f"{me}: I win")
            elif me < nom:
                send(successor, Nominate(nom))
            else:
                say("Ignored nomination")
            return state
    raise UnhandledMessage("node: unhandled")


def spawn_node(rt: Runtime) -> ActorId:
    return rt.spawn(node, Uninitialized(), accepts=Msg)


def ring_election(
    rt: Runtime,
    n: int,
    spawn_one: Callable[[Runtime], ActorId] = spawn_node,
    rng: Rng | None = None,
) -> list[ActorId]:
    """Spawn ``n`` nodes, link them in random order and start the election.

    Returns the ring in successor order. Inits are all sent before any Start,
    and per-sender FIFO delivery keeps them ahead of the Starts.
    """
    if n < 2:
        raise InvalidRingSize(f"a ring needs at least 2 nodes, got {n}")
    nodes = [spawn_one(rt) for _ in range(n)]
    ring, _ = permute(nodes, rng if rng is not None else Rng.from_entropy())
    for t, successor in zip(ring, ring[1:] + ring[:1]):
        rt.send(t, Init(successor))
    for t in ring:
        rt.send(t, Start())
    return ring
