"""Election with a winner-declaration round.

An extended node wraps :func:`~ringactors.election.node` without changing
it: the actor accepts any payload and downcasts itself, delegating ``Msg``
values to the plain node and handling the new ``Winner`` message on its own.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .election import (
    ElectionOutcome,
    Member,
    Msg,
    Nominate,
    NodeState,
    UnhandledMessage,
    Uninitialized,
    node,
    ring_election,
)
from .permute import Rng
from .runtime import (
    ActorId,
    Completion,
    Envelope,
    MemoryTrace,
    Runtime,
    message,
    reject,
    say,
    self_id,
    send,
)


@message
@dataclass(frozen=True)
class Winner:
    declared: ActorId

    def __str__(self) -> str:
        return f"Winner ({self.declared})"


@dataclass(frozen=True)
class ExnodeState:
    node: NodeState
    greatest: ActorId


def exnode(state: ExnodeState, env: Envelope) -> ExnodeState:
    me = self_id()
    match env.message:
        case Msg() as m:
            inner = node(state.node, env)
            if not isinstance(inner, Member):
                raise UnhandledMessage("exnode: unhandled")
            if isinstance(m, Nominate):
                if m.nominee == me:
                    # election over: start the declaration round
                    send(inner.next, Winner(me))
                    return ExnodeState(inner, state.greatest)
                return ExnodeState(inner, max(m.nominee, state.greatest))
            return ExnodeState(inner, state.greatest)
        case Winner(declared=w):
            if not isinstance(state.node, Member):
                raise UnhandledMessage("exnode: unhandled")
            if w == me:
                say(f"{me}: Confirmed")
            elif w == state.greatest:
                send(state.node.next, Winner(w))
            else:
                say("Unexpected winner")
            return state
        case _:
            reject(env)
            return state


def confirming(done: Completion, intent: Callable = exnode) -> Callable:
    """Wrap ``intent`` so the confirmed winner puts its id into ``done``."""

    def bench_node(state: ExnodeState, env: Envelope) -> ExnodeState:
        new_state = intent(state, env)
        w = env.downcast(Winner)
        if w is not None and w.declared == self_id():
            done.put(w.declared)
        return new_state

    return bench_node


def _greatest_is_self(_: object) -> ExnodeState:
    return ExnodeState(Uninitialized(), self_id())


def spawn_exnode(rt: Runtime, intent: Callable = exnode) -> ActorId:
    return rt.spawn(intent, setup=_greatest_is_self)


def extended_election(
    rt: Runtime,
    n: int,
    rng: Rng | None = None,
    *,
    timeout: float = 30.0,
    settle: bool = True,
) -> ElectionOutcome:
    """Run an election plus declaration round and return its outcome.

    Blocks until the winner confirms itself; with ``settle`` it also waits for
    the stray nominations still circulating to die out, so the trace and the
    runtime's send counters are complete. The ring actors stay alive; stop
    them (or shut the runtime down) when done.
    """
    done = Completion()
    bench_node = confirming(done)
    ring = ring_election(rt, n, lambda r: spawn_exnode(r, bench_node), rng)
    winner = done.get(timeout)
    if settle and not rt.wait_idle(timeout):
        raise TimeoutError(f"ring did not go quiet within {timeout} s")
    events = tuple(rt.trace.lines) if isinstance(rt.trace, MemoryTrace) else ()
    return ElectionOutcome(winner, tuple(ring), events)
