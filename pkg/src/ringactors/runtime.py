"""A small actor runtime.

Actors are intent functions ``intent(state, envelope) -> state`` paired with an
unbounded FIFO mailbox. Actors are not threads: a pool of worker threads
(one by default) picks up actors whose mailbox became non-empty and runs
their intent one envelope at a time. An idle actor costs nothing but memory.

Inside an intent, the module-level helpers :func:`send`, :func:`self_id`,
:func:`spawn`, :func:`stop`, :func:`say` and :func:`reject` act on behalf of
the running actor. Outside an actor, use the :class:`Runtime` methods; sends
made from outside carry the runtime's client handle (:attr:`Runtime.client`)
as sender.
"""

from __future__ import annotations

import collections
import enum
import itertools
import logging
import queue
import sys
import threading
from dataclasses import dataclass
from typing import Any, Callable, Iterable, NamedTuple, TypeVar

log = logging.getLogger(__name__)

S = TypeVar("S")
Intent = Callable[[Any, "Envelope"], Any]

#: ``accepts`` value for actors that want every payload (they downcast themselves).
ANY: type = object


class RuntimeShutDown(RuntimeError):
    pass


class UnknownRecipient(LookupError):
    pass


class NotInActor(RuntimeError):
    """An in-actor helper was called outside of an intent invocation."""


class UnregisteredMessage(TypeError):
    pass


class ActorExit(Exception):
    """Raise from an intent to halt the actor normally."""


class ActorId:
    """Runtime-assigned actor identity.

    Ids are totally ordered by spawn order. The runtime only honours the exact
    objects it handed out, so an ``ActorId`` built by hand never addresses a
    live actor.
    """

    __slots__ = ("_value",)

    def __init__(self, value: int) -> None:
        self._value = value

    @property
    def value(self) -> int:
        return self._value

    def __eq__(self, other: object) -> bool:
        if isinstance(other, ActorId):
            return self._value == other._value
        return NotImplemented

    def __lt__(self, other: ActorId) -> bool:
        return self._value < other._value

    def __le__(self, other: ActorId) -> bool:
        return self._value <= other._value

    def __gt__(self, other: ActorId) -> bool:
        return self._value > other._value

    def __ge__(self, other: ActorId) -> bool:
        return self._value >= other._value

    def __hash__(self) -> int:
        return hash(self._value)

    def __str__(self) -> str:
        return f"ActorId {self._value}"

    __repr__ = __str__


# -- message registry --------------------------------------------------------


@dataclass(frozen=True)
class MessageType:
    tag: type
    name: str
    render: Callable[[Any], str]


_registry: dict[type, MessageType] = {}
_registry_lock = threading.Lock()


def register_message(
    cls: type, *, name: str | None = None, render: Callable[[Any], str] | None = None
) -> type:
    """Allow instances of ``cls`` (and subclasses) to travel in envelopes.

    ``name`` is used in type-mismatch reports, ``render`` in trace lines
    (defaults to ``str``).
    """
    entry = MessageType(cls, name or cls.__qualname__, render or str)
    with _registry_lock:
        _registry[cls] = entry
    return cls


def message(cls: type | None = None, *, name: str | None = None, render=None):
    """Class decorator form of :func:`register_message`."""

    def wrap(c: type) -> type:
        return register_message(c, name=name, render=render)

    return wrap if cls is None else wrap(cls)


def message_type(obj: Any) -> MessageType:
    tp = type(obj)
    entry = _registry.get(tp)
    if entry is not None:
        return entry
    for base in tp.__mro__[1:]:
        found = _registry.get(base)
        if found is not None:
            # subclasses report under their own name
            entry = MessageType(tp, tp.__qualname__, found.render)
            with _registry_lock:
                _registry[tp] = entry
            return entry
    raise UnregisteredMessage(f"{tp.__qualname__} is not a registered message type")


def render(obj: Any) -> str:
    return message_type(obj).render(obj)


class Envelope(NamedTuple):
    """A message together with the id of whoever sent it."""

    sender: ActorId
    message: Any

    def downcast(self, tp: type | tuple[type, ...]) -> Any:
        """Return the message if it is an instance of ``tp``, else ``None``."""
        return self.message if isinstance(self.message, tp) else None


# -- faults ------------------------------------------------------------------


class HaltReason(enum.Enum):
    NORMAL = "normal"
    STOPPED = "stopped"
    CRASHED = "crashed"


@dataclass(frozen=True)
class Fault:
    """Base for notifications generated by the runtime itself."""


@dataclass(frozen=True)
class TypeMismatch(Fault):
    offending_type_name: str
    recipient: ActorId

    def __str__(self) -> str:
        return f'TypeError "{self.recipient} cannot accept {self.offending_type_name}"'


@dataclass(frozen=True)
class Halted(Fault):
    actor: ActorId
    reason: HaltReason
    error: str | None = None

    def __str__(self) -> str:
        detail = f" ({self.error})" if self.error else ""
        return f"Halted {self.actor} {self.reason.value}{detail}"


register_message(Fault)


# -- trace sinks -------------------------------------------------------------


class MemoryTrace:
    """Trace sink that keeps lines in memory."""

    def __init__(self) -> None:
        self.lines: list[str] = []

    def __call__(self, line: str) -> None:
        self.lines.append(line)

    def clear(self) -> None:
        self.lines.clear()


def print_trace(line: str) -> None:
    """Trace sink writing each line to stdout and flushing it."""
    sys.stdout.write(line + "\n")
    sys.stdout.flush()


# -- write-once cell ---------------------------------------------------------


class Completion:
    """Single-assignment cell, readable from any thread."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._event = threading.Event()
        self._value: Any = None

    def put(self, value: Any) -> None:
        with self._lock:
            if self._event.is_set():
                raise RuntimeError(f"completion already holds {self._value!r}")
            self._value = value
            self._event.set()

    def done(self) -> bool:
        return self._event.is_set()

    def get(self, timeout: float | None = None) -> Any:
        if not self._event.wait(timeout):
            raise TimeoutError(f"no completion within {timeout} s")
        return self._value


# -- runtime -----------------------------------------------------------------

_local = threading.local()


class _Actor:
    __slots__ = (
        "id", "intent", "state", "accepts", "mailbox",
        "scheduled", "stopping", "halted", "halt", "observers",
    )

    def __init__(self, aid: ActorId, intent: Intent, state: Any, accepts) -> None:
        self.id = aid
        self.intent = intent
        self.state = state
        self.accepts = accepts
        self.mailbox: collections.deque[Envelope] = collections.deque()
        self.scheduled = False
        self.stopping = False
        self.halted = False
        self.halt: Halted | None = None
        self.observers: list[ActorId] = []


class Runtime:
    """Registry of actors plus the worker threads that run them.

    ``trace`` is an optional callable receiving one line per send (and per
    :func:`say`). ``throughput`` bounds how many envelopes one actor handles
    before yielding its worker to other ready actors.
    """

    def __init__(
        self,
        *,
        workers: int = 1,
        trace: Callable[[str], None] | None = None,
        throughput: int = 64,
    ) -> None:
        if workers < 1:
            raise ValueError("need at least one worker")
        self.trace = trace
        self.throughput = throughput
        self.sent: collections.Counter[str] = collections.Counter()
        self._lock = threading.Lock()
        self._changed = threading.Condition(self._lock)
        self._ids = itertools.count(1)
        self._actors: dict[int, _Actor] = {}
        self._live = 0
        self._pending = 0
        self._closed = False
        self._ready: queue.SimpleQueue[_Actor | None] = queue.SimpleQueue()
        self._inbox: queue.SimpleQueue[Envelope] = queue.SimpleQueue()
        self.client = ActorId(next(self._ids))
        self._workers = [
            threading.Thread(target=self._work, name=f"actor-worker-{i}", daemon=True)
            for i in range(workers)
        ]
        for t in self._workers:
            t.start()

    def __enter__(self) -> Runtime:
        return self

    def __exit__(self, *exc) -> None:
        self.shutdown()

    # public API

    @property
    def live_count(self) -> int:
        """Number of actors that have not halted."""
        return self._live

    @property
    def worker_count(self) -> int:
        return sum(t.is_alive() for t in self._workers)

    @property
    def total_sent(self) -> int:
        return sum(self.sent.values())

    @property
    def closed(self) -> bool:
        return self._closed

    def spawn(
        self,
        intent: Intent,
        state: Any = None,
        *,
        accepts: type | tuple[type, ...] = ANY,
        setup: Callable[[Any], Any] | None = None,
    ) -> ActorId:
        """Create an actor and return its id.

        The mailbox exists before this returns, so nothing sent afterwards is
        lost. ``accepts`` is the message type the intent handles; anything
        else is returned to its sender as a :class:`TypeMismatch`. ``setup``
        runs once, in the new actor's context, and maps ``state`` to the
        initial state (use it when the state needs :func:`self_id`).
        """
        with self._lock:
            if self._closed:
                raise RuntimeShutDown("runtime is shut down")
            aid = ActorId(next(self._ids))
            actor = _Actor(aid, intent, state, accepts)
            self._actors[aid._value] = actor
            self._live += 1
        if setup is not None:
            prev = getattr(_local, "frame", None)
            _local.frame = (self, actor)
            try:
                actor.state = setup(state)
            except Exception as exc:
                with self._lock:
                    self._halt_locked(actor, HaltReason.CRASHED, _describe(exc))
                raise
            finally:
                _local.frame = prev
        return aid

    def send(self, to: ActorId, msg: Any, *, sender: ActorId | None = None) -> None:
        """Enqueue ``msg`` for ``to`` and return immediately.

        Sending to an actor that has halted is silently dropped.
        """
        frame = getattr(_local, "frame", None)
        in_actor = frame is not None and frame[0] is self
        if sender is None:
            sender = frame[1].id if in_actor else self.client
        mt = message_type(msg)
        env = Envelope(sender, msg)
        with self._lock:
            if self._closed:
                if in_actor:
                    return
                raise RuntimeShutDown("runtime is shut down")
            if sender is not self.client:
                self._lookup_locked(sender)
            target = None if to is self.client else self._lookup_locked(to)
            self.sent[mt.name] += 1
            if self.trace is not None:
                self.trace(f"{sender} send {mt.render(msg)} to {to}")
            self._deliver_locked(target, env)

    def stop(self, target: ActorId) -> None:
        """Halt ``target`` before it processes any further envelope.

        Queued envelopes are discarded. Stopping a halted actor does nothing.
        """
        with self._lock:
            actor = self._lookup_locked(target)
            self._stop_locked(actor)

    def on_halt(self, target: ActorId, observer: ActorId) -> None:
        """Deliver a :class:`Halted` fault to ``observer`` when ``target`` halts.

        If ``target`` already halted the notification is sent right away.
        """
        with self._lock:
            actor = self._lookup_locked(target)
            if observer is not self.client:
                self._lookup_locked(observer)
            if actor.halted:
                self._notify_locked(observer, actor.halt)
            else:
                actor.observers.append(observer)

    def halt_info(self, target: ActorId) -> Halted | None:
        """The halt record of ``target``, or ``None`` while it is alive."""
        with self._lock:
            return self._lookup_locked(target).halt

    def receive(self, timeout: float | None = None) -> Envelope:
        """Take the next envelope addressed to :attr:`client`.

        Raises ``queue.Empty`` on timeout.
        """
        return self._inbox.get(timeout=timeout)

    def wait_idle(self, timeout: float | None = None) -> bool:
        """Block until every mailbox is empty and no intent is running."""
        with self._changed:
            return self._changed.wait_for(lambda: self._pending == 0, timeout)

    def emit(self, line: str) -> None:
        if self.trace is not None:
            self.trace(line)

    def shutdown(self) -> None:
        """Stop every actor, wait for them, and retire the workers.

        Called from inside an intent it only requests the stop, since the
        calling actor cannot wait on itself.
        """
        frame = getattr(_local, "frame", None)
        in_actor = frame is not None and frame[0] is self
        with self._changed:
            self._closed = True
            for actor in list(self._actors.values()):
                if not actor.halted:
                    self._stop_locked(actor)
            if in_actor:
                return
            self._changed.wait_for(lambda: self._live == 0)
        workers, self._workers = self._workers, []
        for _ in workers:
            self._ready.put(None)
        for t in workers:
            t.join()

    # internals; everything named *_locked expects self._lock to be held

    def _lookup_locked(self, aid: ActorId) -> _Actor:
        actor = self._actors.get(aid._value) if isinstance(aid, ActorId) else None
        if actor is None or actor.id is not aid:
            raise UnknownRecipient(f"{aid!r} is not an actor of this runtime")
        return actor

    def _deliver_locked(self, actor: _Actor | None, env: Envelope) -> None:
        if actor is None:
            self._inbox.put(env)
            return
        if actor.halted:
            return
        actor.mailbox.append(env)
        self._pending += 1
        if not actor.scheduled:
            actor.scheduled = True
            self._ready.put(actor)

    def _notify_locked(self, to: ActorId, fault: Fault) -> None:
        sender = fault.actor if isinstance(fault, Halted) else fault.recipient
        target = None if to is self.client else self._actors[to._value]
        self._deliver_locked(target, Envelope(sender, fault))

    def _stop_locked(self, actor: _Actor) -> None:
        if actor.halted:
            return
        if actor.scheduled:
            actor.stopping = True
        else:
            self._halt_locked(actor, HaltReason.STOPPED)

    def _halt_locked(self, actor: _Actor, reason: HaltReason, error: str | None = None) -> None:
        actor.halted = True
        actor.scheduled = False
        actor.halt = Halted(actor.id, reason, error)
        self._pending -= len(actor.mailbox)
        actor.mailbox.clear()
        self._live -= 1
        observers, actor.observers = actor.observers, []
        actor.intent = actor.state = None
        for obs in observers:
            self._notify_locked(obs, actor.halt)
        self._changed.notify_all()

    def _work(self) -> None:
        ready = self._ready
        while True:
            actor = ready.get()
            if actor is None:
                return
            _local.frame = (self, actor)
            try:
                self._activate(actor)
            finally:
                _local.frame = None

    def _activate(self, actor: _Actor) -> None:
        lock = self._lock
        finished = False
        for _ in range(self.throughput):
            with lock:
                if finished:
                    self._pending -= 1
                    if self._pending == 0:
                        self._changed.notify_all()
                if actor.halted:
                    return
                if actor.stopping:
                    self._halt_locked(actor, HaltReason.STOPPED)
                    return
                if not actor.mailbox:
                    actor.scheduled = False
                    return
                env = actor.mailbox.popleft()
            self._process(actor, env)
            finished = True
        with lock:
            self._pending -= 1
            if self._pending == 0:
                self._changed.notify_all()
            if actor.halted:
                return
            if actor.mailbox or actor.stopping:
                self._ready.put(actor)
            else:
                actor.scheduled = False

    def _process(self, actor: _Actor, env: Envelope) -> None:
        msg = env.message
        if actor.accepts is not ANY and not isinstance(msg, actor.accepts):
            self._return_to_sender(actor.id, env)
            return
        try:
            actor.state = actor.intent(actor.state, env)
        except ActorExit:
            with self._lock:
                self._halt_locked(actor, HaltReason.NORMAL)
        except Exception as exc:
            log.warning("%s crashed", actor.id, exc_info=True)
            with self._lock:
                self._halt_locked(actor, HaltReason.CRASHED, _describe(exc))

    def _return_to_sender(self, recipient: ActorId, env: Envelope) -> None:
        msg = env.message
        if isinstance(msg, Fault):
            # never answer a fault with a fault
            log.info("%s dropped unhandled %s", recipient, msg)
            return
        fault = TypeMismatch(message_type(msg).name, recipient)
        with self._lock:
            if self._closed and env.sender is not self.client:
                return
            self._notify_locked(env.sender, fault)


def _describe(exc: BaseException) -> str:
    return f"{type(exc).__name__}: {exc}"


# -- in-actor helpers --------------------------------------------------------


def _frame() -> tuple[Runtime, _Actor]:
    frame = getattr(_local, "frame", None)
    if frame is None:
        raise NotInActor("only available inside an intent")
    return frame


def current_runtime() -> Runtime:
    return _frame()[0]


def self_id() -> ActorId:
    return _frame()[1].id


def send(to: ActorId, msg: Any) -> None:
    rt, actor = _frame()
    rt.send(to, msg, sender=actor.id)


def spawn(intent: Intent, state: Any = None, **kwargs) -> ActorId:
    return _frame()[0].spawn(intent, state, **kwargs)


def stop(target: ActorId) -> None:
    _frame()[0].stop(target)


def say(line: str) -> None:
    """Write an event line to the runtime's trace sink, if any."""
    _frame()[0].emit(line)


def reject(env: Envelope) -> None:
    """Return ``env`` to its sender as a type mismatch.

    For intents that accept :data:`ANY` and find a payload they cannot use.
    Faults are dropped instead, so two actors never bounce faults forever.
    """
    rt, actor = _frame()
    rt._return_to_sender(actor.id, env)


def stop_all(rt: Runtime, ids: Iterable[ActorId]) -> None:
    for aid in ids:
        rt.stop(aid)
