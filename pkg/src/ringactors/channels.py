"""The extended election again, built on asyncio tasks and queues.

No actor runtime is involved: every node is a task reading from the channel
of its predecessor and writing to the channel of its successor. Node
behaviour is split into a node part and an extended part, like the actor
version, so that the two implementations differ only in how they talk.
"""

from __future__ import annotations

import asyncio
import collections
from dataclasses import dataclass
from typing import Callable, NamedTuple, Union

from .election import Msg, Nominate, Start, UnhandledMessage
from .extended import Winner
from .permute import Rng, permute

ChMsg = Union[Msg, Winner]


class ElectionFailure(AssertionError):
    pass


class Token(int):
    """Identity of a channel node, handed out in spawn order."""

    def __str__(self) -> str:
        return f"ActorId {int(self)}"

    __repr__ = __str__


class Tally:
    """Counts channel writes and knows when the whole ring has gone quiet."""

    def __init__(self) -> None:
        self.writes: collections.Counter[str] = collections.Counter()
        self.outstanding = 0
        self.quiet = asyncio.Event()
        self.quiet.set()

    @property
    def total(self) -> int:
        return sum(self.writes.values())


class Channel:
    """Unbounded FIFO channel."""

    def __init__(self, tally: Tally) -> None:
        self._q: asyncio.Queue[ChMsg] = asyncio.Queue()
        self._tally = tally

    def write(self, m: ChMsg) -> None:
        t = self._tally
        t.writes[type(m).__name__] += 1
        t.outstanding += 1
        t.quiet.clear()
        self._q.put_nowait(m)

    async def read(self) -> ChMsg:
        return await self._q.get()

    def consumed(self) -> None:
        t = self._tally
        t.outstanding -= 1
        if t.outstanding == 0:
            t.quiet.set()


class ChanPair(NamedTuple):
    recv: Channel
    send: Channel


async def chan_node(
    done: asyncio.Future,
    chans: ChanPair,
    me: Token,
    emit: Callable[[str], None] | None = None,
) -> None:
    """Run one ring node until cancelled. Its only state is the greatest nominee seen."""
    say = emit or (lambda line: None)

    def node_part(m: Msg) -> None:
        match m:
            case Start():
                say(f"{me}: nominate self")
                chans.send.write(Nominate(me))
            case Nominate(nominee=nom):
                if me == nom:
                    say(f"{me}: I win")
                elif me < nom:
                    say(f"{me}: nominate {nom}")
                    chans.send.write(Nominate(nom))
                else:
                    say("Ignored nominee")
            case _:
                raise UnhandledMessage("nodePart: unhandled")

    def exnode_part(great: Token, m: ChMsg) -> Token:
        if isinstance(m, Msg):
            node_part(m)
            if isinstance(m, Nominate):
                if m.nominee == me:
                    chans.send.write(Winner(me))
                    return great
                return max(m.nominee, great)
            return great
        w = m.declared
        if w == me:
            say(f"{me}: Confirmed")
            done.set_result(me)
        elif w == great:
            chans.send.write(Winner(w))
        else:
            say("Unexpected winner")
        return great

    great = me
    try:
        while True:
            m = await chans.recv.read()
            try:
                great = exnode_part(great, m)
            finally:
                chans.recv.consumed()
    except Exception as exc:
        if not done.done():
            done.set_exception(exc)
        raise


@dataclass(frozen=True)
class ChannelOutcome:
    winner: Token
    ring: tuple[Token, ...]
    writes: dict[str, int]

    @property
    def winner_index(self) -> int:
        return self.ring.index(self.winner)

    @property
    def total_writes(self) -> int:
        return sum(self.writes.values())


async def run_channels(
    n: int,
    rng: Rng,
    *,
    timeout: float = 30.0,
    emit: Callable[[str], None] | None = None,
    settle: bool = True,
) -> ChannelOutcome:
    if n < 2:
        raise ValueError(f"a ring needs at least 2 nodes, got {n}")
    loop = asyncio.get_running_loop()
    done = loop.create_future()
    tally = Tally()
    chans = [Channel(tally) for _ in range(n)]
    # node i reads chans[i] and writes chans[i + 1]
    wiring = [ChanPair(chans[i], chans[(i + 1) % n]) for i in range(n)]
    # spawn_rank[i]: when (and so with which token) node i is forked
    spawn_rank, _ = permute(range(n), rng)
    order = sorted(range(n), key=spawn_rank.__getitem__)
    tokens = [Token(0)] * n
    tasks = []
    for rank, i in enumerate(order):
        tokens[i] = Token(rank + 1)
        tasks.append(asyncio.create_task(chan_node(done, wiring[i], tokens[i], emit)))
    for c in chans:
        c.write(Start())
    try:
        winner = await asyncio.wait_for(asyncio.shield(done), timeout)
        if settle:
            await asyncio.wait_for(tally.quiet.wait(), timeout)
    except asyncio.TimeoutError as exc:  # distinct from the builtin before 3.11
        raise TimeoutError(f"channel ring did not finish within {timeout} s") from exc
    finally:
        for t in tasks:
            t.cancel()
        await asyncio.gather(*tasks, return_exceptions=True)
    return ChannelOutcome(winner, tuple(tokens), dict(tally.writes))


def bench_channels(
    n: int,
    rng: Rng | None = None,
    *,
    timeout: float = 30.0,
    emit: Callable[[str], None] | None = None,
    settle: bool = True,
) -> ChannelOutcome:
    """Run the channel-based election to completion and check the winner."""
    outcome = asyncio.run(
        run_channels(n, rng or Rng.from_entropy(), timeout=timeout, emit=emit, settle=settle)
    )
    if outcome.winner != max(outcome.ring):
        raise ElectionFailure(f"{outcome.winner} won but {max(outcome.ring)} is the maximum")
    return outcome
