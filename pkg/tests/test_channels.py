import asyncio

import pytest

from oracles import chang_roberts_nominations
from ringactors.channels import (
    ChanPair,
    Channel,
    ElectionFailure,
    Tally,
    Token,
    bench_channels,
    chan_node,
    run_channels,
)
from ringactors.election import Init, Nominate, Start, UnhandledMessage
from ringactors.extended import Winner
from ringactors.permute import Rng


def run_node(script, me=Token(5)):
    """Feed one node a script of messages; return (trace lines, writes, done)."""

    async def go():
        done = asyncio.get_running_loop().create_future()
        tally = Tally()
        pair = ChanPair(Channel(tally), Channel(tally))
        lines = []
        task = asyncio.create_task(chan_node(done, pair, me, lines.append))
        for m in script:
            pair.recv.write(m)
        # nothing reads the output channel, so the input is drained once
        # every outstanding write is sitting there
        while tally.outstanding > pair.send._q.qsize() and not task.done():
            await asyncio.sleep(0)
        task.cancel()
        await asyncio.gather(task, return_exceptions=True)
        out = []
        while not pair.send._q.empty():
            out.append(pair.send._q.get_nowait())
        return lines, out, done

    return asyncio.run(go())


def test_start_nominates_self():
    lines, out, _ = run_node([Start()])
    assert lines == ["ActorId 5: nominate self"]
    assert out == [Nominate(Token(5))]


def test_larger_nominee_forwarded():
    lines, out, _ = run_node([Nominate(Token(9))])
    assert lines == ["ActorId 5: nominate ActorId 9"]
    assert out == [Nominate(Token(9))]


def test_smaller_nominee_ignored():
    lines, out, _ = run_node([Nominate(Token(2))])
    assert lines == ["Ignored nominee"] and out == []


def test_own_nomination_declares():
    lines, out, _ = run_node([Nominate(Token(5))])
    assert lines == ["ActorId 5: I win"]
    assert out == [Winner(Token(5))]


def test_declaration_matching_greatest_forwarded():
    lines, out, _ = run_node([Nominate(Token(9)), Winner(Token(9))])
    assert out == [Nominate(Token(9)), Winner(Token(9))]


def test_unexpected_declaration():
    lines, out, _ = run_node([Nominate(Token(9)), Winner(Token(8))])
    assert lines[-1] == "Unexpected winner" and out == [Nominate(Token(9))]


def test_own_declaration_completes():
    lines, out, done = run_node([Winner(Token(5))])
    assert lines == ["ActorId 5: Confirmed"] and out == []
    assert done.result() == Token(5)


def test_init_is_not_a_channel_message():
    _, _, done = run_node([Init(Token(1))])
    with pytest.raises(UnhandledMessage):
        done.result()


def test_completion_is_write_once():
    # two confirmations would write the completion future twice
    _, _, done = run_node([Winner(Token(5)), Winner(Token(5))])
    assert done.result() == Token(5)
    with pytest.raises(asyncio.InvalidStateError):
        done.set_result(Token(6))


def test_ring_needs_two_nodes():
    with pytest.raises(ValueError):
        bench_channels(1, Rng(0))


@pytest.mark.parametrize("n, seed", [(2, 0), (4, 1), (4, 2)])
def test_small_ring_trace_shape(n, seed):
    lines = []
    outcome = bench_channels(n, Rng(seed), emit=lines.append)
    w = outcome.winner
    assert w == max(outcome.ring) == Token(n)
    assert lines.count(f"{w}: I win") == 1
    assert sum(line.endswith(": I win") for line in lines) == 1
    assert [line for line in lines if line.endswith("Confirmed")] == [f"{w}: Confirmed"]
    assert lines.index(f"{w}: I win") < lines.index(f"{w}: Confirmed")
    assert sum(line.endswith(": nominate self") for line in lines) == n
    assert "Unexpected winner" not in lines
    if n > 2:
        assert "Ignored nominee" in lines


def test_tokens_are_spawn_order_permuted_onto_ring():
    outcome = bench_channels(16, Rng(8))
    assert sorted(outcome.ring) == list(range(1, 17))
    assert list(outcome.ring) != sorted(outcome.ring)


@pytest.mark.parametrize("seed", range(3))
def test_nomination_count_matches_oracle(seed):
    outcome = bench_channels(1024, Rng(seed))
    assert outcome.writes["Nominate"] == chang_roberts_nominations(list(outcome.ring))
    assert outcome.writes["Winner"] == 1024
    assert outcome.writes["Start"] == 1024


def test_crashing_node_fails_the_run():
    async def go():
        done = asyncio.get_running_loop().create_future()
        tally = Tally()
        pair = ChanPair(Channel(tally), Channel(tally))
        task = asyncio.create_task(chan_node(done, pair, Token(1)))
        pair.recv.write(Init(Token(2)))
        with pytest.raises(UnhandledMessage):
            await asyncio.wait_for(asyncio.shield(done), 2)
        await asyncio.gather(task, return_exceptions=True)

    asyncio.run(go())


def test_winner_check_is_an_assertion():
    assert issubclass(ElectionFailure, AssertionError)


def test_timeout_when_ring_never_finishes(monkeypatch):
    # a ring whose nodes ignore everything never completes
    import ringactors.channels as ch

    async def deaf(done, chans, me, emit=None):
        while True:
            await chans.recv.read()
            chans.recv.consumed()

    monkeypatch.setattr(ch, "chan_node", deaf)
    with pytest.raises(TimeoutError):
        asyncio.run(run_channels(4, Rng(0), timeout=0.2))
