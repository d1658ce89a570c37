"""Benchmarks: control, actor ring and channel ring, plus a small CLI.

Every timed run still checks that the maximum identity won. Wall times use
``time.perf_counter_ns``; summaries report the median over repetitions.
"""

from __future__ import annotations

import argparse
import csv
import enum
import os
import secrets
import statistics
import sys
import time
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Mapping, Sequence

from .channels import ElectionFailure, bench_channels
from .election import ring_election
from .extended import confirming, spawn_exnode
from .permute import Rng
from .runtime import Completion, Runtime, print_trace

CSV_HEADER = ("mode", "ring_size", "seed", "rep", "wall_ns", "messages", "winner_ok")
DEFAULT_TIMEOUT = 30.0


class Mode(str, enum.Enum):
    ACTORS = "actors"
    CHANNELS = "channels"
    CONTROL = "control"
    HEAT = "heat"


@dataclass(frozen=True)
class BenchConfig:
    mode: Mode
    ring_size: int
    seed: int | None = None
    repetitions: int = 1
    warmup: int = 1
    trace: bool = False
    output: str | None = None
    timeout: float = DEFAULT_TIMEOUT

    def __post_init__(self) -> None:
        low = 0 if self.mode is Mode.CONTROL else 2
        if self.ring_size < low:
            raise ValueError(f"{self.mode.value} needs a ring size of at least {low}")
        if self.repetitions < 1:
            raise ValueError("need at least one repetition")


@dataclass(frozen=True)
class BenchResult:
    mode: str
    ring_size: int
    seed: int | None
    rep: int
    wall_ns: int
    messages: int
    winner_ok: bool

    def row(self) -> tuple:
        seed = "" if self.seed is None else self.seed
        return (self.mode, self.ring_size, seed, self.rep, self.wall_ns, self.messages,
                str(self.winner_ok).lower())


def bench_actors(
    n: int,
    seed: int | None = None,
    *,
    trace: Callable[[str], None] | None = None,
    timeout: float = DEFAULT_TIMEOUT,
) -> BenchResult:
    """Time one extended election on a fresh runtime.

    The clock covers setup, the election, draining the stray nominations and
    stopping the ring; draining keeps the envelope count independent of
    scheduling.
    """
    rng = Rng(seed) if seed is not None else Rng.from_entropy()
    with Runtime(trace=trace) as rt:
        start = time.perf_counter_ns()
        done = Completion()
        bench_node = confirming(done)
        ring = ring_election(rt, n, lambda r: spawn_exnode(r, bench_node), rng)
        winner = done.get(timeout)
        if not rt.wait_idle(timeout):
            raise TimeoutError(f"ring did not go quiet within {timeout} s")
        for a in ring:
            rt.stop(a)
        wall = time.perf_counter_ns() - start
        messages = rt.total_sent
    if winner != max(ring):
        raise ElectionFailure(f"{winner} won but {max(ring)} is the maximum")
    return BenchResult(Mode.ACTORS.value, n, seed, 0, wall, messages, True)


def _idle(state, env):
    return state


def bench_control(n: int, seed: int | None = None, **_) -> BenchResult:
    """Spawn ``n`` do-nothing actors and stop them: the timing floor."""
    with Runtime() as rt:
        start = time.perf_counter_ns()
        ids = [rt.spawn(_idle) for _ in range(n)]
        for a in ids:
            rt.stop(a)
        wall = time.perf_counter_ns() - start
        leaked = rt.live_count
    if leaked:
        raise AssertionError(f"{leaked} control actors still alive")
    return BenchResult(Mode.CONTROL.value, n, seed, 0, wall, 0, True)


def bench_channel_ring(
    n: int,
    seed: int | None = None,
    *,
    trace: Callable[[str], None] | None = None,
    timeout: float = DEFAULT_TIMEOUT,
) -> BenchResult:
    rng = Rng(seed) if seed is not None else Rng.from_entropy()
    start = time.perf_counter_ns()
    outcome = bench_channels(n, rng, timeout=timeout, emit=trace)
    wall = time.perf_counter_ns() - start
    return BenchResult(Mode.CHANNELS.value, n, seed, 0, wall, outcome.total_writes, True)


RUNNERS = {
    Mode.CONTROL: bench_control,
    Mode.ACTORS: bench_actors,
    Mode.CHANNELS: bench_channel_ring,
}


def measure(
    mode: Mode,
    n: int,
    seed: int | None = None,
    *,
    repetitions: int = 1,
    warmup: int = 1,
    trace: Callable[[str], None] | None = None,
    timeout: float = DEFAULT_TIMEOUT,
) -> list[BenchResult]:
    run = RUNNERS[mode]
    for _ in range(warmup):
        run(n, seed, timeout=timeout)
    return [replace(run(n, seed, trace=trace, timeout=timeout), rep=i) for i in range(repetitions)]


def bench_heat(
    n: int,
    seed: int | None = None,
    *,
    repetitions: int = 1,
    warmup: int = 1,
    timeout: float = DEFAULT_TIMEOUT,
) -> list[BenchResult]:
    """Control, actors and channels at ring size ``n``, one row per repetition."""
    rows: list[BenchResult] = []
    for mode in (Mode.CONTROL, Mode.ACTORS, Mode.CHANNELS):
        rows += measure(mode, n, seed, repetitions=repetitions, warmup=warmup, timeout=timeout)
    return rows


def median_ns(rows: Iterable[BenchResult]) -> float:
    return statistics.median(r.wall_ns for r in rows)


def format_table(rows: Sequence[BenchResult]) -> str:
    lines = [f"{'mode':<10}{'n':>8}{'reps':>6}{'median ms':>12}{'messages':>10}  ok"]
    groups: dict[tuple[str, int], list[BenchResult]] = {}
    for r in rows:
        groups.setdefault((r.mode, r.ring_size), []).append(r)
    for (mode, n), rs in groups.items():
        ok = "yes" if all(r.winner_ok for r in rs) else "NO"
        lines.append(
            f"{mode:<10}{n:>8}{len(rs):>6}{median_ns(rs) / 1e6:>12.3f}{rs[0].messages:>10}  {ok}"
        )
    return "\n".join(lines)


def write_csv(rows: Iterable[BenchResult], path: str) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        w.writerows(r.row() for r in rows)


def run(config: BenchConfig) -> list[BenchResult]:
    trace = print_trace if config.trace else None
    if config.mode is Mode.HEAT:
        rows = bench_heat(config.ring_size, config.seed, repetitions=config.repetitions,
                          warmup=config.warmup, timeout=config.timeout)
    else:
        rows = measure(config.mode, config.ring_size, config.seed,
                       repetitions=config.repetitions, warmup=config.warmup,
                       trace=trace, timeout=config.timeout)
    if config.output:
        write_csv(rows, config.output)
    return rows


def build_parser(env: Mapping[str, str]) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ringactors-bench",
        description="Time ring leader elections on actors and on channels.",
    )
    p.add_argument("--mode", choices=[m.value for m in Mode], default=env.get("MODE", "heat"),
                   help="what to run (env MODE; default heat = all three)")
    p.add_argument("--ring-size", type=int, default=int(env.get("RING_SIZE", "8")),
                   help="number of nodes (env RING_SIZE; default 8)")
    p.add_argument("--seed", type=int, default=None,
                   help="permutation seed; drawn at random and reported when omitted")
    p.add_argument("--reps", type=int, default=1, help="timed repetitions per mode")
    p.add_argument("--warmup", type=int, default=1, help="untimed runs before timing")
    p.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT, help="seconds per run")
    p.add_argument("--trace", action="store_true", help="print the message trace")
    p.add_argument("--csv", metavar="PATH", help="also write one CSV row per repetition")
    return p


def cli_main(argv: Sequence[str] | None = None, env: Mapping[str, str] | None = None) -> int:
    env = os.environ if env is None else env
    try:
        parser = build_parser(env)
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    except ValueError as exc:  # unparseable RING_SIZE
        print(f"ringactors-bench: {exc}", file=sys.stderr)
        return 2
    seed = args.seed if args.seed is not None else secrets.randbits(32)
    try:
        config = BenchConfig(Mode(args.mode), args.ring_size, seed, args.reps,
                             warmup=0 if args.trace else args.warmup, trace=args.trace,
                             output=args.csv, timeout=args.timeout)
    except ValueError as exc:
        parser.print_usage(sys.stderr)
        print(f"ringactors-bench: error: {exc}", file=sys.stderr)
        return 2
    try:
        rows = run(config)
    except (TimeoutError, AssertionError) as exc:
        print(f"ringactors-bench: failed: {exc}", file=sys.stderr)
        return 1
    print(f"seed {seed}")
    print(format_table(rows))
    return 0


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
