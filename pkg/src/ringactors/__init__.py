"""Actor runtime with return-to-sender type faults, ring leader election, benchmarks."""

from .channels import ChannelOutcome, ElectionFailure, bench_channels
from .election import (
    ElectionOutcome,
    Init,
    InvalidRingSize,
    Member,
    Msg,
    Nominate,
    Start,
    UnhandledMessage,
    Uninitialized,
    node,
    ring_election,
)
from .extended import ExnodeState, Winner, confirming, exnode, extended_election
from .permute import Rng, permute
from .runtime import (
    ANY,
    ActorExit,
    ActorId,
    Completion,
    Envelope,
    Fault,
    HaltReason,
    Halted,
    MemoryTrace,
    NotInActor,
    Runtime,
    RuntimeShutDown,
    TypeMismatch,
    UnknownRecipient,
    UnregisteredMessage,
    message,
    print_trace,
    register_message,
    reject,
    say,
    self_id,
    send,
    spawn,
    stop,
)

__version__ = "0.1.0"
