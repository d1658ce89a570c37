"""
Actors, mailboxes and faults
============================

A short tour of the runtime: spawn an actor, talk to it, watch it halt.
"""

from dataclasses import dataclass

from ringactors import Runtime, TypeMismatch, message, print_trace


# messages are plain dataclasses registered with the runtime
@message
@dataclass(frozen=True)
class Deposit:
    amount: int


@message
@dataclass(frozen=True)
class Greeting:
    text: str


# an intent maps (state, envelope) to the next state
def account(balance, env):
    balance += env.message.amount
    print(f"balance is now {balance}")
    return balance


rt = Runtime(trace=print_trace)
acct = rt.spawn(account, 0, accepts=Deposit)
rt.send(acct, Deposit(10))
rt.send(acct, Deposit(5))
rt.wait_idle(5)

# a message of the wrong type comes back to whoever sent it;
# the account keeps its balance and keeps running
rt.send(acct, Greeting("hello"))
fault = rt.receive(timeout=5).message
assert isinstance(fault, TypeMismatch)
print("returned to sender:", fault)

# halt notifications arrive as messages too
rt.on_halt(acct, rt.client)
rt.stop(acct)
print("halt:", rt.receive(timeout=5).message)

rt.shutdown()
