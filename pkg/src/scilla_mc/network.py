"""Multi-contract runs: message routing, the continuation stack, and the
step budget.

One run is a strictly sequential loop. Delivering a message invokes a
transition on the target contract; a `send (.., K)` pushes K onto the
global LIFO stack (MT pushes nothing) and forwards the message; a
`return v` pops the topmost continuation and invokes it with v. The
return itself is recorded as a zero-valued message to the continuation's
owner (or to the original sender, tagged "main", when the stack is
empty), so balances follow the ordinary step formula and the returned
funds stay with the callee.

A message to an address with no registered contract leaves the system:
it is recorded as undelivered, one waiting continuation (if any) is
discarded since nothing will return to it, and the run ends.

Each transition or continuation invocation costs one unit of budget;
exceptions included. The run stops with BUDGET_EXHAUSTED as soon as a
delivery is pending and the budget is spent.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import ast
from .eval import EvalError
from .interp import ContractInstance, Excepted, Returned, Sent, payload_of
from .state import BState, CState, Step, message_to_json, step_to_json, value_to_json
from .values import MAIN_TAG, Message, Value, monus

COMPLETED = "completed"
BUDGET_EXHAUSTED = "budget_exhausted"


@dataclass
class NetworkState:
    contracts: dict[str, ContractInstance]
    states: dict[str, CState]
    stack: list[tuple[str, str]] = field(default_factory=list)  # (address, continuation)
    bstate: BState = BState(1)


def make_network(instances: dict[str, ContractInstance], bstate: BState = BState(1)) -> NetworkState:
    return NetworkState(
        contracts=dict(instances),
        states={addr: inst.state0 for addr, inst in instances.items()},
        bstate=bstate,
    )


@dataclass(frozen=True)
class NetStep:
    addr: str
    step: Step
    kind: str  # "send" | "return" | "exception"
    returned: Value | None = None


@dataclass(frozen=True)
class NetworkResult:
    steps: tuple[NetStep, ...]
    outcome: str  # COMPLETED | BUDGET_EXHAUSTED
    undelivered: tuple[Message, ...]


def network_result_to_json(r: NetworkResult) -> dict:
    steps = []
    for ns in r.steps:
        entry: dict = {"addr": ns.addr, "kind": ns.kind}
        if ns.returned is not None:
            entry["returned"] = value_to_json(ns.returned)
        entry["step"] = step_to_json(ns.step)
        steps.append(entry)
    return {
        "outcome": r.outcome,
        "steps": steps,
        "undelivered": [message_to_json(m) for m in r.undelivered],
    }


def _continuation_def(inst: ContractInstance, name: str) -> ast.ContinuationDef | None:
    for k in inst.defn.continuations:
        if k.name == name:
            return k
    return None


def run_network(net: NetworkState, initial: Message, budget: int) -> NetworkResult:
    """Drive the network from `initial` until quiescence or until
    `budget` invocations have been spent. Mutates `net`."""
    steps: list[NetStep] = []
    undelivered: list[Message] = []
    pending_msg: Message | None = initial
    # A popped continuation waiting to run: (addr, def, value, causing message).
    pending_cont: tuple[str, ast.ContinuationDef, Value, Message] | None = None

    while pending_msg is not None or pending_cont is not None:
        if len(steps) >= budget:
            return NetworkResult(tuple(steps), BUDGET_EXHAUSTED, tuple(undelivered))

        if pending_cont is not None:
            addr, kdef, value, cause = pending_cont
            pending_cont = None
            inst = net.contracts[addr]
            st = net.states[addr]
            fields2, outcome = inst.apply_continuation(kdef, value, st.balance, st.fields, net.bstate)
            incoming = cause
        else:
            m = pending_msg
            pending_msg = None
            inst = net.contracts.get(m.to)
            if inst is None:
                # Payment or notification to an external account.
                undelivered.append(m)
                if net.stack:
                    net.stack.pop()
                continue
            addr = m.to
            st = net.states[addr]
            fields2, outcome = inst.apply_message(st.balance, st.fields, m, net.bstate)
            incoming = m

        if type(outcome) is Sent:
            out = outcome.msg
            post = CState(addr, monus(st.balance + incoming.val, out.val), fields2)
            net.states[addr] = post
            steps.append(NetStep(addr, Step(st, post, out), "send"))
            if outcome.cont != ast.MT:
                net.stack.append((addr, outcome.cont))
            pending_msg = out
        elif type(outcome) is Returned:
            try:
                body = payload_of(outcome.value)
            except EvalError:
                outcome = Excepted()
            else:
                if net.stack:
                    kaddr, kname = net.stack.pop()
                    kinst = net.contracts.get(kaddr)
                    kdef = _continuation_def(kinst, kname) if kinst is not None else None
                    reply = Message(val=0, sender=addr, to=kaddr, method=kname, body=body)
                    post = CState(addr, st.balance + incoming.val, fields2)
                    net.states[addr] = post
                    steps.append(NetStep(addr, Step(st, post, reply), "return", outcome.value))
                    if kdef is None:
                        undelivered.append(reply)
                    else:
                        pending_cont = (kaddr, kdef, outcome.value, reply)
                    continue
                reply = Message(val=0, sender=addr, to=incoming.sender, method=MAIN_TAG, body=body)
                post = CState(addr, st.balance + incoming.val, fields2)
                net.states[addr] = post
                steps.append(NetStep(addr, Step(st, post, reply), "return", outcome.value))
                pending_msg = reply
                continue

        if type(outcome) is Excepted:
            steps.append(NetStep(addr, Step(st, st, None), "exception"))
            if net.stack:
                net.stack.pop()

    return NetworkResult(tuple(steps), COMPLETED, tuple(undelivered))
