"""Single-contract execution: dispatch, step semantics, trace folding.

A step applies one incoming message under one blockchain snapshot.
Dispatch scans transitions in declaration order and picks the first
whose guard accepts the message — the declared filter when there is
one, otherwise an exact match of the message tag against the
transition's name. Any failure inside a body (absent map key, unbound
name, missing dispatch) collapses to the exception outcome: no output
message, state and balance left unchanged.

The balance rule: when a step emits message m', the new balance is
monus(balance + incoming value, outgoing value); an exception step
keeps the old balance and absorbs nothing.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import ast
from .eval import Env, EvalError, TypeMismatch, eval_expr
from .state import BState, CState, Schedule, Step, Trace
from .values import (
    MAIN_TAG,
    NO_MSG,
    Amount,
    Message,
    Payload,
    Text,
    Value,
    VAddr,
    VBool,
    VMap,
    VStr,
    VUint,
    monus,
)


class InstantiationError(Exception):
    pass


class MissingParam(InstantiationError):
    pass


class ParamTypeMismatch(InstantiationError):
    pass


# ------------------------------------------------------------ body running


@dataclass(frozen=True, slots=True)
class Sent:
    msg: Message
    cont: str  # continuation to push; ast.MT for none


@dataclass(frozen=True, slots=True)
class Returned:
    value: Value


@dataclass(frozen=True, slots=True)
class Excepted:
    pass


Outcome = Sent | Returned | Excepted

_TY_OF_VALUE = {VUint: ast.Ty.UINT, VBool: ast.Ty.BOOL, VAddr: ast.Ty.ADDR, VStr: ast.Ty.STR, VMap: ast.Ty.MAP}


def payload_of(v: Value) -> Payload:
    if type(v) is VUint:
        return Amount(v.n)
    if type(v) is VStr:
        return Text(v.s)
    raise TypeMismatch(f"no payload form for {v!r}")


class _Runner:
    """Evaluates one body. `fields` is a private copy that is thrown
    away when the body excepts."""

    def __init__(self, env: Env, fields: dict[str, Value], my_id: str, bal: int, bc: BState):
        self.env = env
        self.fields = fields
        self.my_id = my_id
        self.bal = bal
        self.bc = bc

    def run(self, cmd: ast.Cmd) -> Outcome | None:
        t = type(cmd)
        if t is ast.Seq:
            for sub in cmd.cmds:
                r = self.run(sub)
                if r is not None:
                    return r
            return None
        if t is ast.FieldRead:
            if cmd.fieldname == "balance":
                self.env[cmd.var] = VUint(self.bal)
            else:
                try:
                    self.env[cmd.var] = self.fields[cmd.fieldname]
                except KeyError:
                    raise TypeMismatch(f"unknown field {cmd.fieldname!r}") from None
            return None
        if t is ast.ChainRead:
            if cmd.aspect != "block_number":
                raise TypeMismatch(f"unknown blockchain aspect {cmd.aspect!r}")
            self.env[cmd.var] = VUint(self.bc.block_num)
            return None
        if t is ast.FieldWrite:
            if cmd.fieldname not in self.fields:
                raise TypeMismatch(f"unknown field {cmd.fieldname!r}")
            self.fields[cmd.fieldname] = eval_expr(self.env, cmd.expr)
            return None
        if t is ast.LetIn:
            self.env[cmd.name] = eval_expr(self.env, cmd.bound)
            return self.run(cmd.body)
        if t is ast.IfThenElse:
            cond = eval_expr(self.env, cmd.cond)
            if type(cond) is not VBool:
                raise TypeMismatch(f"condition must be boolean, got {cond!r}")
            return self.run(cmd.then_branch if cond.b else cmd.else_branch)
        if t is ast.Send:
            return Sent(self.build_message(cmd.entries), cmd.cont)
        if t is ast.Return:
            return Returned(eval_expr(self.env, cmd.expr))
        raise TypeMismatch(f"not a command: {cmd!r}")

    def build_message(self, entries: tuple[ast.MsgEntry, ...]) -> Message:
        to: str | None = None
        amount: int | None = None
        tag: str | None = None
        body: Payload = NO_MSG
        for en in entries:
            if en.key == "msg":
                if type(en.value) is ast.PayloadLit:
                    body = en.value.payload
                else:
                    body = payload_of(eval_expr(self.env, en.value))
                continue
            v = eval_expr(self.env, en.value)
            if en.key == "to":
                if type(v) is not VAddr:
                    raise TypeMismatch(f"'to' entry must be an address, got {v!r}")
                to = v.a
            elif en.key == "amount":
                if type(v) is not VUint:
                    raise TypeMismatch(f"'amount' entry must be a uint, got {v!r}")
                amount = v.n
            elif en.key == "tag":
                if type(v) is not VStr:
                    raise TypeMismatch(f"'tag' entry must be a string, got {v!r}")
                tag = v.s
            else:
                raise TypeMismatch(f"unknown message entry {en.key!r}")
        if to is None or amount is None or tag is None:
            raise TypeMismatch("message literal needs to, amount, and tag entries")
        return Message(val=amount, sender=self.my_id, to=to, method=tag, body=body)


# -------------------------------------------------------------- instances


@dataclass(frozen=True)
class ContractInstance:
    defn: ast.ContractDef
    params: dict[str, Value]
    state0: CState

    # -- dispatch -----------------------------------------------------

    def _guard_accepts(self, tr: ast.TransitionDef, m: Message) -> bool:
        if tr.filter is None:
            return tr.tag == m.method
        env: Env = dict(self.params)
        for p in tr.params:
            env[p.name] = _bind_msg_param(p.name, m)
        try:
            v = eval_expr(env, tr.filter)
        except EvalError:
            return False
        return type(v) is VBool and v.b

    def apply_message(self, bal: int, fields: dict[str, Value], m: Message, bc: BState) -> tuple[dict[str, Value], Outcome]:
        """Dispatch and run one transition. The returned store is the
        original object when the outcome is an exception."""
        for tr in self.defn.transitions:
            if self._guard_accepts(tr, m):
                env: Env = dict(self.params)
                for p in tr.params:
                    env[p.name] = _bind_msg_param(p.name, m)
                return self._run_body(env, tr.body, bal, fields, bc)
        return fields, Excepted()

    def apply_continuation(
        self, k: ast.ContinuationDef, value: Value, bal: int, fields: dict[str, Value], bc: BState
    ) -> tuple[dict[str, Value], Outcome]:
        env: Env = dict(self.params)
        env[k.param.name] = value
        return self._run_body(env, k.body, bal, fields, bc)

    def _run_body(
        self, env: Env, body: ast.Cmd, bal: int, fields: dict[str, Value], bc: BState
    ) -> tuple[dict[str, Value], Outcome]:
        store = dict(fields)
        runner = _Runner(env, store, self.state0.my_id, bal, bc)
        try:
            outcome = runner.run(body)
        except EvalError:
            return fields, Excepted()
        if outcome is None:
            # A body that falls off the end without send/return; rejected
            # statically, treated as an exception if forced through.
            return fields, Excepted()
        return store, outcome

    # -- protocol view ------------------------------------------------

    def apply_protocol(self, bal: int, fields: dict[str, Value], m: Message, bc: BState) -> tuple[dict[str, Value], Message | None]:
        """Single-contract semantics: an outgoing message or nothing.
        A `return v` becomes a value-carrying reply to the sender."""
        fields2, outcome = self.apply_message(bal, fields, m, bc)
        if type(outcome) is Sent:
            return fields2, outcome.msg
        if type(outcome) is Returned:
            try:
                body = payload_of(outcome.value)
            except EvalError:
                return fields, None
            reply = Message(val=0, sender=self.state0.my_id, to=m.sender, method=MAIN_TAG, body=body)
            return fields2, reply
        return fields2, None


def _bind_msg_param(name: str, m: Message) -> Value:
    if name == "sender":
        return VAddr(m.sender)
    if name == "value":
        return VUint(m.val)
    if name == "tag":
        return VStr(m.method)
    raise TypeMismatch(f"transition parameter {name!r} does not name a message component")


def instantiate(defn: ast.ContractDef, my_id: str, init_bal: int, params: dict[str, Value]) -> ContractInstance:
    """Bind parameters, evaluate field initializers, build state0."""
    bound: dict[str, Value] = {}
    for p in defn.params:
        if p.name not in params:
            raise MissingParam(f"parameter {p.name!r} not supplied")
        v = params[p.name]
        got = _TY_OF_VALUE.get(type(v))
        if got != p.ty:
            raise ParamTypeMismatch(f"parameter {p.name!r} must be {p.ty}, got {got}")
        bound[p.name] = v
    extra = set(params) - set(bound)
    if extra:
        raise ParamTypeMismatch(f"unknown parameters {sorted(extra)!r}")
    fields: dict[str, Value] = {}
    env: Env = dict(bound)
    for f in defn.fields:
        fields[f.name] = eval_expr(env, f.init)
    return ContractInstance(defn=defn, params=bound, state0=CState(my_id, init_bal, fields))


# ------------------------------------------------------------ step / trace


def apply_transition(inst, bal: int, fields: dict[str, Value], m: Message, bc: BState) -> tuple[dict[str, Value], Message | None]:
    """Protocol-mode dispatch; `inst` may be any object exposing
    apply_protocol (the interpreter instance or a hand-written model)."""
    return inst.apply_protocol(bal, fields, m, bc)


def step_prot(inst, pre: CState, bc: BState, m: Message) -> Step:
    fields2, out = inst.apply_protocol(pre.balance, pre.fields, m, bc)
    if out is not None:
        bal2 = monus(pre.balance + m.val, out.val)
    else:
        bal2 = pre.balance
    return Step(pre, CState(pre.my_id, bal2, fields2), out)


def execute(inst, pre: CState, sc: Schedule) -> Trace:
    trace: Trace = []
    st = pre
    for bc, m in sc:
        stp = step_prot(inst, st, bc, m)
        trace.append(stp)
        st = stp.post
    return trace


def execute0(inst, sc: Schedule) -> Trace:
    """Run from the initial state; the empty schedule yields the single
    identity step."""
    if not sc:
        return [Step(inst.state0, inst.state0, None)]
    return execute(inst, inst.state0, sc)


# ------------------------------------------------------------------- lints


def overdraw_lint(step: Step, m: Message) -> str | None:
    """Warn when the balance formula truncated: the outgoing amount
    exceeded the funds actually available."""
    if step.out is not None and step.out.val > step.pre.balance + m.val:
        return (
            f"overdraw: outgoing value {step.out.val} exceeds balance "
            f"{step.pre.balance} + incoming {m.val}; monus truncated to {step.post.balance}"
        )
    return None


def absorbed_funds_lint(step: Step, m: Message) -> str | None:
    """Note when a step kept the incoming funds while leaving the field
    store untouched — typically a refusal that still pockets the value."""
    if step.out is not None and m.val > 0 and step.post.fields == step.pre.fields:
        return f"ABSORBED_FUNDS: step absorbed {m.val} into the balance without recording it in any field"
    return None
