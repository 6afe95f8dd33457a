"""Checkable properties over contract states and schedule elements.

Two ways to obtain a predicate: the builtin registry (balance_backed,
donated(b,d), no_claims_from(b)) and a small first-order expression
language evaluated against one state, e.g.

    !funded -> sum_values(backers) <= balance

Expression names resolve to fields, contract parameters, `balance`, or
`my_id`; there are no quantifiers — quantified claims live in the
checker's own loops. String literals compare equal to both string and
address values, so `my_id == "C"` does what it looks like.

Everything here is a plain frozen dataclass, so predicates can cross
process boundaries when checking fans out over workers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable

from .state import BState, CState
from .values import Message, Value, VAddr, VBool, VMap, VStr, VUint, map_sum_values, monus


class PredicateTypeError(Exception):
    pass


class UnknownPredicate(Exception):
    pass


def _field(st: CState, name: str) -> Value:
    try:
        return st.fields[name]
    except KeyError:
        raise PredicateTypeError(f"state has no field {name!r}") from None


def _map_field(st: CState, name: str) -> VMap:
    v = _field(st, name)
    if type(v) is not VMap:
        raise PredicateTypeError(f"field {name!r} is not a map")
    return v


# ------------------------------------------------------ builtin predicates


@dataclass(frozen=True)
class BalanceBacked:
    """While the campaign is not funded, the balance covers the sum of
    recorded donations."""

    def __call__(self, st: CState) -> bool:
        funded = _field(st, "funded")
        if type(funded) is not VBool:
            raise PredicateTypeError("field 'funded' is not a boolean")
        if funded.b:
            return True
        return map_sum_values(_map_field(st, "backers")) <= st.balance


@dataclass(frozen=True)
class Donated:
    """The backers entries for `backer` are exactly [(backer, amount)]."""

    backer: str
    amount: int

    def __call__(self, st: CState) -> bool:
        entries = [e for e in _map_field(st, "backers").entries if e[0] == self.backer]
        return entries == [(self.backer, self.amount)]


@dataclass(frozen=True)
class NoClaimsFrom:
    """Schedule-element predicate: the message is not from `backer`."""

    backer: str

    def __call__(self, elem: tuple[BState, Message]) -> bool:
        _, m = elem
        return m.sender != self.backer


@dataclass(frozen=True)
class ElemTrue:
    def __call__(self, elem: tuple[BState, Message]) -> bool:
        return True


@dataclass(frozen=True)
class EndpointHolds:
    """Binary predicate ignoring the start state: q(st, st') iff the
    wrapped state predicate holds at st'. Turns "p still holds" into
    the two-state shape the temporal checker wants."""

    p: Callable[[CState], bool]

    def __call__(self, st: CState, st2: CState) -> bool:
        return bool(self.p(st2))


@dataclass(frozen=True)
class Builtin:
    name: str
    kind: str  # "state" | "elem"
    arity: int
    make: Callable


def builtin_predicates() -> dict[str, Builtin]:
    return {
        "balance_backed": Builtin("balance_backed", "state", 0, BalanceBacked),
        "donated": Builtin("donated", "state", 2, Donated),
        "no_claims_from": Builtin("no_claims_from", "elem", 1, NoClaimsFrom),
        "true": Builtin("true", "elem", 0, ElemTrue),
    }


# ------------------------------------------------- expression predicates

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_]\w*)|(?P<str>\"[^\"]*\")|"
    r"(?P<op>->|\|\||&&|!=|==|<=|!|<|\+|-|\(|\)|,))"
)

_EXPR_FUNCS = ("sum_values", "has_entry", "contains", "get")


@dataclass(frozen=True)
class PLit:
    value: Value


@dataclass(frozen=True)
class PName:
    name: str


@dataclass(frozen=True)
class PNot:
    arg: PExpr


@dataclass(frozen=True)
class PBin:
    op: str  # -> || && == != <= < + -
    lhs: PExpr
    rhs: PExpr


@dataclass(frozen=True)
class PCall:
    func: str
    args: tuple[PExpr, ...]


PExpr = PLit | PName | PNot | PBin | PCall


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            raise PredicateTypeError(f"cannot tokenize predicate at: {text[pos:]!r}")
        pos = m.end()
        for kind in ("int", "name", "str", "op"):
            tok = m.group(kind)
            if tok is not None:
                tokens.append((kind, tok))
                break
    tokens.append(("eof", ""))
    return tokens


class _PParser:
    def __init__(self, tokens: list[tuple[str, str]]):
        self.toks = tokens
        self.i = 0

    def peek(self) -> tuple[str, str]:
        return self.toks[self.i]

    def take(self) -> tuple[str, str]:
        t = self.toks[self.i]
        if t[0] != "eof":
            self.i += 1
        return t

    def at_op(self, op: str) -> bool:
        k, t = self.peek()
        return k == "op" and t == op

    def eat_op(self, op: str) -> None:
        if not self.at_op(op):
            raise PredicateTypeError(f"expected {op!r} in predicate, found {self.peek()[1]!r}")
        self.take()

    def parse(self) -> PExpr:
        e = self.implies()
        if self.peek()[0] != "eof":
            raise PredicateTypeError(f"trailing input in predicate: {self.peek()[1]!r}")
        return e

    def implies(self) -> PExpr:
        lhs = self.or_()
        if self.at_op("->"):
            self.take()
            return PBin("->", lhs, self.implies())
        return lhs

    def or_(self) -> PExpr:
        e = self.and_()
        while self.at_op("||"):
            self.take()
            e = PBin("||", e, self.and_())
        return e

    def and_(self) -> PExpr:
        e = self.not_()
        while self.at_op("&&"):
            self.take()
            e = PBin("&&", e, self.not_())
        return e

    def not_(self) -> PExpr:
        if self.at_op("!"):
            self.take()
            return PNot(self.not_())
        return self.cmp()

    def cmp(self) -> PExpr:
        e = self.add()
        for op in ("==", "!=", "<=", "<"):
            if self.at_op(op):
                self.take()
                return PBin(op, e, self.add())
        return e

    def add(self) -> PExpr:
        e = self.atom()
        while self.at_op("+") or self.at_op("-"):
            _, op = self.take()
            e = PBin(op, e, self.atom())
        return e

    def atom(self) -> PExpr:
        kind, tok = self.peek()
        if kind == "int":
            self.take()
            return PLit(VUint(int(tok)))
        if kind == "str":
            self.take()
            return PLit(VStr(tok[1:-1]))
        if self.at_op("("):
            self.take()
            e = self.implies()
            self.eat_op(")")
            return e
        if kind == "name":
            self.take()
            if tok in ("true", "false"):
                return PLit(VBool(tok == "true"))
            if self.at_op("("):
                if tok not in _EXPR_FUNCS:
                    raise UnknownPredicate(tok)
                self.take()
                args = [self.implies()]
                while self.at_op(","):
                    self.take()
                    args.append(self.implies())
                self.eat_op(")")
                return PCall(tok, tuple(args))
            return PName(tok)
        raise PredicateTypeError(f"expected an expression, found {tok!r}")


def parse_predicate_expr(text: str) -> PExpr:
    return _PParser(_tokenize(text)).parse()


def _as_key(v: Value, what: str) -> str:
    if type(v) is VAddr:
        return v.a
    if type(v) is VStr:
        return v.s
    raise PredicateTypeError(f"{what} must be an address, got {v!r}")


def _as_uint(v: Value, what: str) -> int:
    if type(v) is VUint:
        return v.n
    raise PredicateTypeError(f"{what} must be a uint, got {v!r}")


def _as_bool(v: Value, what: str) -> bool:
    if type(v) is VBool:
        return v.b
    raise PredicateTypeError(f"{what} must be boolean, got {v!r}")


def _eq(lhs: Value, rhs: Value) -> bool:
    # String literals stand in for addresses when compared against one.
    if type(lhs) is VStr and type(rhs) is VAddr:
        return lhs.s == rhs.a
    if type(lhs) is VAddr and type(rhs) is VStr:
        return lhs.a == rhs.s
    if type(lhs) is not type(rhs):
        raise PredicateTypeError(f"cannot compare {lhs!r} with {rhs!r}")
    return lhs == rhs


def _ev(e: PExpr, ctx: dict[str, Value]) -> Value:
    t = type(e)
    if t is PLit:
        return e.value
    if t is PName:
        v = ctx.get(e.name)
        if v is None:
            raise PredicateTypeError(f"unknown name {e.name!r} in predicate")
        return v
    if t is PNot:
        return VBool(not _as_bool(_ev(e.arg, ctx), "operand of !"))
    if t is PBin:
        op = e.op
        if op == "->":
            if not _as_bool(_ev(e.lhs, ctx), "left of ->"):
                return VBool(True)
            return VBool(_as_bool(_ev(e.rhs, ctx), "right of ->"))
        if op == "||":
            return VBool(_as_bool(_ev(e.lhs, ctx), "left of ||") or _as_bool(_ev(e.rhs, ctx), "right of ||"))
        if op == "&&":
            return VBool(_as_bool(_ev(e.lhs, ctx), "left of &&") and _as_bool(_ev(e.rhs, ctx), "right of &&"))
        lhs = _ev(e.lhs, ctx)
        rhs = _ev(e.rhs, ctx)
        if op == "==":
            return VBool(_eq(lhs, rhs))
        if op == "!=":
            return VBool(not _eq(lhs, rhs))
        if op == "<=":
            return VBool(_as_uint(lhs, "left of <=") <= _as_uint(rhs, "right of <="))
        if op == "<":
            return VBool(_as_uint(lhs, "left of <") < _as_uint(rhs, "right of <"))
        if op == "+":
            return VUint(_as_uint(lhs, "left of +") + _as_uint(rhs, "right of +"))
        if op == "-":
            return VUint(monus(_as_uint(lhs, "left of -"), _as_uint(rhs, "right of -")))
        raise PredicateTypeError(f"unknown operator {op!r}")
    if t is PCall:
        args = [_ev(a, ctx) for a in e.args]
        if e.func == "sum_values":
            if len(args) != 1 or type(args[0]) is not VMap:
                raise PredicateTypeError("sum_values takes one map argument")
            return VUint(map_sum_values(args[0]))
        if e.func == "has_entry":
            if len(args) != 3 or type(args[0]) is not VMap:
                raise PredicateTypeError("has_entry takes a map, a key, and a value")
            key = _as_key(args[1], "has_entry key")
            val = _as_uint(args[2], "has_entry value")
            entries = [p for p in args[0].entries if p[0] == key]
            return VBool(entries == [(key, val)])
        if e.func == "contains":
            if len(args) != 2 or type(args[0]) is not VMap:
                raise PredicateTypeError("contains takes a map and a key")
            key = _as_key(args[1], "contains key")
            return VBool(any(k == key for k, _ in args[0].entries))
        if e.func == "get":
            if len(args) != 2 or type(args[0]) is not VMap:
                raise PredicateTypeError("get takes a map and a key")
            key = _as_key(args[1], "get key")
            for k, v in args[0].entries:
                if k == key:
                    return VUint(v)
            raise PredicateTypeError(f"get: key {key!r} absent")
        raise UnknownPredicate(e.func)
    raise PredicateTypeError(f"not a predicate expression: {e!r}")


@dataclass(frozen=True)
class ExprPredicate:
    """State predicate compiled from expression text."""

    source: str
    expr: PExpr
    params: tuple[tuple[str, Value], ...] = ()

    def __call__(self, st: CState) -> bool:
        ctx: dict[str, Value] = dict(self.params)
        ctx.update(st.fields)
        ctx["balance"] = VUint(st.balance)
        ctx["my_id"] = VAddr(st.my_id)
        return _as_bool(_ev(self.expr, ctx), "predicate")


_CALL_SHAPE = re.compile(r"^\s*([A-Za-z_]\w*)\s*(?:\(([^()]*)\))?\s*$")


def _parse_builtin_args(raw: str) -> list[str | int]:
    args: list[str | int] = []
    for piece in raw.split(","):
        piece = piece.strip()
        if not piece:
            continue
        if piece.isdigit():
            args.append(int(piece))
        elif piece.startswith('"') and piece.endswith('"'):
            args.append(piece[1:-1])
        else:
            args.append(piece)
    return args


def resolve_predicate(text: str, params: dict[str, Value] | None = None, kind: str = "state"):
    """Turn `text` into a callable predicate.

    A bare name or name(args) hits the builtin registry first; anything
    else compiles as an expression. Raises UnknownPredicate when a
    call-shaped name matches nothing.
    """
    registry = builtin_predicates()
    m = _CALL_SHAPE.match(text)
    if m is not None and m.group(1) in registry:
        b = registry[m.group(1)]
        if b.kind != kind:
            raise PredicateTypeError(f"predicate {b.name!r} is a {b.kind} predicate, expected {kind}")
        args = _parse_builtin_args(m.group(2) or "")
        if len(args) != b.arity:
            raise PredicateTypeError(f"{b.name} takes {b.arity} argument(s), got {len(args)}")
        return b.make(*args)
    if m is not None and m.group(2) is not None and m.group(1) not in _EXPR_FUNCS:
        raise UnknownPredicate(m.group(1))
    if kind != "state":
        raise UnknownPredicate(text)
    expr = parse_predicate_expr(text)
    frozen = tuple(sorted((params or {}).items()))
    return ExprPredicate(text, expr, frozen)
