"""Static well-formedness checks.

Four independent passes: tag uniqueness, filter purity, the send/return
tail rule, and a monomorphic type check. Each returns a CheckReport; a
contract is accepted exactly when the combined report is empty.

Scope rules: expressions in bodies see contract parameters and local
bindings only — mutable fields must be pulled into locals with
`x <- & f;` first. `balance` is an implicitly declared read-only uint
field. Transition parameters name components of the incoming message,
so they are restricted to `sender : address`, `value : uint`,
`tag : string`.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import ast
from .values import VAddr, VBool, VMap, VStr, VUint

UNIQUE_TAGS = "UNIQUE_TAGS"
FILTER_EFFECT = "FILTER_EFFECT"
TAIL_POSITION = "TAIL_POSITION"
TYPE_MISMATCH = "TYPE_MISMATCH"

CHAIN_ASPECTS = {"block_number": ast.Ty.UINT}

ALLOWED_MSG_PARAMS = {"sender": ast.Ty.ADDR, "value": ast.Ty.UINT, "tag": ast.Ty.STR}

_EQ_TYPES = (ast.Ty.UINT, ast.Ty.BOOL, ast.Ty.ADDR, ast.Ty.STR)


@dataclass(frozen=True, slots=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    span: ast.SourceSpan
    rule: str
    message: str


@dataclass(frozen=True, slots=True)
class CheckReport:
    diagnostics: tuple[Diagnostic, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.diagnostics

    def __add__(self, other: CheckReport) -> CheckReport:
        return CheckReport(self.diagnostics + other.diagnostics)

    def render(self, filename: str) -> list[str]:
        return [
            f"{filename}:{d.span.line}:{d.span.col}: {d.severity}[{d.rule}]: {d.message}"
            for d in self.diagnostics
        ]


def _err(diags: list[Diagnostic], span: ast.SourceSpan, rule: str, message: str) -> None:
    diags.append(Diagnostic("error", span, rule, message))


# ------------------------------------------------------------- unique tags


def check_unique_tags(c: ast.ContractDef) -> CheckReport:
    """Transition and continuation tags share one namespace and must be
    pairwise distinct (dispatch has to be unambiguous)."""
    diags: list[Diagnostic] = []
    seen: dict[str, ast.SourceSpan] = {}
    named = [(t.tag, t.span) for t in c.transitions] + [(k.name, k.span) for k in c.continuations]
    for tag, span in named:
        if tag in seen:
            first = seen[tag]
            _err(
                diags,
                span,
                UNIQUE_TAGS,
                f"duplicate tag {tag!r}; first declared at line {first.line}, col {first.col}",
            )
        else:
            seen[tag] = span
    return CheckReport(tuple(diags))


# ----------------------------------------------------------- filter purity


def _free_names(e: ast.Expr, bound: frozenset[str]) -> set[str]:
    t = type(e)
    if t is ast.Var:
        return set() if e.name in bound else {e.name}
    if t is ast.Lit or t is ast.PayloadLit:
        return set()
    if t is ast.BinOp:
        return _free_names(e.lhs, bound) | _free_names(e.rhs, bound)
    if t is ast.Not:
        return _free_names(e.arg, bound)
    if t in (ast.MapGet, ast.MapRemove, ast.MapContains):
        return _free_names(e.map, bound) | _free_names(e.key, bound)
    if t is ast.MapPut:
        return _free_names(e.map, bound) | _free_names(e.key, bound) | _free_names(e.val, bound)
    if t is ast.LetExpr:
        return _free_names(e.bound, bound) | _free_names(e.body, bound | {e.name})
    raise ValueError(f"not an expression: {e!r}")


def check_filter_purity(c: ast.ContractDef) -> CheckReport:
    """Filters may read message components and contract parameters but
    not the contract's state (fields or balance)."""
    diags: list[Diagnostic] = []
    fields = {f.name for f in c.fields} | {"balance"}
    for t in c.transitions:
        if t.filter is None:
            continue
        for name in sorted(_free_names(t.filter, frozenset()) & fields):
            _err(
                diags,
                t.span,
                FILTER_EFFECT,
                f"filter of transition {t.tag!r} reads contract state ({name!r})",
            )
    return CheckReport(tuple(diags))


# ------------------------------------------------------------ tail position


def check_tail_position(c: ast.ContractDef) -> CheckReport:
    """Every execution path must end in exactly one send or return."""
    diags: list[Diagnostic] = []

    def walk(cmd: ast.Cmd, tail: bool, header: ast.SourceSpan) -> None:
        t = type(cmd)
        if t in (ast.Send, ast.Return):
            if not tail:
                _err(diags, cmd.span, TAIL_POSITION, "send/return must be the last command on its path")
        elif t in (ast.FieldRead, ast.FieldWrite, ast.ChainRead):
            if tail:
                _err(diags, cmd.span, TAIL_POSITION, "path does not end in send or return")
        elif t is ast.LetIn:
            walk(cmd.body, tail, header)
        elif t is ast.IfThenElse:
            walk(cmd.then_branch, tail, header)
            walk(cmd.else_branch, tail, header)
        elif t is ast.Seq:
            if not cmd.cmds:
                if tail:
                    _err(diags, header, TAIL_POSITION, "empty body does not end in send or return")
                return
            for sub in cmd.cmds[:-1]:
                walk(sub, False, header)
            walk(cmd.cmds[-1], tail, header)
        else:
            raise ValueError(f"not a command: {cmd!r}")

    for tr in c.transitions:
        walk(tr.body, True, tr.span)
    for k in c.continuations:
        walk(k.body, True, k.span)
    return CheckReport(tuple(diags))


# ---------------------------------------------------------------- typecheck


class _TypeChecker:
    def __init__(self, c: ast.ContractDef):
        self.c = c
        self.diags: list[Diagnostic] = []
        self.params = {p.name: p.ty for p in c.params}
        self.fields = {f.name: f.ty for f in c.fields}
        self.conts = {k.name for k in c.continuations}

    def err(self, span: ast.SourceSpan, message: str) -> None:
        _err(self.diags, span, TYPE_MISMATCH, message)

    # Returns None when the expression is ill-typed (already reported),
    # which suppresses cascading errors upward.
    def synth(self, env: dict[str, ast.Ty], e: ast.Expr) -> ast.Ty | None:
        t = type(e)
        if t is ast.Lit:
            v = e.value
            if type(v) is VUint:
                return ast.Ty.UINT
            if type(v) is VBool:
                return ast.Ty.BOOL
            if type(v) is VStr:
                return ast.Ty.STR
            if type(v) is VAddr:
                return ast.Ty.ADDR
            if type(v) is VMap:
                return ast.Ty.MAP
            self.err(e.span, f"unsupported literal {v!r}")
            return None
        if t is ast.Var:
            ty = env.get(e.name)
            if ty is None:
                self.err(e.span, f"unbound name {e.name!r}")
            return ty
        if t is ast.PayloadLit:
            self.err(e.span, "ok_msg/no_msg are only allowed as the value of a msg entry")
            return None
        if t is ast.Not:
            self.expect(env, e.arg, ast.Ty.BOOL, "operand of not")
            return ast.Ty.BOOL
        if t is ast.BinOp:
            if e.op in ("&&", "||"):
                self.expect(env, e.lhs, ast.Ty.BOOL, f"left operand of {e.op}")
                self.expect(env, e.rhs, ast.Ty.BOOL, f"right operand of {e.op}")
                return ast.Ty.BOOL
            if e.op in ("+", "-", "<=", "<"):
                self.expect(env, e.lhs, ast.Ty.UINT, f"left operand of {e.op}")
                self.expect(env, e.rhs, ast.Ty.UINT, f"right operand of {e.op}")
                return ast.Ty.UINT if e.op in ("+", "-") else ast.Ty.BOOL
            if e.op == "==":
                lt = self.synth(env, e.lhs)
                rt = self.synth(env, e.rhs)
                if lt is not None and rt is not None:
                    if lt != rt:
                        self.err(e.span, f"cannot compare {lt} with {rt}")
                    elif lt not in _EQ_TYPES:
                        self.err(e.span, f"values of type {lt} are not comparable with ==")
                return ast.Ty.BOOL
            self.err(e.span, f"unknown operator {e.op}")
            return None
        if t is ast.MapPut:
            self.expect(env, e.map, ast.Ty.MAP, "first argument of put")
            self.expect(env, e.key, ast.Ty.ADDR, "second argument of put")
            self.expect(env, e.val, ast.Ty.UINT, "third argument of put")
            return ast.Ty.MAP
        if t in (ast.MapGet, ast.MapRemove, ast.MapContains):
            name = {ast.MapGet: "get", ast.MapRemove: "remove", ast.MapContains: "contains"}[t]
            self.expect(env, e.map, ast.Ty.MAP, f"first argument of {name}")
            self.expect(env, e.key, ast.Ty.ADDR, f"second argument of {name}")
            if t is ast.MapGet:
                return ast.Ty.UINT
            return ast.Ty.MAP if t is ast.MapRemove else ast.Ty.BOOL
        if t is ast.LetExpr:
            bound = self.synth(env, e.bound)
            if bound is None:
                return None
            return self.synth({**env, e.name: bound}, e.body)
        raise ValueError(f"not an expression: {e!r}")

    def expect(self, env: dict[str, ast.Ty], e: ast.Expr, want: ast.Ty, what: str) -> None:
        got = self.synth(env, e)
        if got is not None and got != want:
            self.err(e.span, f"{what} must be {want}, got {got}")

    def check_cmd(self, env: dict[str, ast.Ty], cmd: ast.Cmd) -> dict[str, ast.Ty]:
        t = type(cmd)
        if t is ast.Seq:
            for sub in cmd.cmds:
                env = self.check_cmd(env, sub)
            return env
        if t is ast.FieldRead:
            if cmd.fieldname == "balance":
                return {**env, cmd.var: ast.Ty.UINT}
            ty = self.fields.get(cmd.fieldname)
            if ty is None:
                self.err(cmd.span, f"unknown field {cmd.fieldname!r}")
                return env
            return {**env, cmd.var: ty}
        if t is ast.ChainRead:
            ty = CHAIN_ASPECTS.get(cmd.aspect)
            if ty is None:
                self.err(cmd.span, f"unknown blockchain aspect {cmd.aspect!r}")
                return env
            return {**env, cmd.var: ty}
        if t is ast.FieldWrite:
            if cmd.fieldname == "balance":
                self.err(cmd.span, "balance cannot be assigned; it changes only by transferring funds")
                return env
            ty = self.fields.get(cmd.fieldname)
            if ty is None:
                self.err(cmd.span, f"unknown field {cmd.fieldname!r}")
                return env
            self.expect(env, cmd.expr, ty, f"value assigned to {cmd.fieldname!r}")
            return env
        if t is ast.LetIn:
            bound = self.synth(env, cmd.bound)
            env2 = env if bound is None else {**env, cmd.name: bound}
            self.check_cmd(env2, cmd.body)
            return env
        if t is ast.IfThenElse:
            self.expect(env, cmd.cond, ast.Ty.BOOL, "condition of if")
            self.check_cmd(env, cmd.then_branch)
            self.check_cmd(env, cmd.else_branch)
            return env
        if t is ast.Send:
            seen: dict[str, ast.SourceSpan] = {}
            for en in cmd.entries:
                if en.key in seen:
                    self.err(en.span, f"duplicate message entry {en.key!r}")
                    continue
                seen[en.key] = en.span
                if en.key == "to":
                    self.expect(env, en.value, ast.Ty.ADDR, "'to' entry")
                elif en.key == "amount":
                    self.expect(env, en.value, ast.Ty.UINT, "'amount' entry")
                elif en.key == "tag":
                    self.expect(env, en.value, ast.Ty.STR, "'tag' entry")
                elif en.key == "msg":
                    if type(en.value) is not ast.PayloadLit:
                        got = self.synth(env, en.value)
                        if got is not None and got not in (ast.Ty.UINT, ast.Ty.STR):
                            self.err(en.value.span, f"'msg' entry must be uint, string, or a payload constant, got {got}")
                else:
                    self.err(en.span, f"unknown message entry {en.key!r}")
            for req in ("to", "amount", "tag"):
                if req not in seen:
                    self.err(cmd.span, f"message literal is missing the {req!r} entry")
            if cmd.cont != ast.MT and cmd.cont not in self.conts:
                self.err(cmd.span, f"unknown continuation {cmd.cont!r}")
            return env
        if t is ast.Return:
            got = self.synth(env, cmd.expr)
            if got is not None and got not in (ast.Ty.UINT, ast.Ty.STR):
                self.err(cmd.span, f"return value must be uint or string, got {got}")
            return env
        raise ValueError(f"not a command: {cmd!r}")

    def run(self) -> CheckReport:
        c = self.c
        seen_params: set[str] = set()
        for p in c.params:
            if p.name in seen_params:
                self.err(p.span, f"duplicate parameter {p.name!r}")
            seen_params.add(p.name)
            if p.name == "balance":
                self.err(p.span, "'balance' is implicitly declared and cannot be a parameter")
        seen_fields: set[str] = set()
        for f in c.fields:
            if f.name in seen_fields:
                self.err(f.span, f"duplicate field {f.name!r}")
            seen_fields.add(f.name)
            if f.name in self.params:
                self.err(f.span, f"field {f.name!r} shadows a contract parameter")
            if f.name == "balance":
                self.err(f.span, "'balance' is implicitly declared and cannot be redeclared")
            unbound = _free_names(f.init, frozenset(self.params))
            if unbound:
                self.err(
                    f.span,
                    f"field initializer may reference only contract parameters; {sorted(unbound)!r} are not",
                )
            else:
                self.expect(dict(self.params), f.init, f.ty, f"initializer of {f.name!r}")

        for tr in c.transitions:
            tenv = dict(self.params)
            seen: set[str] = set()
            for p in tr.params:
                if p.name in seen:
                    self.err(p.span, f"duplicate parameter {p.name!r}")
                    continue
                seen.add(p.name)
                want = ALLOWED_MSG_PARAMS.get(p.name)
                if want is None:
                    self.err(
                        p.span,
                        f"transition parameter {p.name!r} does not name a message component "
                        "(sender, value, or tag)",
                    )
                elif p.ty != want:
                    self.err(p.span, f"message component {p.name!r} has type {want}, declared {p.ty}")
                else:
                    tenv[p.name] = want
            if tr.filter is not None:
                # State names are typed here so that purity violations are
                # reported once, by check_filter_purity.
                fenv = {**tenv, **self.fields, "balance": ast.Ty.UINT}
                self.expect(fenv, tr.filter, ast.Ty.BOOL, f"filter of transition {tr.tag!r}")
            self.check_cmd(tenv, tr.body)

        for k in c.continuations:
            kenv = dict(self.params)
            if k.param.ty not in (ast.Ty.UINT, ast.Ty.STR):
                self.err(k.param.span, f"continuation parameter must be uint or string, got {k.param.ty}")
            else:
                kenv[k.param.name] = k.param.ty
            self.check_cmd(kenv, k.body)

        return CheckReport(tuple(self.diags))


def typecheck(c: ast.ContractDef) -> CheckReport:
    return _TypeChecker(c).run()


def check_contract(c: ast.ContractDef) -> CheckReport:
    """All four passes, in a fixed order."""
    return check_unique_tags(c) + check_filter_purity(c) + check_tail_position(c) + typecheck(c)
