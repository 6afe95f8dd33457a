"""Canonical formatter for contract ASTs.

`parse_contract(pretty_print(c)) == c` for every tree the parser can
produce; operator printing inserts parentheses exactly where the
precedence of a subtree is too low for its context.
"""

from __future__ import annotations

from . import ast
from .values import NoMsg, OkMsg, VBool, VMap, VStr, VUint

# Precedence contexts, loosest to tightest.
_LET, _OR, _AND, _NOT, _CMP, _ADD, _ATOM = range(7)

_BINOP_LEVEL = {"||": _OR, "&&": _AND, "==": _CMP, "<=": _CMP, "<": _CMP, "+": _ADD, "-": _ADD}

_CALLS = {ast.MapPut: "put", ast.MapGet: "get", ast.MapRemove: "remove", ast.MapContains: "contains"}


def pp_expr(e: ast.Expr, ctx: int = _LET) -> str:
    if type(e) is ast.Lit:
        v = e.value
        if type(v) is VUint:
            return str(v.n)
        if type(v) is VBool:
            return "true" if v.b else "false"
        if type(v) is VStr:
            return f'"{v.s}"'
        if type(v) is VMap:
            if v.entries:
                raise ValueError("only the empty map literal has a source form")
            return "[]"
        raise ValueError(f"literal {v!r} has no source form")
    if type(e) is ast.Var:
        return e.name
    if type(e) is ast.PayloadLit:
        return "ok_msg" if isinstance(e.payload, OkMsg) else "no_msg"
    if type(e) is ast.LetExpr:
        body = f"let {e.name} = {pp_expr(e.bound)} in {pp_expr(e.body)}"
        return f"({body})" if ctx > _LET else body
    if type(e) is ast.Not:
        body = f"not {pp_expr(e.arg, _NOT)}"
        return f"({body})" if ctx > _NOT else body
    if type(e) is ast.BinOp:
        lvl = _BINOP_LEVEL[e.op]
        if lvl == _CMP:
            # Comparisons do not chain; both sides sit one level up.
            body = f"{pp_expr(e.lhs, _ADD)} {e.op} {pp_expr(e.rhs, _ADD)}"
        else:
            body = f"{pp_expr(e.lhs, lvl)} {e.op} {pp_expr(e.rhs, lvl + 1)}"
        return f"({body})" if ctx > lvl else body
    name = _CALLS.get(type(e))
    if name == "put":
        return f"put({pp_expr(e.map)}, {pp_expr(e.key)}, {pp_expr(e.val)})"
    if name is not None:
        return f"{name}({pp_expr(e.map)}, {pp_expr(e.key)})"
    raise ValueError(f"not an expression: {e!r}")


def _pp_cmd(c: ast.Cmd, indent: int, out: list[str]) -> None:
    pad = "  " * indent
    if type(c) is ast.Seq:
        for sub in c.cmds:
            _pp_cmd(sub, indent, out)
    elif type(c) is ast.FieldRead:
        out.append(f"{pad}{c.var} <- & {c.fieldname};")
    elif type(c) is ast.ChainRead:
        out.append(f"{pad}{c.var} <- && {c.aspect};")
    elif type(c) is ast.FieldWrite:
        out.append(f"{pad}{c.fieldname} := {pp_expr(c.expr)};")
    elif type(c) is ast.LetIn:
        out.append(f"{pad}let {c.name} = {pp_expr(c.bound)} in")
        _pp_cmd(c.body, indent, out)
    elif type(c) is ast.IfThenElse:
        out.append(f"{pad}if {pp_expr(c.cond)}")
        out.append(f"{pad}then")
        _pp_cmd(c.then_branch, indent + 1, out)
        out.append(f"{pad}else")
        _pp_cmd(c.else_branch, indent + 1, out)
    elif type(c) is ast.Send:
        entries = ", ".join(f"{en.key} -> {pp_expr(en.value)}" for en in c.entries)
        out.append(f"{pad}send (<{entries}>, {c.cont});")
    elif type(c) is ast.Return:
        out.append(f"{pad}return {pp_expr(c.expr)};")
    else:
        raise ValueError(f"not a command: {c!r}")


def _pp_params(params: tuple[ast.Param, ...]) -> str:
    return "(" + ", ".join(f"{p.name} : {p.ty}" for p in params) + ")"


def pretty_print(c: ast.ContractDef) -> str:
    lines = [f"contract {c.name} {_pp_params(c.params)}"]
    if c.fields:
        lines.append("{")
        for f in c.fields:
            lines.append(f"  {f.name} : {f.ty} = {pp_expr(f.init)};")
        lines.append("}")
    else:
        lines.append("{}")
    for t in c.transitions:
        lines.append("")
        lines.append(f"transition {t.tag} {_pp_params(t.params)}")
        if t.filter is not None:
            lines.append(f"  if {pp_expr(t.filter)} =>")
        _pp_cmd(t.body, 1, lines)
    for k in c.continuations:
        lines.append("")
        lines.append(f"continuation {k.name} ({k.param.name} : {k.param.ty})")
        _pp_cmd(k.body, 1, lines)
    return "\n".join(lines) + "\n"
