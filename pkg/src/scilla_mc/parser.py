"""Recursive-descent parser producing ContractDef trees.

Statement blocks have no closing delimiter: a transition or continuation
body extends until the next `transition`/`continuation` header or end of
input, a `then` block until its `else`, and a command-level `let ... in`
scopes over the remainder of its enclosing block. `if/then/else`
therefore associates each `else` with the innermost open `if`.
"""

from __future__ import annotations

from . import ast
from .lexer import ParseError, Token, tokenize
from .values import NO_MSG, OK_MSG, EMPTY_MAP, VBool, VStr, VUint

__all__ = ["ParseError", "parse_contract"]

_MAP_BUILTINS = {
    "put": (ast.MapPut, 3),
    "get": (ast.MapGet, 2),
    "remove": (ast.MapRemove, 2),
    "contains": (ast.MapContains, 2),
}

_CMP_OPS = ("==", "<=", "<")


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0

    # ------------------------------------------------------- token plumbing

    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.i + ahead, len(self.toks) - 1)]

    def advance(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def fail(self, expected: str) -> ParseError:
        t = self.peek()
        found = t.text if t.kind != "eof" else "end of input"
        return ParseError(t.span, f"expected {expected}, found {found!r}", expected=expected, found=found)

    def at_op(self, text: str) -> bool:
        t = self.peek()
        return t.kind == "op" and t.text == text

    def at_kw(self, text: str) -> bool:
        t = self.peek()
        return t.kind == "kw" and t.text == text

    def expect_op(self, text: str) -> Token:
        if not self.at_op(text):
            raise self.fail(f"'{text}'")
        return self.advance()

    def expect_kw(self, text: str) -> Token:
        if not self.at_kw(text):
            raise self.fail(f"'{text}'")
        return self.advance()

    def expect_ident(self, what: str = "identifier") -> Token:
        if self.peek().kind != "ident":
            raise self.fail(what)
        return self.advance()

    def skip_semi(self) -> None:
        # Tail commands may omit the terminator (and usually do).
        if self.at_op(";"):
            self.advance()

    # ------------------------------------------------------------- contract

    def parse_contract(self) -> ast.ContractDef:
        kw = self.expect_kw("contract")
        name = self.expect_ident("contract name")
        params = self.parse_param_list()
        self.expect_op("{")
        fields = []
        while not self.at_op("}"):
            fields.append(self.parse_field())
        self.expect_op("}")
        transitions: list[ast.TransitionDef] = []
        continuations: list[ast.ContinuationDef] = []
        while True:
            if self.at_kw("transition"):
                transitions.append(self.parse_transition())
            elif self.at_kw("continuation"):
                continuations.append(self.parse_continuation())
            elif self.peek().kind == "eof":
                break
            else:
                raise self.fail("'transition', 'continuation', or end of input")
        return ast.ContractDef(
            name=name.text,
            params=tuple(params),
            fields=tuple(fields),
            transitions=tuple(transitions),
            continuations=tuple(continuations),
            span=kw.span,
        )

    def parse_param_list(self) -> list[ast.Param]:
        self.expect_op("(")
        params: list[ast.Param] = []
        if not self.at_op(")"):
            params.append(self.parse_param())
            while self.at_op(","):
                self.advance()
                params.append(self.parse_param())
        self.expect_op(")")
        return params

    def parse_param(self) -> ast.Param:
        name = self.expect_ident("parameter name")
        self.expect_op(":")
        ty = self.parse_type()
        return ast.Param(name.text, ty, span=name.span)

    def parse_type(self) -> ast.Ty:
        t = self.expect_ident("type name")
        if t.text == "uint":
            return ast.Ty.UINT
        if t.text == "boolean":
            return ast.Ty.BOOL
        if t.text == "string":
            return ast.Ty.STR
        if t.text == "address":
            if self.at_op("=>"):
                self.advance()
                v = self.expect_ident("'uint'")
                if v.text != "uint":
                    raise ParseError(v.span, f"map value type must be uint, found {v.text!r}")
                return ast.Ty.MAP
            return ast.Ty.ADDR
        raise ParseError(t.span, f"unknown type {t.text!r}")

    def parse_field(self) -> ast.FieldDecl:
        name = self.expect_ident("field name")
        self.expect_op(":")
        ty = self.parse_type()
        self.expect_op("=")
        init = self.parse_expr()
        self.expect_op(";")
        return ast.FieldDecl(name.text, ty, init, span=name.span)

    def parse_transition(self) -> ast.TransitionDef:
        kw = self.expect_kw("transition")
        name = self.expect_ident("transition name")
        params = self.parse_param_list()
        filt = None
        if self.at_kw("if"):
            # Either the guard `if e =>` or a body starting with a plain
            # `if e then ...`; parse the expression, look at what follows,
            # and rewind when it was the latter.
            mark = self.i
            self.advance()
            e = self.parse_expr()
            if self.at_op("=>"):
                self.advance()
                filt = e
            else:
                self.i = mark
        body = self.parse_block(frozenset())
        return ast.TransitionDef(name.text, tuple(params), filt, body, span=kw.span)

    def parse_continuation(self) -> ast.ContinuationDef:
        kw = self.expect_kw("continuation")
        name = self.expect_ident("continuation name")
        self.expect_op("(")
        param = self.parse_param()
        self.expect_op(")")
        body = self.parse_block(frozenset())
        return ast.ContinuationDef(name.text, param, body, span=kw.span)

    # ------------------------------------------------------------- commands

    def at_block_end(self, stop: frozenset[str]) -> bool:
        t = self.peek()
        if t.kind == "eof":
            return True
        if t.kind == "kw" and (t.text in ("transition", "continuation") or t.text in stop):
            return True
        return False

    def parse_block(self, stop: frozenset[str]) -> ast.Cmd:
        span = self.peek().span
        cmds: list[ast.Cmd] = []
        while not self.at_block_end(stop):
            cmds.append(self.parse_stmt(stop))
        if len(cmds) == 1:
            return cmds[0]
        return ast.Seq(tuple(cmds), span=span)

    def parse_stmt(self, stop: frozenset[str]) -> ast.Cmd:
        t = self.peek()
        if t.kind == "kw":
            if t.text == "let":
                self.advance()
                name = self.expect_ident("binding name")
                self.expect_op("=")
                bound = self.parse_expr()
                self.expect_kw("in")
                body = self.parse_block(stop)
                return ast.LetIn(name.text, bound, body, span=t.span)
            if t.text == "if":
                self.advance()
                cond = self.parse_expr()
                self.expect_kw("then")
                then_branch = self.parse_block(stop | {"else"})
                self.expect_kw("else")
                else_branch = self.parse_block(stop)
                return ast.IfThenElse(cond, then_branch, else_branch, span=t.span)
            if t.text == "send":
                self.advance()
                self.expect_op("(")
                self.expect_op("<")
                entries = [self.parse_msg_entry()]
                while self.at_op(","):
                    self.advance()
                    entries.append(self.parse_msg_entry())
                self.expect_op(">")
                self.expect_op(",")
                cont = self.expect_ident("continuation name")
                self.expect_op(")")
                self.skip_semi()
                return ast.Send(tuple(entries), cont.text, span=t.span)
            if t.text == "return":
                self.advance()
                expr = self.parse_expr()
                self.skip_semi()
                return ast.Return(expr, span=t.span)
            raise self.fail("a command")
        if t.kind == "ident":
            name = self.advance()
            if self.at_op("<-"):
                self.advance()
                if self.at_op("&&"):
                    self.advance()
                    aspect = self.expect_ident("blockchain aspect name")
                    self.expect_op(";")
                    return ast.ChainRead(name.text, aspect.text, span=name.span)
                self.expect_op("&")
                fieldname = self.expect_ident("field name")
                self.expect_op(";")
                return ast.FieldRead(name.text, fieldname.text, span=name.span)
            if self.at_op(":="):
                self.advance()
                expr = self.parse_expr()
                self.expect_op(";")
                return ast.FieldWrite(name.text, expr, span=name.span)
            raise self.fail("'<-' or ':=' after identifier")
        raise self.fail("a command")

    def parse_msg_entry(self) -> ast.MsgEntry:
        key = self.expect_ident("message entry key")
        self.expect_op("->")
        t = self.peek()
        if t.kind == "kw" and t.text == "ok_msg":
            self.advance()
            value: ast.Expr = ast.PayloadLit(OK_MSG, span=t.span)
        elif t.kind == "kw" and t.text == "no_msg":
            self.advance()
            value = ast.PayloadLit(NO_MSG, span=t.span)
        else:
            value = self.parse_expr()
        return ast.MsgEntry(key.text, value, span=key.span)

    # ---------------------------------------------------------- expressions

    def parse_expr(self) -> ast.Expr:
        if self.at_kw("let"):
            t = self.advance()
            name = self.expect_ident("binding name")
            self.expect_op("=")
            bound = self.parse_expr()
            self.expect_kw("in")
            body = self.parse_expr()
            return ast.LetExpr(name.text, bound, body, span=t.span)
        return self.parse_or()

    def parse_or(self) -> ast.Expr:
        e = self.parse_and()
        while self.at_op("||"):
            t = self.advance()
            e = ast.BinOp("||", e, self.parse_and(), span=t.span)
        return e

    def parse_and(self) -> ast.Expr:
        e = self.parse_not()
        while self.at_op("&&"):
            t = self.advance()
            e = ast.BinOp("&&", e, self.parse_not(), span=t.span)
        return e

    def parse_not(self) -> ast.Expr:
        if self.at_kw("not"):
            t = self.advance()
            return ast.Not(self.parse_not(), span=t.span)
        return self.parse_cmp()

    def parse_cmp(self) -> ast.Expr:
        e = self.parse_add()
        for op in _CMP_OPS:
            if self.at_op(op):
                t = self.advance()
                return ast.BinOp(op, e, self.parse_add(), span=t.span)
        return e

    def parse_add(self) -> ast.Expr:
        e = self.parse_atom()
        while self.at_op("+") or self.at_op("-"):
            t = self.advance()
            e = ast.BinOp(t.text, e, self.parse_atom(), span=t.span)
        return e

    def parse_atom(self) -> ast.Expr:
        t = self.peek()
        if t.kind == "int":
            self.advance()
            return ast.Lit(VUint(int(t.text)), span=t.span)
        if t.kind == "string":
            self.advance()
            return ast.Lit(VStr(t.text), span=t.span)
        if t.kind == "kw" and t.text in ("true", "false"):
            self.advance()
            return ast.Lit(VBool(t.text == "true"), span=t.span)
        if self.at_op("["):
            self.advance()
            self.expect_op("]")
            return ast.Lit(EMPTY_MAP, span=t.span)
        if self.at_op("("):
            self.advance()
            e = self.parse_expr()
            self.expect_op(")")
            return e
        if t.kind == "ident":
            name = self.advance()
            if self.at_op("("):
                entry = _MAP_BUILTINS.get(name.text)
                if entry is None:
                    raise ParseError(name.span, f"unknown function {name.text!r}")
                node, arity = entry
                self.advance()
                args = [self.parse_expr()]
                while self.at_op(","):
                    self.advance()
                    args.append(self.parse_expr())
                self.expect_op(")")
                if len(args) != arity:
                    raise ParseError(name.span, f"{name.text} takes {arity} arguments, got {len(args)}")
                return node(*args, span=name.span)
            return ast.Var(name.text, span=name.span)
        raise self.fail("an expression")


def parse_contract(source: str) -> ast.ContractDef:
    """Parse a contract, failing fast with a positioned ParseError."""
    return _Parser(tokenize(source)).parse_contract()
