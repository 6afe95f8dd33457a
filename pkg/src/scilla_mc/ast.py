"""Abstract syntax for contracts.

Every node carries a source span for diagnostics. Spans are excluded
from equality so that a pretty-printed and re-parsed tree compares equal
to the original.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .values import Payload, Value


@dataclass(frozen=True, slots=True)
class SourceSpan:
    line: int  # 1-based
    col: int  # 1-based
    length: int = 0


NO_SPAN = SourceSpan(1, 1, 0)


def _span_field():
    return field(default=NO_SPAN, compare=False, repr=False)


class Ty(enum.Enum):
    UINT = "uint"
    BOOL = "boolean"
    ADDR = "address"
    STR = "string"
    MAP = "address => uint"

    def __str__(self) -> str:
        return self.value


# ------------------------------------------------------------ expressions


@dataclass(frozen=True, slots=True)
class Lit:
    value: Value
    span: SourceSpan = _span_field()


@dataclass(frozen=True, slots=True)
class Var:
    name: str
    span: SourceSpan = _span_field()


@dataclass(frozen=True, slots=True)
class BinOp:
    """op is one of + - == <= < && ||"""

    op: str
    lhs: Expr
    rhs: Expr
    span: SourceSpan = _span_field()


@dataclass(frozen=True, slots=True)
class Not:
    arg: Expr
    span: SourceSpan = _span_field()


@dataclass(frozen=True, slots=True)
class MapPut:
    map: Expr
    key: Expr
    val: Expr
    span: SourceSpan = _span_field()


@dataclass(frozen=True, slots=True)
class MapGet:
    map: Expr
    key: Expr
    span: SourceSpan = _span_field()


@dataclass(frozen=True, slots=True)
class MapRemove:
    map: Expr
    key: Expr
    span: SourceSpan = _span_field()


@dataclass(frozen=True, slots=True)
class MapContains:
    map: Expr
    key: Expr
    span: SourceSpan = _span_field()


@dataclass(frozen=True, slots=True)
class LetExpr:
    name: str
    bound: Expr
    body: Expr
    span: SourceSpan = _span_field()


@dataclass(frozen=True, slots=True)
class PayloadLit:
    """`ok_msg` / `no_msg`; legal only as the value of a `msg ->` entry."""

    payload: Payload
    span: SourceSpan = _span_field()


Expr = Lit | Var | BinOp | Not | MapPut | MapGet | MapRemove | MapContains | LetExpr | PayloadLit


# --------------------------------------------------------------- commands


@dataclass(frozen=True, slots=True)
class MsgEntry:
    key: str
    value: Expr
    span: SourceSpan = _span_field()


@dataclass(frozen=True, slots=True)
class FieldRead:
    """`x <- & f;`"""

    var: str
    fieldname: str
    span: SourceSpan = _span_field()


@dataclass(frozen=True, slots=True)
class FieldWrite:
    """`f := e;`"""

    fieldname: str
    expr: Expr
    span: SourceSpan = _span_field()


@dataclass(frozen=True, slots=True)
class ChainRead:
    """`x <- && block_number;`"""

    var: str
    aspect: str
    span: SourceSpan = _span_field()


@dataclass(frozen=True, slots=True)
class LetIn:
    """`let x = e in` followed by the rest of the enclosing block."""

    name: str
    bound: Expr
    body: Cmd
    span: SourceSpan = _span_field()


@dataclass(frozen=True, slots=True)
class IfThenElse:
    cond: Expr
    then_branch: Cmd
    else_branch: Cmd
    span: SourceSpan = _span_field()


@dataclass(frozen=True, slots=True)
class Send:
    """`send (<k1 -> e1, ...>, K);` — K names a continuation, MT for none."""

    entries: tuple[MsgEntry, ...]
    cont: str
    span: SourceSpan = _span_field()


@dataclass(frozen=True, slots=True)
class Return:
    expr: Expr
    span: SourceSpan = _span_field()


@dataclass(frozen=True, slots=True)
class Seq:
    cmds: tuple[Cmd, ...]
    span: SourceSpan = _span_field()


Cmd = FieldRead | FieldWrite | ChainRead | LetIn | IfThenElse | Send | Return | Seq

MT = "MT"


# ------------------------------------------------------------ declarations


@dataclass(frozen=True, slots=True)
class Param:
    name: str
    ty: Ty
    span: SourceSpan = _span_field()


@dataclass(frozen=True, slots=True)
class FieldDecl:
    name: str
    ty: Ty
    init: Expr
    span: SourceSpan = _span_field()


@dataclass(frozen=True, slots=True)
class TransitionDef:
    tag: str
    params: tuple[Param, ...]
    filter: Expr | None
    body: Cmd
    span: SourceSpan = _span_field()


@dataclass(frozen=True, slots=True)
class ContinuationDef:
    name: str
    param: Param
    body: Cmd
    span: SourceSpan = _span_field()


@dataclass(frozen=True, slots=True)
class ContractDef:
    name: str
    params: tuple[Param, ...]
    fields: tuple[FieldDecl, ...]
    transitions: tuple[TransitionDef, ...]
    continuations: tuple[ContinuationDef, ...]
    span: SourceSpan = _span_field()
