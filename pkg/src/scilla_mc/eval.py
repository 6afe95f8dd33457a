"""Evaluator for the pure expression layer."""

from __future__ import annotations

from . import ast
from .values import (
    FALSE,
    TRUE,
    Value,
    VAddr,
    VBool,
    VMap,
    VStr,
    VUint,
    map_contains,
    map_get,
    map_put,
    map_remove,
    monus,
)


class EvalError(Exception):
    """Base of all runtime evaluation failures."""


class UnboundVariable(EvalError):
    pass


class TypeMismatch(EvalError):
    pass


class MapKeyAbsent(EvalError):
    pass


Env = dict[str, Value]


def _uint(v: Value) -> int:
    if type(v) is VUint:
        return v.n
    raise TypeMismatch(f"expected uint, got {v!r}")


def _bool(v: Value) -> bool:
    if type(v) is VBool:
        return v.b
    raise TypeMismatch(f"expected boolean, got {v!r}")


def _addr(v: Value) -> str:
    if type(v) is VAddr:
        return v.a
    raise TypeMismatch(f"expected address, got {v!r}")


def _map(v: Value) -> VMap:
    if type(v) is VMap:
        return v
    raise TypeMismatch(f"expected map, got {v!r}")


def eval_expr(env: Env, e: ast.Expr) -> Value:
    """Evaluate `e` under `env`. Pure: `env` is never modified.

    Raises UnboundVariable, TypeMismatch, or MapKeyAbsent (for `get` on
    a missing key); && and || short-circuit.
    """
    t = type(e)
    if t is ast.Lit:
        return e.value
    if t is ast.Var:
        try:
            return env[e.name]
        except KeyError:
            raise UnboundVariable(e.name) from None
    if t is ast.BinOp:
        op = e.op
        if op == "&&":
            if not _bool(eval_expr(env, e.lhs)):
                return FALSE
            return VBool(_bool(eval_expr(env, e.rhs)))
        if op == "||":
            if _bool(eval_expr(env, e.lhs)):
                return TRUE
            return VBool(_bool(eval_expr(env, e.rhs)))
        lhs = eval_expr(env, e.lhs)
        rhs = eval_expr(env, e.rhs)
        if op == "+":
            return VUint(_uint(lhs) + _uint(rhs))
        if op == "-":
            return VUint(monus(_uint(lhs), _uint(rhs)))
        if op == "<=":
            return VBool(_uint(lhs) <= _uint(rhs))
        if op == "<":
            return VBool(_uint(lhs) < _uint(rhs))
        if op == "==":
            if type(lhs) is not type(rhs):
                raise TypeMismatch(f"cannot compare {lhs!r} with {rhs!r}")
            if type(lhs) is VMap:
                raise TypeMismatch("maps are not comparable with ==")
            return VBool(lhs == rhs)
        raise TypeMismatch(f"unknown operator {op}")
    if t is ast.Not:
        return VBool(not _bool(eval_expr(env, e.arg)))
    if t is ast.MapPut:
        m = _map(eval_expr(env, e.map))
        k = _addr(eval_expr(env, e.key))
        v = _uint(eval_expr(env, e.val))
        return map_put(m, k, v)
    if t is ast.MapGet:
        m = _map(eval_expr(env, e.map))
        k = _addr(eval_expr(env, e.key))
        v = map_get(m, k)
        if v is None:
            raise MapKeyAbsent(k)
        return VUint(v)
    if t is ast.MapRemove:
        m = _map(eval_expr(env, e.map))
        k = _addr(eval_expr(env, e.key))
        return map_remove(m, k)
    if t is ast.MapContains:
        m = _map(eval_expr(env, e.map))
        k = _addr(eval_expr(env, e.key))
        return VBool(map_contains(m, k))
    if t is ast.LetExpr:
        bound = eval_expr(env, e.bound)
        return eval_expr({**env, e.name: bound}, e.body)
    if t is ast.PayloadLit:
        raise TypeMismatch("payload constant used outside a msg entry")
    raise TypeMismatch(f"not an expression: {e!r}")
