"""Concrete states, steps, schedules — and their JSON forms.

The JSON conventions, used by every file the tools read or write:

* value:    ``{"t": "uint"|"boolean"|"address"|"string"|"map", "v": ...}``
  with maps as ordered ``[key, value]`` pair arrays
* payload:  ``{"kind": "ok_msg"|"no_msg"|"text"|"amount", "value": ...}``
  (``value`` only for text/amount)
* message:  ``{"val": N, "sender": A, "to": A, "tag": T, "body": payload}``
* schedule: array of ``{"block_num": N, "msg": message}``
* cstate:   ``{"my_id": A, "balance": N, "fields": {name: value}}``
* trace:    array of ``{"pre": cstate, "post": cstate, "out": null|message}``

Readers raise SchemaError with a JSON-path-style location; writers emit
keys in a fixed order so identical inputs serialize byte-identically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable

from .values import (
    Amount,
    Message,
    NoMsg,
    OkMsg,
    Payload,
    Text,
    Value,
    VAddr,
    VBool,
    VMap,
    VStr,
    VUint,
)


@dataclass(frozen=True, slots=True)
class BState:
    """Blockchain snapshot visible to a step."""

    block_num: int


@dataclass(frozen=True)
class CState:
    my_id: str
    balance: int
    fields: dict[str, Value]

    def replaced(self, balance: int, fields: dict[str, Value]) -> CState:
        return CState(self.my_id, balance, fields)


@dataclass(frozen=True)
class Step:
    pre: CState
    post: CState
    out: Message | None


SchedElem = tuple[BState, Message]
Schedule = list[SchedElem]
Trace = list[Step]


def freeze_state(st: CState) -> tuple:
    """Hashable key for state-identity tests (field order insensitive)."""
    return (st.my_id, st.balance, tuple(sorted(st.fields.items(), key=lambda kv: kv[0])))


# ------------------------------------------------------------ JSON reading


class SchemaError(Exception):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


def _obj(x: Any, path: str) -> dict:
    if not isinstance(x, dict):
        raise SchemaError(path, f"expected an object, got {type(x).__name__}")
    return x


def _arr(x: Any, path: str) -> list:
    if not isinstance(x, list):
        raise SchemaError(path, f"expected an array, got {type(x).__name__}")
    return x


def _nat(x: Any, path: str) -> int:
    if not isinstance(x, int) or isinstance(x, bool) or x < 0:
        raise SchemaError(path, f"expected a non-negative integer, got {x!r}")
    return x


def _text(x: Any, path: str) -> str:
    if not isinstance(x, str):
        raise SchemaError(path, f"expected a string, got {type(x).__name__}")
    return x


def _field(d: dict, key: str, path: str) -> Any:
    if key not in d:
        raise SchemaError(path, f"missing key {key!r}")
    return d[key]


def value_from_json(x: Any, path: str = "$") -> Value:
    d = _obj(x, path)
    t = _text(_field(d, "t", path), path + ".t")
    v = _field(d, "v", path)
    vpath = path + ".v"
    if t == "uint":
        return VUint(_nat(v, vpath))
    if t == "boolean":
        if not isinstance(v, bool):
            raise SchemaError(vpath, f"expected true/false, got {v!r}")
        return VBool(v)
    if t == "address":
        return VAddr(_text(v, vpath))
    if t == "string":
        return VStr(_text(v, vpath))
    if t == "map":
        entries = []
        for i, pair in enumerate(_arr(v, vpath)):
            p = _arr(pair, f"{vpath}[{i}]")
            if len(p) != 2:
                raise SchemaError(f"{vpath}[{i}]", "expected a [key, value] pair")
            entries.append((_text(p[0], f"{vpath}[{i}][0]"), _nat(p[1], f"{vpath}[{i}][1]")))
        keys = [k for k, _ in entries]
        if len(set(keys)) != len(keys):
            raise SchemaError(vpath, "map keys must be unique")
        return VMap(tuple(entries))
    raise SchemaError(path + ".t", f"unknown value type {t!r}")


def payload_from_json(x: Any, path: str = "$") -> Payload:
    d = _obj(x, path)
    kind = _text(_field(d, "kind", path), path + ".kind")
    if kind == "ok_msg":
        return OkMsg()
    if kind == "no_msg":
        return NoMsg()
    if kind == "text":
        return Text(_text(_field(d, "value", path), path + ".value"))
    if kind == "amount":
        return Amount(_nat(_field(d, "value", path), path + ".value"))
    raise SchemaError(path + ".kind", f"unknown payload kind {kind!r}")


def message_from_json(x: Any, path: str = "$") -> Message:
    d = _obj(x, path)
    return Message(
        val=_nat(_field(d, "val", path), path + ".val"),
        sender=_text(_field(d, "sender", path), path + ".sender"),
        to=_text(_field(d, "to", path), path + ".to"),
        method=_text(_field(d, "tag", path), path + ".tag"),
        body=payload_from_json(_field(d, "body", path), path + ".body"),
    )


def bstate_from_json(x: Any, path: str = "$") -> BState:
    if isinstance(x, int) and not isinstance(x, bool):
        return BState(_nat(x, path))
    d = _obj(x, path)
    return BState(_nat(_field(d, "block_num", path), path + ".block_num"))


def schedule_from_json(x: Any, path: str = "$") -> Schedule:
    out: Schedule = []
    for i, elem in enumerate(_arr(x, path)):
        d = _obj(elem, f"{path}[{i}]")
        bc = BState(_nat(_field(d, "block_num", f"{path}[{i}]"), f"{path}[{i}].block_num"))
        msg = message_from_json(_field(d, "msg", f"{path}[{i}]"), f"{path}[{i}].msg")
        out.append((bc, msg))
    return out


def params_from_json(x: Any, path: str = "$") -> dict[str, Value]:
    """Parameter files map names to plain JSON scalars: integers become
    uints, strings addresses, booleans booleans."""
    d = _obj(x, path)
    out: dict[str, Value] = {}
    for name, raw in d.items():
        p = f"{path}.{name}"
        if isinstance(raw, bool):
            out[name] = VBool(raw)
        elif isinstance(raw, int):
            out[name] = VUint(_nat(raw, p))
        elif isinstance(raw, str):
            out[name] = VAddr(raw)
        else:
            out[name] = value_from_json(raw, p)
    return out


# ------------------------------------------------------------ JSON writing


def value_to_json(v: Value) -> dict:
    if type(v) is VUint:
        return {"t": "uint", "v": v.n}
    if type(v) is VBool:
        return {"t": "boolean", "v": v.b}
    if type(v) is VAddr:
        return {"t": "address", "v": v.a}
    if type(v) is VStr:
        return {"t": "string", "v": v.s}
    if type(v) is VMap:
        return {"t": "map", "v": [[k, n] for k, n in v.entries]}
    raise TypeError(f"not a value: {v!r}")


def payload_to_json(p: Payload) -> dict:
    if type(p) is OkMsg:
        return {"kind": "ok_msg"}
    if type(p) is NoMsg:
        return {"kind": "no_msg"}
    if type(p) is Text:
        return {"kind": "text", "value": p.s}
    if type(p) is Amount:
        return {"kind": "amount", "value": p.n}
    raise TypeError(f"not a payload: {p!r}")


def message_to_json(m: Message) -> dict:
    return {
        "val": m.val,
        "sender": m.sender,
        "to": m.to,
        "tag": m.method,
        "body": payload_to_json(m.body),
    }


def bstate_to_json(bc: BState) -> dict:
    return {"block_num": bc.block_num}


def schedule_to_json(sc: Iterable[SchedElem]) -> list:
    return [{"block_num": bc.block_num, "msg": message_to_json(m)} for bc, m in sc]


def cstate_to_json(st: CState) -> dict:
    return {
        "my_id": st.my_id,
        "balance": st.balance,
        "fields": {name: value_to_json(v) for name, v in st.fields.items()},
    }


def step_to_json(s: Step) -> dict:
    return {
        "pre": cstate_to_json(s.pre),
        "post": cstate_to_json(s.post),
        "out": None if s.out is None else message_to_json(s.out),
    }


def trace_to_json(tr: Iterable[Step]) -> list:
    return [step_to_json(s) for s in tr]
