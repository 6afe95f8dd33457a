"""Runtime values, message payloads, and messages.

All values are immutable. Maps are insertion-ordered association
sequences rather than hash tables: `put` of a fresh key prepends, `put`
of an existing key replaces in place, and `remove` filters. This keeps
iteration order (and therefore every serialized trace) deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass


def monus(a: int, b: int) -> int:
    """Natural subtraction, truncated at zero."""
    return a - b if a > b else 0


# ---------------------------------------------------------------- values


@dataclass(frozen=True, slots=True)
class VUint:
    n: int

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError(f"uint cannot be negative: {self.n}")


@dataclass(frozen=True, slots=True)
class VBool:
    b: bool


@dataclass(frozen=True, slots=True)
class VAddr:
    a: str


@dataclass(frozen=True, slots=True)
class VStr:
    s: str


@dataclass(frozen=True, slots=True)
class VMap:
    """Association sequence from address to uint."""

    entries: tuple[tuple[str, int], ...] = ()


Value = VUint | VBool | VAddr | VStr | VMap

TRUE = VBool(True)
FALSE = VBool(False)
EMPTY_MAP = VMap()


def map_put(m: VMap, k: str, v: int) -> VMap:
    """Prepend (k, v); an existing key has its value replaced in place."""
    for i, (k2, _) in enumerate(m.entries):
        if k2 == k:
            return VMap(m.entries[:i] + ((k, v),) + m.entries[i + 1 :])
    return VMap(((k, v),) + m.entries)


def map_get(m: VMap, k: str) -> int | None:
    for k2, v in m.entries:
        if k2 == k:
            return v
    return None


def map_remove(m: VMap, k: str) -> VMap:
    return VMap(tuple(e for e in m.entries if e[0] != k))


def map_contains(m: VMap, k: str) -> bool:
    return any(k2 == k for k2, _ in m.entries)


def map_sum_values(m: VMap) -> int:
    return sum(v for _, v in m.entries)


# --------------------------------------------------------------- payloads


@dataclass(frozen=True, slots=True)
class OkMsg:
    pass


@dataclass(frozen=True, slots=True)
class NoMsg:
    pass


@dataclass(frozen=True, slots=True)
class Text:
    s: str


@dataclass(frozen=True, slots=True)
class Amount:
    n: int


Payload = OkMsg | NoMsg | Text | Amount

OK_MSG = OkMsg()
NO_MSG = NoMsg()


# --------------------------------------------------------------- messages


@dataclass(frozen=True, slots=True)
class Message:
    """A transfer of `val` tokens from `sender` to `to`, requesting the
    transition (or continuation) tagged `method`."""

    val: int
    sender: str
    to: str
    method: str
    body: Payload

    def __post_init__(self) -> None:
        if self.val < 0:
            raise ValueError(f"message value cannot be negative: {self.val}")
        if not self.method:
            raise ValueError("message method tag cannot be empty")


# The tag requested of a contract when no specific transition is meant;
# replies and refusals are addressed to it.
MAIN_TAG = "main"
