"""Bounded verification over schedule spaces.

Quantification over "all schedules" is finitized by an Alphabet (a
finite set of blockchain snapshots and messages) and a depth. Holds
verdicts always carry the bound and the number of schedules covered, so
a vacuous pass is visible; Violated verdicts carry a replayable witness
schedule together with its trace.

`check_safe` searches the schedule tree one length at a time, sharing
prefixes, so the first violation found is the enumeration-earliest
(shortest, then lexicographic). The reachability-based checks
(`check_since_as_long`, `check_can_claim_back`) quantify over reachable
*states*; distinct schedules reaching the same state are collapsed,
which is sound because the checked predicates read nothing but the
state. Reported schedule counts are the closed-form totals the
collapsed search covers.
"""

from __future__ import annotations

import itertools
import multiprocessing
import random
from dataclasses import dataclass
from typing import Any, Callable, Iterator

from .ast import Ty
from .interp import execute, execute0, step_prot
from .predicates import Donated, PredicateTypeError
from .state import (
    BState,
    CState,
    SchedElem,
    Schedule,
    Step,
    _arr,
    _field,
    _obj,
    bstate_from_json,
    bstate_to_json,
    freeze_state,
    message_from_json,
    message_to_json,
    schedule_to_json,
    trace_to_json,
)
from .values import Message, Value, VAddr, VBool, VMap, VStr, VUint


class GeneratorExhausted(Exception):
    pass


# ---------------------------------------------------------------- alphabet


@dataclass(frozen=True)
class Alphabet:
    bstates: tuple[BState, ...]
    messages: tuple[Message, ...]

    def elements(self) -> list[SchedElem]:
        """Schedule elements in enumeration order: snapshot-major."""
        return [(b, m) for b in self.bstates for m in self.messages]

    def without_tag(self, tag: str) -> Alphabet:
        return Alphabet(self.bstates, tuple(m for m in self.messages if m.method != tag))


def alphabet_from_json(x: Any, path: str = "$") -> Alphabet:
    d = _obj(x, path)
    bstates = tuple(
        bstate_from_json(b, f"{path}.bstates[{i}]")
        for i, b in enumerate(_arr(_field(d, "bstates", path), path + ".bstates"))
    )
    messages = tuple(
        message_from_json(m, f"{path}.messages[{i}]")
        for i, m in enumerate(_arr(_field(d, "messages", path), path + ".messages"))
    )
    return Alphabet(bstates, messages)


def alphabet_to_json(a: Alphabet) -> dict:
    return {
        "bstates": [bstate_to_json(b) for b in a.bstates],
        "messages": [message_to_json(m) for m in a.messages],
    }


def enumerate_schedules(a: Alphabet, depth: int) -> Iterator[Schedule]:
    """Every schedule of length 0..depth, shortest first, lexicographic
    within a length; Σ |elements|^k schedules in total."""
    elems = a.elements()
    for length in range(depth + 1):
        for combo in itertools.product(elems, repeat=length):
            yield list(combo)


def schedule_space_size(n_elems: int, depth: int) -> int:
    return sum(n_elems**k for k in range(depth + 1))


# ---------------------------------------------------------------- verdicts


@dataclass(frozen=True)
class Bound:
    depth: int
    bstates: int
    messages: int
    cont_depth: int | None = None

    def to_json(self) -> dict:
        out: dict = {"depth": self.depth, "bstates": self.bstates, "messages": self.messages}
        if self.cont_depth is not None:
            out["cont_depth"] = self.cont_depth
        return out


@dataclass(frozen=True)
class Holds:
    schedules_checked: int
    bound: Bound
    premise_states: int | None = None


@dataclass(frozen=True)
class Violated:
    schedule: tuple[SchedElem, ...]
    trace: tuple[Step, ...]
    failing_index: int
    bound: Bound
    continuation: tuple[SchedElem, ...] | None = None
    detail: str = ""


@dataclass(frozen=True)
class Inconclusive:
    reason: str


Verdict = Holds | Violated | Inconclusive


def verdict_to_json(v: Verdict) -> dict:
    if type(v) is Holds:
        out: dict = {"kind": "holds", "schedules_checked": v.schedules_checked, "bound": v.bound.to_json()}
        if v.premise_states is not None:
            out["premise_states"] = v.premise_states
        return out
    if type(v) is Violated:
        out = {
            "kind": "violated",
            "failing_index": v.failing_index,
            "bound": v.bound.to_json(),
            "schedule": schedule_to_json(v.schedule),
        }
        if v.continuation is not None:
            out["continuation"] = schedule_to_json(v.continuation)
        if v.detail:
            out["detail"] = v.detail
        out["trace"] = trace_to_json(v.trace)
        return out
    return {"kind": "inconclusive", "reason": v.reason}


def witness_schedule(v: Violated) -> Schedule:
    """The full replayable schedule of a violation (prefix plus
    continuation, when the latter exists)."""
    return list(v.schedule) + list(v.continuation or ())


def _require_nonempty(a: Alphabet, depth: int) -> None:
    if depth >= 1 and (not a.bstates or not a.messages):
        raise ValueError("alphabet must have at least one bstate and one message for depth >= 1")


# -------------------------------------------------------------- check_safe


def _violating_path(inst, pred, elems, state: CState, length: int, prefix: tuple[int, ...]) -> tuple[int, ...] | None:
    for i, (bc, m) in enumerate(elems):
        stp = step_prot(inst, state, bc, m)
        if length == 1:
            if not pred(stp.post):
                return prefix + (i,)
        else:
            r = _violating_path(inst, pred, elems, stp.post, length - 1, prefix + (i,))
            if r is not None:
                return r
    return None


def _level_worker(args) -> tuple[int, ...] | None:
    inst, pred, elems, length, lo, hi = args
    state0 = inst.state0
    for i in range(lo, hi):
        bc, m = elems[i]
        stp = step_prot(inst, state0, bc, m)
        if length == 1:
            if not pred(stp.post):
                return (i,)
        else:
            r = _violating_path(inst, pred, elems, stp.post, length - 1, (i,))
            if r is not None:
                return r
    return None


def _search_level(inst, pred, elems, length: int, jobs: int) -> tuple[int, ...] | None:
    if jobs <= 1 or len(elems) < 2 * jobs:
        return _level_worker((inst, pred, elems, length, 0, len(elems)))
    cuts = [round(k * len(elems) / jobs) for k in range(jobs + 1)]
    tasks = [(inst, pred, elems, length, cuts[k], cuts[k + 1]) for k in range(jobs)]
    ctx = multiprocessing.get_context("fork")
    with ctx.Pool(jobs) as pool:
        # Contiguous ascending slices: the first non-empty result in
        # worker order is the enumeration-earliest violation.
        for result in pool.imap(_level_worker, tasks):
            if result is not None:
                pool.terminate()
                return result
    return None


def check_safe(inst, pred, a: Alphabet, depth: int, jobs: int = 1) -> Verdict:
    """Does `pred` hold at every pre- and post-state of every step of
    every schedule of length <= depth over `a`?"""
    _require_nonempty(a, depth)
    elems = a.elements()
    bound = Bound(depth, len(a.bstates), len(a.messages))
    if not pred(inst.state0):
        return Violated((), tuple(execute0(inst, [])), 0, bound, detail="initial state")
    for length in range(1, depth + 1):
        path = _search_level(inst, pred, elems, length, jobs)
        if path is not None:
            schedule = tuple(elems[i] for i in path)
            trace = tuple(execute0(inst, list(schedule)))
            return Violated(schedule, trace, len(schedule) - 1, bound)
    return Holds(schedule_space_size(len(elems), depth), bound)


# ---------------------------------------------------------- inductive mode


def make_state_generator(inst, pred, a: Alphabet, max_tries: int = 1000) -> Callable[[random.Random], CState]:
    """Random field stores filtered by `pred` (rejection sampling).
    Addresses come from the alphabet's senders plus address parameters;
    uints are drawn up to twice the largest uint parameter."""
    my_id = inst.state0.my_id
    pool = sorted({m.sender for m in a.messages} | {v.a for v in inst.params.values() if type(v) is VAddr} | {my_id})
    uints = [v.n for v in inst.params.values() if type(v) is VUint]
    cap = 2 * max(uints, default=10)
    shapes = [(f.name, f.ty) for f in inst.defn.fields]

    def gen(rng: random.Random) -> CState:
        for _ in range(max_tries):
            fields: dict[str, Value] = {}
            for name, ty in shapes:
                if ty is Ty.UINT:
                    fields[name] = VUint(rng.randint(0, cap))
                elif ty is Ty.BOOL:
                    fields[name] = VBool(rng.random() < 0.5)
                elif ty is Ty.ADDR:
                    fields[name] = VAddr(rng.choice(pool))
                elif ty is Ty.STR:
                    fields[name] = VStr("")
                else:
                    ks = rng.sample(pool, rng.randint(0, len(pool)))
                    fields[name] = VMap(tuple((k, rng.randint(0, cap)) for k in ks))
            st = CState(my_id, rng.randint(0, cap), fields)
            if pred(st):
                return st
        raise GeneratorExhausted(f"no state satisfying the predicate in {max_tries} draws")

    return gen


def check_safe_inductive(inst, pred, gen, a: Alphabet, samples: int, seed: int) -> Verdict:
    """Base case plus induction step on sampled pre-states: for every
    generated pre and every alphabet element, the post still satisfies
    `pred`. A violation here may sit on an unreachable pre-state."""
    elems = a.elements()
    bound = Bound(1, len(a.bstates), len(a.messages))
    if not pred(inst.state0):
        return Violated((), tuple(execute0(inst, [])), 0, bound, detail="base case: initial state")
    rng = random.Random(seed)
    for s in range(samples):
        try:
            pre = gen(rng)
        except GeneratorExhausted as e:
            return Inconclusive(str(e))
        for bc, m in elems:
            stp = step_prot(inst, pre, bc, m)
            if not pred(stp.post):
                return Violated(
                    ((bc, m),),
                    (stp,),
                    0,
                    bound,
                    detail=f"induction step from generated pre-state (sample {s}); may be unreachable",
                )
    return Holds(1 + samples * len(elems), bound)


# ------------------------------------------------------------ reachability


def reachable(inst, st: CState, st2: CState, sc: Schedule) -> bool:
    """Is `st2` the endpoint of running `sc` from `st`? The empty
    schedule reaches exactly `st` itself."""
    if not sc:
        return st == st2
    return execute(inst, st, sc)[-1].post == st2


def _reachable_states(inst, elems, depth: int) -> list[tuple[CState, tuple[SchedElem, ...]]]:
    """Distinct states reachable within `depth` steps, each with its
    discovery schedule — shortest first, earliest within a length."""
    state0 = inst.state0
    seen = {freeze_state(state0)}
    found = [(state0, ())]
    frontier = found
    for _ in range(depth):
        nxt = []
        for st, path in frontier:
            for e in elems:
                stp = step_prot(inst, st, e[0], e[1])
                key = freeze_state(stp.post)
                if key not in seen:
                    seen.add(key)
                    rec = (stp.post, path + (e,))
                    found.append(rec)
                    nxt.append(rec)
        frontier = nxt
    return found


# ----------------------------------------------------------- since_as_long


def check_since_as_long(inst, p, q, r, a: Alphabet, reach_depth: int, cont_depth: int) -> Verdict:
    """For every p-state reachable within reach_depth, every
    continuation of length <= cont_depth whose elements all satisfy r
    must end in a state st' with q(st, st')."""
    _require_nonempty(a, reach_depth)
    elems = a.elements()
    elems_r = [e for e in elems if r(e)]
    bound = Bound(reach_depth, len(a.bstates), len(a.messages), cont_depth=cont_depth)
    premises = [(st, path) for st, path in _reachable_states(inst, elems, reach_depth) if p(st)]
    checked = schedule_space_size(len(elems), reach_depth)

    for st, prefix in premises:
        checked += schedule_space_size(len(elems_r), cont_depth)
        seen = {freeze_state(st)}
        layer: list[tuple[CState, tuple[SchedElem, ...]]] = [(st, ())]
        if not q(st, st):
            return _saw_violation(inst, bound, prefix, (), "empty continuation")
        for _ in range(cont_depth):
            nxt = []
            for cur, cpath in layer:
                for e in elems_r:
                    stp = step_prot(inst, cur, e[0], e[1])
                    key = freeze_state(stp.post)
                    if key in seen:
                        continue
                    seen.add(key)
                    if not q(st, stp.post):
                        return _saw_violation(inst, bound, prefix, cpath + (e,), "continuation endpoint")
                    nxt.append((stp.post, cpath + (e,)))
            layer = nxt
    return Holds(checked, bound, premise_states=len(premises))


def _saw_violation(inst, bound: Bound, prefix, cont, what: str) -> Violated:
    full = list(prefix) + list(cont)
    trace = tuple(execute0(inst, full))
    return Violated(
        tuple(prefix),
        trace,
        max(len(full) - 1, 0),
        bound,
        continuation=tuple(cont),
        detail=f"binary property fails at {what}",
    )


# --------------------------------------------------------- can_claim_back


def check_can_claim_back(inst, b: str, d: int, a: Alphabet, depth: int) -> Verdict:
    """In every reachable state where b donated d, the campaign is not
    funded, the balance is below the goal, and the deadline has passed,
    some message from b must produce a refund of exactly d to b."""
    _require_nonempty(a, depth)
    elems = a.elements()
    bound = Bound(depth, len(a.bstates), len(a.messages))
    donated = Donated(b, d)
    try:
        goal = inst.params["goal"]
        max_block = inst.params["max_block"]
    except KeyError as e:
        raise PredicateTypeError(f"contract has no {e.args[0]!r} parameter") from None
    if type(goal) is not VUint or type(max_block) is not VUint:
        raise PredicateTypeError("goal and max_block must be uint parameters")
    candidates = [m for m in a.messages if m.sender == b]

    premise_pairs = 0
    for st, path in _reachable_states(inst, elems, depth):
        if not donated(st):
            continue
        funded = st.fields.get("funded")
        if type(funded) is not VBool:
            raise PredicateTypeError("field 'funded' is missing or not boolean")
        if funded.b or not st.balance < goal.n:
            continue
        for bc in a.bstates:
            if not max_block.n < bc.block_num:
                continue
            premise_pairs += 1
            if not any(_refunds(inst, st, bc, m, b, d) for m in candidates):
                return Violated(
                    tuple(path),
                    tuple(execute0(inst, list(path))),
                    max(len(path) - 1, 0),
                    bound,
                    detail=(
                        f"no message from {b} in the alphabet yields a refund of {d} to {b} "
                        f"at block {bc.block_num}"
                    ),
                )
    return Holds(schedule_space_size(len(elems), depth), bound, premise_states=premise_pairs)


def _refunds(inst, st: CState, bc: BState, m: Message, b: str, d: int) -> bool:
    out = step_prot(inst, st, bc, m).out
    return out is not None and out.val == d and out.to == b
