#!/usr/bin/env python3
"""Full verification tier for the crowdfunding corpus: the depth-4
safety sweep (54^4 = 8.5M four-step schedules) plus the temporal and
claim-back properties. The test suite runs depth 3 by default; this
script is the long-form run. Expect minutes of wall time.
"""

import argparse
import pathlib
import sys
import time

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from scilla_mc.checks import check_contract
from scilla_mc.interp import instantiate
from scilla_mc.parser import parse_contract
from scilla_mc.predicates import Donated, EndpointHolds, NoClaimsFrom, resolve_predicate
from scilla_mc.propcheck import (
    alphabet_from_json,
    check_can_claim_back,
    check_safe,
    check_since_as_long,
)
from scilla_mc.state import params_from_json

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load(path: pathlib.Path, params_path: pathlib.Path):
    contract = parse_contract(path.read_text())
    report = check_contract(contract)
    assert report.ok, report.render(str(path))
    import json

    params = params_from_json(json.loads(params_path.read_text()))
    return instantiate(contract, "C", 0, params)


def show(name, verdict, t0):
    kind = type(verdict).__name__
    extra = ""
    if kind == "Holds":
        extra = f" ({verdict.schedules_checked} schedules"
        if verdict.premise_states is not None:
            extra += f", {verdict.premise_states} premise states"
        extra += ")"
    elif kind == "Violated":
        extra = f" (witness length {len(verdict.schedule) + len(verdict.continuation or ())})"
    print(f"{name}: {kind}{extra} in {time.monotonic() - t0:.1f}s")


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--jobs", type=int, default=4)
    ap.add_argument("--depth", type=int, default=4)
    args = ap.parse_args()

    import json

    with open(ROOT / "corpus" / "astar.json", encoding="utf-8") as f:
        astar = alphabet_from_json(json.load(f))
    params = ROOT / "corpus" / "crowdfunding_params.json"
    inst = load(ROOT / "corpus" / "crowdfunding.scilla", params)
    mutant = load(ROOT / "corpus" / "crowdfunding_claim_mutant.scilla", params)
    balance_backed = resolve_predicate("balance_backed", inst.params)

    t0 = time.monotonic()
    show("safety, corpus", check_safe(inst, balance_backed, astar, args.depth, jobs=args.jobs), t0)
    t0 = time.monotonic()
    show("safety, claim mutant", check_safe(mutant, balance_backed, astar, args.depth, jobs=args.jobs), t0)

    p = Donated("A1", 5)
    t0 = time.monotonic()
    show(
        "donation preserved (no claims from A1)",
        check_since_as_long(inst, p, EndpointHolds(p), NoClaimsFrom("A1"), astar, 3, 3),
        t0,
    )
    t0 = time.monotonic()
    show("claim-back", check_can_claim_back(inst, "A1", 5, astar, args.depth), t0)
    return 0


if __name__ == "__main__":
    sys.exit(main())
