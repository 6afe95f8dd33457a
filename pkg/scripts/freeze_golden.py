#!/usr/bin/env python3
"""Regenerate the golden schedule/trace pair in corpus/.

The trace comes from the hand-written crowdfunding reference model, not
from the interpreter, so it can serve as an independent expectation for
interpreter tests: two donations before the deadline, a successful
claim after it, and a refused getfunds (goal not met).
"""

import argparse
import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from scilla_mc.crowdfunding_ref import make_ref
from scilla_mc.interp import execute0
from scilla_mc.state import BState, schedule_to_json, trace_to_json
from scilla_mc.values import Message, Text


def golden_schedule():
    def msg(val, sender, tag):
        return Message(val=val, sender=sender, to="C", method=tag, body=Text(""))

    return [
        (BState(1), msg(5, "A1", "donate")),
        (BState(1), msg(5, "A2", "donate")),
        (BState(11), msg(0, "A1", "claim")),
        (BState(11), msg(0, "A0", "getfunds")),
    ]


def main() -> int:
    corpus = pathlib.Path(__file__).resolve().parent.parent / "corpus"
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--schedule-out", default=str(corpus / "golden_schedule.json"))
    ap.add_argument("--trace-out", default=str(corpus / "golden_trace.json"))
    args = ap.parse_args()

    sc = golden_schedule()
    ref = make_ref(my_id="C", init_bal=0, owner="A0", max_block=10, goal=100)
    trace = execute0(ref, sc)
    for path, obj in ((args.schedule_out, schedule_to_json(sc)), (args.trace_out, trace_to_json(trace))):
        with open(path, "w", encoding="utf-8") as f:
            json.dump(obj, f, indent=2)
            f.write("\n")
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
