#!/usr/bin/env python3
"""Regenerate the canonical verification alphabet (corpus/astar.json).

Three block snapshots straddling the crowdfunding deadline (1, 10, 11)
and every message built from senders (A1, A2, A0), values (0, 5), and
the three transition tags — 18 messages, 54 schedule elements. The file
is frozen in corpus/; this script exists so the choice is auditable.
"""

import argparse
import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from scilla_mc.propcheck import Alphabet, alphabet_to_json
from scilla_mc.state import BState
from scilla_mc.values import Message, Text


def canonical_alphabet(to: str = "C") -> Alphabet:
    bstates = tuple(BState(n) for n in (1, 10, 11))
    messages = tuple(
        Message(val=val, sender=sender, to=to, method=tag, body=Text(""))
        for sender in ("A1", "A2", "A0")
        for val in (0, 5)
        for tag in ("donate", "getfunds", "claim")
    )
    return Alphabet(bstates, messages)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--to", default="C", help="target contract address")
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "corpus" / "astar.json"))
    args = ap.parse_args()
    a = canonical_alphabet(args.to)
    with open(args.out, "w", encoding="utf-8") as f:
        json.dump(alphabet_to_json(a), f, indent=2)
        f.write("\n")
    print(f"{args.out}: {len(a.bstates)} bstates x {len(a.messages)} messages")
    return 0


if __name__ == "__main__":
    sys.exit(main())
