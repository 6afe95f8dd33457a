"""Hand-written functional model of the crowdfunding contract.

This is an independent implementation of the three transfer functions,
written directly against the protocol semantics with no parser,
evaluator, or AST involved. The test suite drives it step-for-step
against the interpreted `corpus/crowdfunding.scilla` to cross-check the
whole front end; it deliberately duplicates logic rather than sharing
any of it.

Behavioural corners worth naming:

* donate refuses (with a no_msg reply) once max_block <= block_num + 1,
  and refuses repeat donations from the same backer;
* getfunds only answers the owner, counts the next block against the
  deadline, and on success sends the whole pre-message balance;
* claim uses the current block for its deadline test, refuses while the
  campaign is funded or the balance has reached the goal, refunds a
  recorded backer and deletes the record — and for an unknown backer it
  raises the exception outcome (no message at all) rather than replying.
"""

from __future__ import annotations

from dataclasses import dataclass

from .state import BState, CState
from .values import MAIN_TAG, NO_MSG, OK_MSG, Message, Value, VBool, VMap


@dataclass(frozen=True)
class CrowdfundingRef:
    my_id: str
    owner: str
    max_block: int
    goal: int
    state0: CState

    def apply_protocol(
        self, bal: int, fields: dict[str, Value], m: Message, bc: BState
    ) -> tuple[dict[str, Value], Message | None]:
        frm = m.sender

        if m.method == "donate":
            bs = fields["backers"].entries
            nxt_block = bc.block_num + 1
            if self.max_block <= nxt_block:
                return fields, Message(0, self.my_id, frm, MAIN_TAG, NO_MSG)
            if all(k != frm for k, _ in bs):
                bs2 = ((frm, m.val),) + bs
                return {**fields, "backers": VMap(bs2)}, Message(0, self.my_id, frm, MAIN_TAG, OK_MSG)
            return fields, Message(0, self.my_id, frm, MAIN_TAG, NO_MSG)

        if m.method == "getfunds":
            if frm != self.owner:
                return fields, None
            blk = bc.block_num + 1
            if self.max_block < blk:
                if self.goal <= bal:
                    return {**fields, "funded": VBool(True)}, Message(bal, self.my_id, frm, MAIN_TAG, OK_MSG)
                return fields, Message(0, self.my_id, frm, MAIN_TAG, NO_MSG)
            return fields, Message(0, self.my_id, frm, MAIN_TAG, NO_MSG)

        if m.method == "claim":
            blk = bc.block_num
            if blk <= self.max_block:
                return fields, Message(0, self.my_id, frm, MAIN_TAG, NO_MSG)
            bs = fields["backers"].entries
            if fields["funded"].b or self.goal <= bal:
                return fields, Message(0, self.my_id, frm, MAIN_TAG, NO_MSG)
            for k, v in bs:
                if k == frm:
                    bs2 = tuple(e for e in bs if e[0] != frm)
                    return {**fields, "backers": VMap(bs2)}, Message(v, self.my_id, frm, MAIN_TAG, OK_MSG)
            return fields, None

        return fields, None


def make_ref(my_id: str, init_bal: int, owner: str, max_block: int, goal: int) -> CrowdfundingRef:
    state0 = CState(my_id, init_bal, {"backers": VMap(), "funded": VBool(False)})
    return CrowdfundingRef(my_id=my_id, owner=owner, max_block=max_block, goal=goal, state0=state0)
