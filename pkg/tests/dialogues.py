"""Hand-built dialogues shared by several test modules."""

from __future__ import annotations

from psaf.dialogue import Content as C
from psaf.dialogue import Dialogue, claim
from psaf.dialogue import Utterance as U
from psaf.logic import parse_literal as L


def rese_dialogue(kb) -> Dialogue:
    """The rese(v) exchange: claim, support, ta(v) objection, lect(v) answer."""
    return Dialogue(
        kb,
        [
            claim(L("rese(v)")),
            U("a1", 1, 2, C("offer", L("rese(v)"), (L("fp(v)"),))),
            U("a1", 2, 3, C("offer", L("fp(v)"), (L("te(v,kr)"), L("gc(kr)")))),
            U("a2", 2, 4, C("contrary", L("rese(v)"), (L("ta(v)"),))),
            U("a2", 4, 5, C("offer", L("ta(v)"), (L("taOf(v,kd)"), L("uc(kd)")))),
            U("a1", 5, 6, C("contrary", None, (L("lect(v)"),), (L("taOf(v,kd)"), L("uc(kd)")))),
            U("a1", 6, 7, C("offer", L("lect(v)"), (L("te(v,kd)"),))),
            U("a2", 1, 8, C("concede", L("rese(v)"))),
        ],
    )


def k4_tree_dialogue(kb) -> Dialogue:
    """A(a) defended against {B, C} by the collective counter {A, C}."""
    return Dialogue(
        kb,
        [
            claim(L("A(a)")),
            U("a1", 1, 2, C("fact", L("A(a)"))),
            U("a2", 2, 3, C("contrary", L("A(a)"), (L("B(a)"), L("C(a)")))),
            U("a1", 3, 4, C("contrary", None, (L("A(a)"), L("C(a)")), (L("B(a)"), L("C(a)")))),
            U("a2", 1, 5, C("concede", L("A(a)"))),
        ],
    )


def k5_chain(kb) -> Dialogue:
    return Dialogue(
        kb,
        [
            claim(L("A(a)")),
            U("a1", 1, 2, C("fact", L("A(a)"))),
            U("a2", 2, 3, C("contrary", L("A(a)"), (L("B(a)"),))),
            U("a2", 3, 4, C("fact", L("B(a)"))),
            U("a1", 4, 5, C("contrary", L("B(a)"), (L("A(a)"),))),
            U("a1", 5, 6, C("fact", L("A(a)"))),
        ],
    )


def two_offers(kb) -> Dialogue:
    """A(a) supported twice, via r1 and via r2, on focused.kb."""
    return Dialogue(
        kb,
        [
            claim(L("A(a)")),
            U("a1", 1, 2, C("offer", L("A(a)"), (L("C(a)"), L("B(a)")))),
            U("a1", 1, 3, C("offer", L("A(a)"), (L("D(a)"),))),
        ],
    )
