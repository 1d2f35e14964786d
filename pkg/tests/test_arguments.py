from __future__ import annotations

import time

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_arguments
from psaf.arguments import (
    Psaf,
    SetAttack,
    TooManyArgumentsError,
    all_attacking_sets,
    build_psaf,
    enumerate_arguments,
    validate_tree,
)
from psaf.logic import CyclicDependencyError, closure, is_consistent, load_kb, parse_literal
from psaf.randomkb import random_kb

from conftest import kb_path

L = parse_literal


def lits(*texts):
    return frozenset(L(t) for t in texts)


# the 13 (support, conclusion) pairs of the university example
UNIVERSITY_ARGUMENTS = {
    (lits("te(v,kr)"), L("te(v,kr)")),
    (lits("gc(kr)"), L("gc(kr)")),
    (lits("gc(kr)", "te(v,kr)"), L("fp(v)")),
    (lits("gc(kr)", "te(v,kr)"), L("rese(v)")),
    (lits("te(v,kd)"), L("te(v,kd)")),
    (lits("taOf(v,kd)"), L("taOf(v,kd)")),
    (lits("uc(kd)"), L("uc(kd)")),
    (lits("taOf(v,kd)", "uc(kd)"), L("ta(v)")),
    (lits("te(v,kd)"), L("lect(v)")),
    (lits("te(v,kr)"), L("lect(v)")),
    (lits("te(v,kr)"), L("emp(v)")),
    (lits("te(v,kd)"), L("emp(v)")),
    (lits("gc(kr)", "te(v,kr)"), L("emp(v)")),
}


def test_university_table(kbs):
    start = time.perf_counter()
    args = enumerate_arguments(kbs["university"])
    assert time.perf_counter() - start < 1.0
    assert {a.key for a in args} == UNIVERSITY_ARGUMENTS
    assert [a.id for a in args] == [f"a{i}" for i in range(13)]


def test_ids_are_canonical(kbs):
    first = [str(a) for a in enumerate_arguments(kbs["university"])]
    again = [str(a) for a in enumerate_arguments(load_kb(kb_path("university")))]
    assert first == again
    assert first[0] == "a0: {gc(kr)} ⇒ gc(kr)"


@pytest.mark.parametrize("name", ["university", "k2", "k3", "k4", "k5", "focused", "consistent"])
def test_arguments_match_brute_force(kbs, name):
    kb = kbs[name]
    args = enumerate_arguments(kb)
    assert {a.key for a in args} == brute_arguments(kb)
    for a in args:
        assert validate_tree(kb, a.tree)
        assert a.tree.leaves() == a.support
        assert a.conclusion in closure(kb, a.support)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_arguments_random(seed):
    kb = random_kb(seed)
    args = enumerate_arguments(kb)
    assert {a.key for a in args} == brute_arguments(kb)
    assert all(validate_tree(kb, a.tree) for a in args)


def test_rule_arguments_in_defeasible_modes(kbs):
    k3 = kbs["k3"]
    concl = {str(a.conclusion) for a in enumerate_arguments(k3)}
    assert {"d1: p, q => r", "s1: ~p -> u", "q", "~r", "~p", "u"} == concl


def test_cyclic_kb_rejected():
    with pytest.raises(CyclicDependencyError):
        enumerate_arguments(load_kb(kb_path("cyclic")))


def test_argument_cap(kbs, monkeypatch):
    monkeypatch.setenv("PSAF_MAX_ARGS", "5")
    with pytest.raises(TooManyArgumentsError):
        enumerate_arguments(kbs["university"])


# ------------------------------------------------------------------ attacks


def test_collective_attacks_k4(kbs):
    af = build_psaf(kbs["k4"])
    assert len(af.arguments) == 3
    for a in af.arguments:
        others = frozenset(b.id for b in af.arguments if b.id != a.id)
        assert af.attacks_on(a.id) == [others]


def test_ta_argument_attacks(kbs):
    af = build_psaf(kbs["university"])
    ta = af.by_key[(lits("taOf(v,kd)", "uc(kd)"), L("ta(v)"))]
    lect = af.by_key[(lits("te(v,kd)"), L("lect(v)"))]
    rese = af.by_key[(lits("gc(kr)", "te(v,kr)"), L("rese(v)"))]
    assert frozenset([lect.id]) in af.attacks_on(ta.id)
    assert frozenset([ta.id]) in af.attacks_on(rese.id)


def _attack_check(kb, af):
    """Every listed attack is an attacking set, minimal ones are all listed."""
    every = {}
    for X, t in all_attacking_sets(kb, af.arguments):
        every.setdefault(t, set()).add(X)
    for a in af.arguments:
        listed = set(af.attacks_on(a.id))
        found = every.get(a.id, set())
        assert listed <= found
        minimal = {X for X in found if not any(Y < X for Y in found)}
        assert minimal <= listed
        for X in listed:
            assert is_consistent(kb, frozenset().union(*(af.by_id[x].support for x in X)))


@pytest.mark.parametrize("name", ["university", "k2", "k3", "k4", "k5", "focused"])
def test_attacks_against_brute_force(kbs, name):
    kb = kbs[name]
    _attack_check(kb, build_psaf(kb))


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_attacks_random(seed):
    kb = random_kb(seed, max_facts=4, max_rules=3)
    af = build_psaf(kb)
    if len(af.arguments) <= 9:
        _attack_check(kb, af)


def test_psaf_rejects_unknown_ids():
    with pytest.raises(ValueError):
        Psaf([], [SetAttack(frozenset(["a1"]), "a0", "rebuttal")])
