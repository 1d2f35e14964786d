from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_extensions
from psaf.arguments import build_psaf
from psaf.logic import enumerate_mcs, parse_kb, parse_literal
from psaf.randomkb import random_kb
from psaf.semantics import (
    accepted,
    base_of,
    enumerate_extensions,
    grounded_extension,
    grounded_ranks,
    ideal_set,
    is_admissible,
    is_complete,
    is_stable,
    repair_report,
    verify_postulates,
)

L = parse_literal
FIXTURES = ["university", "k2", "k3", "k4", "k5", "focused", "consistent"]


def lits(*texts):
    return frozenset(L(t) for t in texts)


def _families(af):
    return {sem: set(enumerate_extensions(af, sem)) for sem in ("admissible", "complete", "preferred", "stable", "grounded")}


@pytest.mark.parametrize("name", FIXTURES)
def test_extensions_match_brute_force(kbs, name):
    af = build_psaf(kbs[name])
    assert _families(af) == brute_extensions(af.ids, af.attacks_on)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_extensions_random(seed):
    af = build_psaf(random_kb(seed))
    if len(af.arguments) <= 12:
        assert _families(af) == brute_extensions(af.ids, af.attacks_on)


def test_predicates_agree_with_families(kbs):
    af = build_psaf(kbs["university"])
    for E in enumerate_extensions(af, "complete"):
        assert is_admissible(af, E) and is_complete(af, E)
    for E in enumerate_extensions(af, "stable"):
        assert is_stable(af, E)


def test_university_extensions(kbs):
    af = build_psaf(kbs["university"])
    stable = enumerate_extensions(af, "stable")
    assert len(stable) == 3
    assert stable == enumerate_extensions(af, "preferred")
    assert {base_of(af, E) for E in stable} == set(enumerate_mcs(kbs["university"]))
    assert grounded_extension(af) == {af.by_key[(lits("gc(kr)"), L("gc(kr)"))].id}


def test_k4_preferred_are_pairs(kbs):
    af = build_psaf(kbs["k4"])
    prefs = enumerate_extensions(af, "preferred")
    assert [base_of(af, E) for E in prefs] == [
        lits("A(a)", "B(a)"),
        lits("A(a)", "C(a)"),
        lits("B(a)", "C(a)"),
    ]


def test_k5_grounded_empty(kbs):
    af = build_psaf(kbs["k5"])
    assert grounded_extension(af) == frozenset()
    assert accepted(af, L("A(a)"), "credulous").accepted
    assert not accepted(af, L("A(a)"), "grounded").accepted
    assert not accepted(af, L("A(a)"), "sceptical").accepted


def test_acceptance_on_university(kbs):
    af = build_psaf(kbs["university"])
    q = L("rese(v)")
    for sem in ("admissible", "preferred", "stable"):
        assert accepted(af, q, "credulous", sem).accepted
    assert not accepted(af, q, "sceptical").accepted
    assert not accepted(af, q, "grounded").accepted
    witness = accepted(af, q, "credulous").witnesses[0]
    assert q in {af.by_id[a].conclusion for a in witness}


def test_grounded_ranks_are_levels():
    text = "@mode datalog\nfact p(a).\nfact q(a).\nfact r(a).\nrule s: r(X) -> s(X).\nconstraint c: p(X), q(X) -> !.\n"
    af = build_psaf(parse_kb(text))
    ranks = grounded_ranks(af)
    assert set(ranks) == grounded_extension(af)
    assert {str(af.by_id[a].conclusion): r for a, r in ranks.items()} == {"r(a)": 1, "s(a)": 1}


def test_ideal_set_inside_every_preferred(kbs):
    for name in FIXTURES:
        af = build_psaf(kbs[name])
        ideal = ideal_set(af)
        assert is_admissible(af, ideal)
        assert all(ideal <= E for E in enumerate_extensions(af, "preferred"))


def test_minimal_attacks_suffice():
    """Extensions do not change when every attacking set is used."""
    from psaf.arguments import Psaf, SetAttack, all_attacking_sets

    for seed in range(60):
        kb = random_kb(seed, max_facts=4, max_rules=3)
        af = build_psaf(kb)
        if len(af.arguments) > 9:
            continue
        full = Psaf(af.arguments, [SetAttack(X, t, "any") for X, t in all_attacking_sets(kb, af.arguments)], kb)
        for sem in ("complete", "preferred", "stable", "grounded"):
            assert enumerate_extensions(af, sem) == enumerate_extensions(full, sem), (seed, sem)


# --------------------------------------------------------------- reports


@pytest.mark.parametrize("name", FIXTURES)
def test_repair_report_on_fixtures(kbs, name):
    report = repair_report(kbs[name])
    assert all(c["status"] == "pass" for c in report["checks"]), report


@pytest.mark.parametrize("name", FIXTURES)
@pytest.mark.parametrize("sem", ["complete", "preferred", "stable", "grounded"])
def test_postulates_on_fixtures(kbs, name, sem):
    af = build_psaf(kbs[name])
    report = verify_postulates(af, kbs[name], sem)
    assert all(c["status"] == "pass" for c in report["checks"]), report


def test_admissible_sets_are_not_closed(kbs):
    """Admissible sets are consistent but need not be closed: the two fact
    arguments for taOf(v,kd) and uc(kd) are admissible without ta(v)."""
    af = build_psaf(kbs["university"])
    report = verify_postulates(af, kbs["university"], "admissible")
    failing = [c for c in report["checks"] if c["status"] == "fail"]
    assert failing and all(c["name"].startswith("closure") for c in failing)
