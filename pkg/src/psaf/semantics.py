"""Extension semantics for frameworks with collective attacks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .arguments import Psaf, build_psaf
from .logic import (
    BOTTOM,
    Formula,
    KnowledgeBase,
    closure,
    enumerate_mcs,
    is_consistent,
    mcs_query,
    render_set,
)

SEMANTICS = ("admissible", "complete", "preferred", "stable", "grounded")
MODES = ("credulous", "sceptical", "grounded")

IN, OUT, UNDEC = 1, 2, 3


def _num(aid: str) -> int:
    return int(aid[1:])


def sort_extensions(af: Psaf, exts: Iterable[frozenset]) -> list[frozenset]:
    def key(E):
        base = base_of(af, E)
        return (len(base), sorted(map(str, base)), sorted(map(_num, E)))

    return sorted(set(exts), key=key)


def base_of(af: Psaf, E: Iterable[str]) -> frozenset:
    """Union of the supports of the arguments in ``E``."""
    out: set = set()
    for aid in E:
        out |= af.by_id[aid].support
    return frozenset(out)


def is_conflict_free(af: Psaf, S: Iterable[str]) -> bool:
    S = frozenset(S)
    return not any(X <= S for a in S for X in af.attacks_on(a))


def attacks_set(af: Psaf, S: frozenset, targets: Iterable[str]) -> bool:
    """True when some subset of ``S`` attacks a member of ``targets``."""
    return any(Y <= S for t in targets for Y in af.attacks_on(t))


def defends(af: Psaf, S: Iterable[str], aid: str) -> bool:
    S = frozenset(S)
    return all(attacks_set(af, S, X) for X in af.attacks_on(aid))


def is_admissible(af: Psaf, S: Iterable[str]) -> bool:
    S = frozenset(S)
    return is_conflict_free(af, S) and all(defends(af, S, a) for a in S)


def is_complete(af: Psaf, S: Iterable[str]) -> bool:
    S = frozenset(S)
    return is_admissible(af, S) and all(a in S for a in af.ids if defends(af, S, a))


def is_stable(af: Psaf, S: Iterable[str]) -> bool:
    S = frozenset(S)
    return is_conflict_free(af, S) and all(
        attacks_set(af, S, [a]) for a in af.ids if a not in S
    )


def grounded_ranks(af: Psaf) -> dict[str, int]:
    """Iterate the characteristic function from the empty set; the rank of
    an argument is the first iteration that contains it."""
    ranks: dict[str, int] = {}
    current: frozenset = frozenset()
    level = 0
    while True:
        level += 1
        nxt = frozenset(a for a in af.ids if defends(af, current, a))
        for a in nxt - current:
            ranks[a] = level
        if nxt == current:
            return ranks
        current = nxt


def grounded_extension(af: Psaf) -> frozenset[str]:
    return frozenset(grounded_ranks(af))


class _Labeller:
    """Backtracking search over complete labellings."""

    def __init__(self, af: Psaf):
        self.af = af
        self.ids = af.ids
        self.attacks = {a: [tuple(X) for X in af.attacks_on(a)] for a in self.ids}
        self.watch: dict[str, set[str]] = {a: {a} for a in self.ids}
        for t, sets in self.attacks.items():
            for X in sets:
                for x in X:
                    self.watch[x].add(t)
        self.label: dict[str, int] = {}

    def _ok(self, a: str) -> bool:
        lab = self.label.get(a)
        if lab is None:
            return True
        labels = self.label
        if lab == IN:
            # every attack needs an attacker that is or may become OUT
            return all(any(labels.get(x, OUT) == OUT for x in X) for X in self.attacks[a])
        any_all_in_possible = False
        any_no_out_possible = False
        for X in self.attacks[a]:
            ls = [labels.get(x) for x in X]
            if all(l == IN for l in ls) and lab == UNDEC:
                return False
            if all(l in (IN, None) for l in ls):
                any_all_in_possible = True
            if all(l != OUT for l in ls):
                any_no_out_possible = True
        if lab == OUT:
            return any_all_in_possible
        return any_no_out_possible

    def _forced(self, a: str) -> int | None:
        """Label implied for ``a`` by its attackers' labels so far."""
        labels = self.label
        pending = False
        all_out_hit = True
        for X in self.attacks[a]:
            ls = [labels.get(x) for x in X]
            if all(l == IN for l in ls):
                return OUT
            if OUT not in ls:
                all_out_hit = False
                if None in ls:
                    pending = True
        if all_out_hit:
            return IN
        return None if pending else UNDEC

    def _assign(self, a: str, lab: int, trail: list[str]) -> bool:
        """Label ``a`` and propagate forced labels; False on contradiction."""
        queue = [(a, lab)]
        while queue:
            b, l = queue.pop()
            old = self.label.get(b)
            if old is not None:
                if old != l:
                    return False
                continue
            self.label[b] = l
            trail.append(b)
            for c in self.watch[b]:
                if not self._ok(c):
                    return False
                if c not in self.label:
                    f = self._forced(c)
                    if f is not None:
                        queue.append((c, f))
        return True

    def run(self, want_undec: bool = True) -> list[dict[str, int]]:
        results: list[dict[str, int]] = []
        order = self.ids

        def go(i: int) -> None:
            while i < len(order) and order[i] in self.label:
                i += 1
            if i == len(order):
                if want_undec or UNDEC not in self.label.values():
                    results.append(dict(self.label))
                return
            a = order[i]
            for lab in (IN, OUT, UNDEC) if want_undec else (IN, OUT):
                trail: list[str] = []
                if self._assign(a, lab, trail):
                    go(i + 1)
                for b in trail:
                    del self.label[b]

        # unattacked arguments are IN in every complete labelling
        seed: list[str] = []
        for a in order:
            if not self.attacks[a] and a not in self.label:
                if not self._assign(a, IN, seed):
                    return results
        go(0)
        return results


def complete_extensions(af: Psaf) -> list[frozenset[str]]:
    labs = _Labeller(af).run()
    return [frozenset(a for a, l in lab.items() if l == IN) for lab in labs]


def stable_extensions(af: Psaf) -> list[frozenset[str]]:
    labs = _Labeller(af).run(want_undec=False)
    return [frozenset(a for a, l in lab.items() if l == IN) for lab in labs]


def admissible_extensions(af: Psaf) -> list[frozenset[str]]:
    """Every admissible set, by include/exclude backtracking.

    A branch is cut once some included argument has an attack that can no
    longer be countered by arguments that are included or still undecided.
    """
    ids = af.ids
    out: list[frozenset[str]] = []

    def viable(S: frozenset, excluded: frozenset) -> bool:
        for a in S:
            for X in af.attacks_on(a):
                if not any(
                    not (Y & excluded) for x in X for Y in af.attacks_on(x)
                ):
                    return False
        return True

    def go(i: int, S: frozenset, excluded: frozenset) -> None:
        if i == len(ids):
            if all(defends(af, S, a) for a in S):
                out.append(S)
            return
        a = ids[i]
        ex = excluded | {a}
        if viable(S, ex):
            go(i + 1, S, ex)
        T = S | {a}
        conflict = any(X <= T for X in af.attacks_on(a)) or any(
            a in X and X <= T for b in S for X in af.attacks_on(b)
        )
        if not conflict and viable(T, excluded):
            go(i + 1, T, excluded)

    go(0, frozenset(), frozenset())
    return out


def _maximal(sets: list[frozenset]) -> list[frozenset]:
    return [s for s in sets if not any(s < t for t in sets)]


def enumerate_extensions(af: Psaf, sem: str) -> list[frozenset[str]]:
    key = ("extensions", sem)
    if key not in af.cache:
        af.cache[key] = _enumerate(af, sem)
    return list(af.cache[key])


def _enumerate(af: Psaf, sem: str) -> list[frozenset[str]]:
    if sem == "grounded":
        exts = [grounded_extension(af)]
    elif sem == "complete":
        exts = complete_extensions(af)
    elif sem == "preferred":
        exts = _maximal(complete_extensions(af))
    elif sem == "stable":
        exts = stable_extensions(af)
    elif sem == "admissible":
        exts = admissible_extensions(af)
    else:
        raise ValueError(f"unknown semantics {sem!r}")
    return sort_extensions(af, exts)


def ideal_set(af: Psaf) -> frozenset[str]:
    """Largest admissible set contained in every preferred extension."""
    prefs = enumerate_extensions(af, "preferred")
    S = frozenset.intersection(*prefs) if prefs else frozenset()
    while True:
        kept = frozenset(a for a in S if defends(af, S, a))
        if kept == S:
            return S
        S = kept


def extension_conclusions(af: Psaf, E: Iterable[str]) -> frozenset:
    return frozenset(af.by_id[a].conclusion for a in E)


@dataclass
class Acceptance:
    accepted: bool
    witnesses: list[frozenset[str]]


def accepted(af: Psaf, phi: Formula, mode: str, sem: str = "preferred") -> Acceptance:
    """Credulous, sceptical or grounded acceptance of ``phi``.

    Credulous returns one witness extension; sceptical returns the full
    family; grounded returns the grounded extension.
    """
    if mode == "grounded":
        G = grounded_extension(af)
        return Acceptance(phi in extension_conclusions(af, G), [G])
    if sem not in ("admissible", "preferred", "stable"):
        raise ValueError(f"{mode} acceptance is defined for admissible, preferred or stable")
    if mode == "credulous":
        # any admissible witness extends to a preferred one
        family = enumerate_extensions(af, "preferred" if sem == "admissible" else sem)
        for E in family:
            if phi in extension_conclusions(af, E):
                return Acceptance(True, [E])
        return Acceptance(False, [])
    if mode == "sceptical":
        family = enumerate_extensions(af, sem)
        ok = bool(family) and all(phi in extension_conclusions(af, E) for E in family)
        return Acceptance(ok, family)
    raise ValueError(f"unknown acceptance mode {mode!r}")


# ------------------------------------------------------------------ reports


def _check(name: str, ok: bool, detail: str = "") -> dict:
    return {"name": name, "status": "pass" if ok else "fail", "detail": detail}


def _render_ext(af: Psaf, E: Iterable[str]) -> str:
    return "{" + ", ".join(sorted(E, key=_num)) + "}"


def verify_postulates(af: Psaf, kb: KnowledgeBase, sem: str) -> dict:
    """Consistency and closure of the conclusions of every extension."""
    checks = []
    for E in enumerate_extensions(af, sem):
        cons = extension_conclusions(af, E)
        label = _render_ext(af, E)
        consistent = is_consistent(kb, cons)
        checks.append(_check(f"consistency {label}", consistent, render_set(cons)))
        missing = frozenset(f for f in closure(kb, cons) if f != BOTTOM) - cons
        checks.append(
            _check(
                f"closure {label}",
                not missing,
                "missing " + render_set(missing) if missing else "",
            )
        )
    return {"checks": checks}


def repair_report(kb: KnowledgeBase, af: Psaf | None = None) -> dict:
    """Cross-check extensions against maximal consistent subsets."""
    if af is None:
        af = build_psaf(kb)
    repairs = enumerate_mcs(kb)
    repair_set = set(repairs)
    checks = []
    for sem in ("stable", "preferred"):
        bases = {base_of(af, E) for E in enumerate_extensions(af, sem)}
        extra = [render_set(b) for b in bases - repair_set]
        missing = [render_set(b) for b in repair_set - bases]
        detail = "" if not (extra or missing) else f"extra {extra}; missing {missing}"
        checks.append(_check(f"{sem} bases equal repairs", bases == repair_set, detail))

    G = grounded_extension(af)
    common = frozenset.intersection(*repairs) if repairs else frozenset()
    g_cons = extension_conclusions(af, G)
    common_closure = closure(kb, common)
    contained = g_cons <= common_closure
    coincide = g_cons == frozenset(
        f for f in common_closure if any(a.conclusion == f for a in af.arguments)
    )
    checks.append(
        _check(
            "grounded conclusions within closure of repair intersection",
            contained,
            "coincide" if coincide else "strictly contained",
        )
    )

    literals = sorted(
        (f for f in closure(kb, kb.defeasible_part) if f != BOTTOM), key=str
    )
    prefs = enumerate_extensions(af, "preferred")
    mismatches = []
    for phi in literals:
        some = mcs_query(kb, phi, "some", repairs)
        every = mcs_query(kb, phi, "all", repairs)
        inter = mcs_query(kb, phi, "intersection", repairs)
        cons_sets = [extension_conclusions(af, E) for E in prefs]
        cred = any(phi in c for c in cons_sets)
        scep = bool(cons_sets) and all(phi in c for c in cons_sets)
        grd = phi in g_cons
        for name, a, b in (("some/credulous", some, cred), ("all/sceptical", every, scep), ("intersection/grounded", inter, grd)):
            if a != b:
                mismatches.append(f"{phi} {name}: repairs={a} arguments={b}")
    checks.append(_check("query modes agree", not mismatches, "; ".join(mismatches)))
    return {"checks": checks}
