"""Tree-derivable arguments, minimal collective attacks and the framework."""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .logic import (
    Formula,
    KnowledgeBase,
    is_consistent,
    minimal_inconsistent_subsets,
    require_acyclic,
    set_key,
)

FACT = "fact"


class TooManyArgumentsError(RuntimeError):
    pass


def max_arguments() -> int:
    return int(os.environ.get("PSAF_MAX_ARGS", "10000"))


@dataclass(frozen=True)
class DerivationNode:
    """One node of a derivation tree.

    Leaves carry ``justification == "fact"`` and a member of the KB (a fact,
    or a rule in the defeasible modes). Inner nodes name the ground rule
    instance that produced ``formula`` from the children.
    """

    formula: Formula
    justification: str
    children: tuple["DerivationNode", ...] = ()

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def leaves(self) -> frozenset:
        if self.is_leaf:
            return frozenset([self.formula])
        return frozenset().union(*(c.leaves() for c in self.children))

    def depth(self) -> int:
        return 0 if self.is_leaf else 1 + max(c.depth() for c in self.children)

    def render(self) -> str:
        if self.is_leaf:
            return f"{self.formula}"
        inner = "; ".join(c.render() for c in self.children)
        return f"{self.formula} <{self.justification}> ({inner})"

    def to_dict(self) -> dict:
        return {
            "formula": str(self.formula),
            "justification": self.justification,
            "children": [c.to_dict() for c in self.children],
        }


@dataclass(frozen=True)
class Argument:
    id: str
    support: frozenset
    conclusion: Formula
    tree: DerivationNode = field(compare=False, hash=False, repr=False)

    @property
    def key(self) -> tuple:
        return (self.support, self.conclusion)

    def __str__(self) -> str:
        from .logic import render_set

        return f"{self.id}: {render_set(self.support)} ⇒ {self.conclusion}"


@dataclass(frozen=True)
class SetAttack:
    attackers: frozenset[str]
    target: str
    kind: str  # "rebuttal" | "undercut"

    def sort_key(self) -> tuple:
        return (_id_num(self.target), sorted(map(_id_num, self.attackers)), self.kind)


def _id_num(aid: str) -> int:
    return int(aid[1:])


@dataclass
class Psaf:
    """Arguments plus minimal collective attacks, with id lookup helpers."""

    arguments: list[Argument]
    attacks: list[SetAttack]
    kb: KnowledgeBase | None = None

    def __post_init__(self):
        self.by_id = {a.id: a for a in self.arguments}
        self.by_key = {a.key: a for a in self.arguments}
        attackers: dict[str, set[frozenset]] = {a.id: set() for a in self.arguments}
        for att in self.attacks:
            if att.target not in self.by_id or not att.attackers <= self.by_id.keys():
                raise ValueError(f"attack references unknown argument: {att}")
            attackers[att.target].add(att.attackers)
        self._attackers = {k: sorted(v, key=lambda s: sorted(map(_id_num, s))) for k, v in attackers.items()}
        # memo for derived results such as extension families
        self.cache: dict = {}

    @property
    def ids(self) -> list[str]:
        return [a.id for a in self.arguments]

    def attacks_on(self, aid: str) -> list[frozenset[str]]:
        """Distinct attacking sets against ``aid`` (kinds merged)."""
        return self._attackers[aid]

    def arguments_for(self, phi: Formula) -> list[Argument]:
        return [a for a in self.arguments if a.conclusion == phi]

    def args_of(self, base: Iterable[Formula]) -> frozenset[str]:
        """Ids of the arguments whose support lies inside ``base``."""
        base = frozenset(base)
        return frozenset(a.id for a in self.arguments if a.support <= base)


# ---------------------------------------------------------------- arguments


def _tree_rank(tree: DerivationNode) -> tuple:
    return (tree.depth(), tree.render())


def enumerate_arguments(kb: KnowledgeBase) -> list[Argument]:
    """All (support, conclusion) pairs realisable by a derivation tree.

    Supports are exact leaf sets; no minimality or consistency filter is
    applied. Each pair keeps its minimum-depth tree, ties broken by the
    rendered tree.
    """
    require_acyclic(kb)
    eng = kb.engine
    limit = max_arguments()
    best: dict[tuple, DerivationNode] = {}
    by_formula: dict[Formula, dict[frozenset, DerivationNode]] = {}

    def offer(support: frozenset, conclusion: Formula, tree: DerivationNode) -> bool:
        key = (support, conclusion)
        old = best.get(key)
        if old is not None and _tree_rank(old) <= _tree_rank(tree):
            return False
        best[key] = tree
        by_formula.setdefault(conclusion, {})[support] = tree
        if len(best) > limit:
            raise TooManyArgumentsError(
                f"more than {limit} arguments; raise PSAF_MAX_ARGS to continue"
            )
        return True

    for member in kb.defeasible_part:
        offer(frozenset([member]), member, DerivationNode(member, FACT))

    steps = [s for s in eng.steps if not s.rule.is_constraint]
    changed = True
    while changed:
        changed = False
        for step in steps:
            if step.source is not None and step.source not in by_formula:
                continue
            options = []
            for lit in step.rule.body:
                opts = by_formula.get(lit)
                if not opts:
                    break
                options.append(sorted(opts.items(), key=lambda kv: set_key(kv[0])))
            else:
                extra = frozenset([step.source]) if step.source is not None else frozenset()
                rule_leaf = (DerivationNode(step.source, FACT),) if step.source is not None else ()
                for combo in itertools.product(*options):
                    support = frozenset().union(*(s for s, _ in combo)) | extra
                    children = tuple(t for _, t in combo) + rule_leaf
                    tree = DerivationNode(step.rule.head, step.rule.id, children)
                    if offer(support, step.rule.head, tree):
                        changed = True

    ordered = sorted(best.items(), key=lambda kv: (set_key(kv[0][0]), str(kv[0][1])))
    return [
        Argument(f"a{i}", support, conclusion, tree)
        for i, ((support, conclusion), tree) in enumerate(ordered)
    ]


def subarguments(a: Argument, args: Iterable[Argument]) -> list[Argument]:
    return [b for b in args if b.support <= a.support]


def validate_tree(kb: KnowledgeBase, tree: DerivationNode) -> bool:
    """Independent check that every node of ``tree`` is justified."""
    if tree.is_leaf:
        return tree.justification == FACT and tree.formula in kb.defeasible_part
    child_formulas = [c.formula for c in tree.children]
    for step in kb.engine.steps:
        rule = step.rule
        if rule.id != tree.justification or rule.head != tree.formula:
            continue
        needed = list(rule.body) + ([step.source] if step.source is not None else [])
        if sorted(map(str, needed)) == sorted(map(str, child_formulas)):
            return all(validate_tree(kb, c) for c in tree.children)
    return False


# ------------------------------------------------------------------ attacks


def _minimal_families(sets: Iterable[frozenset]) -> list[frozenset]:
    out: list[frozenset] = []
    for s in sorted(set(sets), key=lambda x: (len(x), sorted(map(str, x)))):
        if not any(o <= s for o in out):
            out.append(s)
    return out


def enumerate_attacks(kb: KnowledgeBase, args: Sequence[Argument]) -> list[SetAttack]:
    """All subset-minimal attacking sets, per target and per kind.

    A set X attacks A when the union of the supports of X is consistent and
    the conclusions of X are inconsistent with the conclusion of A (rebuttal)
    or with the support of A (undercut). The target itself never takes part
    in an attack on itself.
    """
    conclusions = frozenset(a.conclusion for a in args)
    conflicts = minimal_inconsistent_subsets(kb, conclusions)
    by_conclusion: dict[Formula, list[Argument]] = {}
    for a in args:
        by_conclusion.setdefault(a.conclusion, []).append(a)

    cache: dict[frozenset, list[frozenset]] = {}

    def minimal_partners(T: frozenset) -> list[frozenset]:
        if T in cache:
            return cache[T]
        if not is_consistent(kb, T):
            result = [frozenset([w]) for w in conclusions]
        else:
            result = _minimal_families(m - T for m in conflicts if m - T)
        cache[T] = result
        return result

    attacks: set[SetAttack] = set()
    for target in args:
        for kind, T in (("rebuttal", frozenset([target.conclusion])), ("undercut", target.support)):
            for D in minimal_partners(T):
                pools = [
                    [b for b in by_conclusion[c] if b.id != target.id] for c in sorted(D, key=str)
                ]
                for combo in itertools.product(*pools):
                    support = frozenset().union(*(b.support for b in combo))
                    if is_consistent(kb, support):
                        attacks.add(SetAttack(frozenset(b.id for b in combo), target.id, kind))
    return sorted(attacks, key=SetAttack.sort_key)


def all_attacking_sets(kb: KnowledgeBase, args: Sequence[Argument]) -> list[tuple[frozenset, str]]:
    """Every attacking set, minimal or not (exponential; for small oracles)."""
    out = []
    for target in args:
        others = [a for a in args if a.id != target.id]
        for r in range(1, len(others) + 1):
            for X in itertools.combinations(others, r):
                support = frozenset().union(*(b.support for b in X))
                if not is_consistent(kb, support):
                    continue
                cons = frozenset(b.conclusion for b in X)
                if not is_consistent(kb, cons | {target.conclusion}) or not is_consistent(
                    kb, cons | target.support
                ):
                    out.append((frozenset(b.id for b in X), target.id))
    return out


def build_psaf(kb: KnowledgeBase) -> Psaf:
    args = enumerate_arguments(kb)
    return Psaf(args, enumerate_attacks(kb, args), kb)

