"""Abstract dialogue trees, winning-dialogue generation and classification."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .arguments import FACT, Argument, DerivationNode, Psaf, build_psaf
from .dialogue import (
    Content,
    Dialogue,
    DialogueError,
    DialogueTree,
    TreeNode,
    Utterance,
    arguments_at,
    build_tree,
    check_properties,
    defence_set,
    focused_subtrees,
    is_focused,
    is_last_word,
)
from .logic import (
    Formula,
    KnowledgeBase,
    closure,
    is_consistent,
    minimal_inconsistent_subsets,
    render_set,
    set_key,
    sort_formulas,
)
from .semantics import (
    accepted,
    enumerate_extensions,
    grounded_ranks,
    ideal_set,
)

MAX_DEPTH = 200


class GenerationError(RuntimeError):
    pass


# ------------------------------------------------------------ presentation


def cut_tree(kb: KnowledgeBase, tree: DerivationNode, keep_root: bool) -> DerivationNode:
    """Replace every KB member below the root by a leaf.

    Inside a dialogue a formula that belongs to the knowledge base is
    tagged as a fact as soon as it is uttered, so only these trees can be
    spelled out move by move.
    """
    members = kb.defeasible_part

    def cut(node: DerivationNode, top: bool) -> DerivationNode:
        if node.formula in members and not (top and keep_root):
            return DerivationNode(node.formula, FACT)
        if node.is_leaf:
            return node
        return DerivationNode(node.formula, node.justification, tuple(cut(c, False) for c in node.children))

    return cut(tree, True)


@dataclass(frozen=True)
class Shown:
    """An argument together with the tree used to utter it."""

    arg: Argument
    tree: DerivationNode


def present(af: Psaf, a: Argument, at_root: bool = False) -> Shown:
    kb = af.kb
    tree = cut_tree(kb, a.tree, keep_root=at_root)
    shown = af.by_key[(tree.leaves(), a.conclusion)]
    return Shown(shown, tree)


# ------------------------------------------------------------ abstract trees


@dataclass
class AbstractGroup:
    """A collective attack hanging off one abstract node.

    ``attach`` is the set of formulas of the attacked argument the group
    is aimed at; ``rebuttal`` marks groups aimed at the conclusion itself.
    """

    members: list["AbstractNode"]
    attach: frozenset
    rebuttal: bool = False


@dataclass
class AbstractNode:
    shown: Shown
    role: str
    groups: list[AbstractGroup] = field(default_factory=list)

    @property
    def arg(self) -> Argument:
        return self.shown.arg

    def walk(self):
        yield self
        for g in self.groups:
            for m in g.members:
                yield from m.walk()


@dataclass
class AbstractDialogueTree:
    root: AbstractNode
    kb: KnowledgeBase

    def nodes(self) -> list[AbstractNode]:
        return list(self.root.walk())

    @property
    def defence_set(self) -> frozenset:
        out: set = set()
        for n in self.root.walk():
            if n.role == "P":
                out |= n.arg.support
        return frozenset(out)

    @property
    def culprits(self) -> frozenset:
        members = self.kb.defeasible_part
        out: set = set()
        for n in self.root.walk():
            if n.role == "O":
                for g in n.groups:
                    out |= {f for f in g.attach if f in members}
        return frozenset(out)

    def render(self) -> str:
        lines = []

        def go(n: AbstractNode, depth: int) -> None:
            lines.append("  " * depth + f"{n.role} {n.arg}")
            for g in n.groups:
                lines.append("  " * (depth + 1) + f"attacks {render_set(g.attach)}:")
                for m in g.members:
                    go(m, depth + 2)

        go(self.root, 0)
        return "\n".join(lines)


def to_abstract(t: DialogueTree, af: Psaf) -> AbstractDialogueTree:
    """Abstract view of a focused, last-word dialogue tree."""
    if not is_focused(t):
        raise DialogueError("to_abstract needs a focused tree")
    if not is_last_word(t):
        raise DialogueError("to_abstract needs a last-word tree")
    utts = t.source.by_id()

    def attach_of(uid: int) -> tuple[frozenset, bool]:
        c = utts[uid].content
        if c.against:
            return frozenset(c.against), False
        return frozenset([c.phi]), True

    def shown_of(root: TreeNode) -> tuple[Shown, list[TreeNode]]:
        pas = arguments_at(root)
        if not pas:
            raise DialogueError(f"no complete argument at {root.formula}")
        pa = pas[0]
        a = af.by_key.get(pa.key)
        if a is None:
            raise DialogueError(f"{pa} matches no argument")
        return Shown(a, _derivation_of(pa.root, set(pa.node_ids), af.kb)), list(pa.nodes)

    def build(root: TreeNode) -> AbstractNode:
        shown, nodes = shown_of(root)
        node = AbstractNode(shown, root.label)
        by_uid: dict[int, list[TreeNode]] = {}
        for n in nodes:
            for c in n.attack_children():
                by_uid.setdefault(c.history[0], []).append(c)
        for uid in sorted(by_uid):
            attach, rebuttal = attach_of(uid)
            members: list[AbstractNode] = []
            seen = set()
            for c in by_uid[uid]:
                m = build(c)
                if m.arg.key in seen:
                    continue
                seen.add(m.arg.key)
                members.append(m)
            node.groups.append(AbstractGroup(members, attach, rebuttal))
        return node

    root = build(t.root)
    # a counter spread over several members of an opponent group is kept once
    for n in root.walk():
        for g in n.groups:
            if n.role != "P":
                continue
            seen_attach: set = set()
            for m in g.members:
                kept = []
                for pg in m.groups:
                    sig = (pg.attach, tuple(x.arg.key for x in pg.members))
                    if sig in seen_attach:
                        continue
                    seen_attach.add(sig)
                    kept.append(pg)
                m.groups = kept
    return AbstractDialogueTree(root, t.source.kb)


def _derivation_of(node: TreeNode, ids: set, kb: KnowledgeBase) -> DerivationNode:
    kids = [c for c in node.inference_children() if c.uid in ids]
    if not kids:
        return DerivationNode(node.formula, FACT)
    for step in kb.engine.steps:
        rule = step.rule
        if rule.head != node.formula:
            continue
        need = list(rule.body) + ([step.source] if step.source is not None else [])
        if sorted(map(str, need)) == sorted(str(c.formula) for c in kids):
            return DerivationNode(node.formula, rule.id, tuple(_derivation_of(c, ids, kb) for c in kids))
    raise DialogueError(f"no rule derives {node.formula} from the offered grounds")


class _Emitter:
    def __init__(self, kb: KnowledgeBase, kb_ref: str = ""):
        self.kb = kb
        self.kb_ref = kb_ref
        self.utts: list[Utterance] = []

    def emit(self, agent: str, target: int, content: Content) -> int:
        uid = len(self.utts) + 1
        self.utts.append(Utterance(agent, target, uid, content))
        return uid

    def spell(self, tree: DerivationNode, handle: int, agent: str) -> None:
        """Offer the grounds of every inner node, depth first."""
        if tree.is_leaf:
            return
        delta = tuple(sort_formulas(c.formula for c in tree.children))
        uid = self.emit(agent, handle, Content("offer", tree.formula, delta))
        for c in sorted(tree.children, key=lambda c: str(c.formula)):
            self.spell(c, uid, agent)


def from_abstract(at: AbstractDialogueTree, kb_ref: str = "") -> tuple[Dialogue, DialogueTree]:
    """Spell an abstract tree out as a legal dialogue and its tree."""
    kb = at.kb
    em = _Emitter(kb, kb_ref)
    root = at.root
    phi = root.arg.conclusion
    em.emit("a1", 0, Content("claim", phi))
    if root.shown.tree.is_leaf:
        handle = em.emit("a1", 1, Content("fact", phi))
    else:
        em.spell(root.shown.tree, 1, "a1")
        handle = 1

    def agent(role: str) -> str:
        return "a1" if role == "P" else "a2"

    def expand(node: AbstractNode, handle: int) -> None:
        for g in node.groups:
            side = agent(g.members[0].role)
            delta = tuple(sort_formulas(m.arg.conclusion for m in g.members))
            if g.rebuttal:
                content = Content("contrary", next(iter(g.attach)), delta)
            else:
                content = Content("contrary", None, delta, tuple(sort_formulas(g.attach)))
            uid = em.emit(side, handle, content)
            for m in g.members:
                em.spell(m.shown.tree, uid, side)
            for m in g.members:
                expand(m, uid)

    expand(root, handle)
    em.emit("a2", 1, Content("concede", phi))
    d = Dialogue(kb, em.utts, kb_ref)
    return d, build_tree(d)


# --------------------------------------------------------------- generation


def _union_support(args: Sequence[Argument]) -> frozenset:
    return frozenset().union(*(a.support for a in args)) if args else frozenset()


class _Generator:
    def __init__(self, af: Psaf, pool: frozenset, cut: bool, ranks: dict | None = None):
        self.af = af
        self.kb = af.kb
        self.pool = pool
        self.cut = cut
        self.ranks = ranks
        self._closure: dict = {}
        self.o_keys: set = set()
        shown = [present(af, af.by_id[a]) for a in sorted(pool, key=lambda i: int(i[1:]))]
        self.usable = list({s.arg.id: s for s in shown if s.arg.id in pool}.values())

    def closed_support(self, X: frozenset) -> frozenset:
        if X not in self._closure:
            self._closure[X] = closure(self.kb, _union_support([self.af.by_id[x] for x in X]))
        return self._closure[X]

    def covered(self, X: frozenset, gammas: Sequence[frozenset]) -> bool:
        cl = self.closed_support(X)
        return any(g <= cl for g in gammas)

    def counter(self, target_rank: int | None, group: list[Shown]):
        """Smallest set of pool arguments whose conclusions contradict the
        joint support of ``group``.

        Arguments already raised by the opponent are avoided when possible,
        so that no argument ends up on both sides of the tree.
        """
        U = _union_support([s.arg for s in group])
        usable = [s for s in self.usable if target_rank is None or self.ranks[s.arg.id] < target_rank]
        by_con: dict = {}
        for s in usable:
            by_con.setdefault(s.arg.conclusion, []).append(s)
        conflicts = minimal_inconsistent_subsets(self.kb, frozenset(by_con) | U)
        best = None
        for M in conflicts:
            need = M - U
            if not need or not need <= by_con.keys():
                continue
            ys = [min(by_con[c], key=self._preference) for c in sort_formulas(need)]
            key = (
                sum(y.arg.key in self.o_keys for y in ys),
                max((self.ranks[y.arg.id] for y in ys), default=0) if self.ranks else 0,
                len(ys),
                sorted(int(y.arg.id[1:]) for y in ys),
            )
            if best is None or key < best[0]:
                best = (key, ys)
        return None if best is None else best[1]

    def _preference(self, s: Shown) -> tuple:
        rank = self.ranks[s.arg.id] if self.ranks else 0
        return (s.arg.key in self.o_keys, rank, s.tree.depth(), int(s.arg.id[1:]))

    def defend(self, shown: Shown, scope: list[frozenset], depth: int) -> AbstractNode:
        if depth > MAX_DEPTH:
            raise GenerationError("dialogue generation did not terminate")
        af = self.af
        node = AbstractNode(shown, "P")
        local: list[frozenset] = []
        rank = self.ranks.get(shown.arg.id) if self.ranks is not None else None
        # smaller attacking sets first: answering them often covers their supersets
        for X in sorted(af.attacks_on(shown.arg.id), key=len):
            if self.covered(X, (scope + local) if self.cut else local):
                continue
            group = [present(af, af.by_id[x]) for x in sorted(X, key=lambda i: int(i[1:]))]
            self.o_keys |= {g.arg.key for g in group}
            ys = self.counter(rank, group)
            if ys is None:
                raise GenerationError(f"no counter-attack for {render_set(g.arg.conclusion for g in group)}")
            gamma = _union_support([g.arg for g in group])
            local.append(gamma)
            cons = frozenset(g.arg.conclusion for g in group)
            rebuttal = not _consistent_with(self.kb, cons, shown.arg.conclusion)
            o_nodes = [AbstractNode(g, "O") for g in group]
            attach = frozenset([shown.arg.conclusion]) if rebuttal else _attach_set(self.kb, cons, shown.arg.support)
            node.groups.append(AbstractGroup(o_nodes, attach, rebuttal))
            child_scope = scope + local if self.cut else []
            p_nodes = [self.defend(y, child_scope, depth + 1) for y in ys]
            o_nodes[0].groups.append(AbstractGroup(p_nodes, gamma, False))
        return node


def _consistent_with(kb, cons: frozenset, phi) -> bool:
    return is_consistent(kb, cons | {phi})


def _attach_set(kb, cons: frozenset, support: frozenset) -> frozenset:
    """Smallest part of ``support`` contradicted by ``cons``."""
    conflicts = minimal_inconsistent_subsets(kb, cons | support)
    options = [M & support for M in conflicts if M & support and not M <= support]
    return min(options, key=set_key) if options else support


def witness_tree(
    kb: KnowledgeBase, phi: Formula, mode: str, sem: str = "preferred", af: Psaf | None = None
) -> AbstractDialogueTree | None:
    """Abstract winning tree for ``phi`` built from a witness extension."""
    af = af or build_psaf(kb)
    if not accepted(af, phi, mode, sem).accepted:
        return None
    ranks = None
    cut = True
    if mode == "grounded":
        ranks = grounded_ranks(af)
        pools = [frozenset(ranks)]
        cut = False
    elif mode == "sceptical":
        pools = [ideal_set(af)]
    else:
        pools = enumerate_extensions(af, "stable" if sem == "stable" else "preferred")
    for pool in pools:
        roots = []
        for a in af.arguments_for(phi):
            s = present(af, a, at_root=True)
            if s.arg.id in pool:
                roots.append(s)
        if not roots:
            continue
        root = min(roots, key=lambda s: (s.tree.depth(), set_key(s.arg.support)))
        gen = _Generator(af, pool, cut, ranks)
        return AbstractDialogueTree(gen.defend(root, [], 0), kb)
    return None


# ------------------------------------------------------------ classification


SUCCESS_KINDS = ("admissible", "preferred", "stable", "grounded", "sceptical")


@dataclass
class Classification:
    successes: frozenset
    certificate: dict = field(default_factory=dict)

    @property
    def label(self) -> str:
        return ", ".join(f"{k}-successful" for k in SUCCESS_KINDS if k in self.successes) or "unsuccessful"

    def __contains__(self, kind: str) -> bool:
        return kind in self.successes


def exhaustive(t: DialogueTree, af: Psaf, cut: bool) -> bool:
    """Every minimal attack on every proponent argument of ``t`` is answered.

    An answer is a proponent counter-attack aimed at formulas that follow
    from the attackers' supports. With ``cut`` an answer given higher up on
    the same branch also counts; without it every occurrence needs its own.
    """
    kb = af.kb
    cache: dict = {}

    def closed(X: frozenset) -> frozenset:
        if X not in cache:
            cache[X] = closure(kb, _union_support([af.by_id[x] for x in X]))
        return cache[X]

    def visit(root: TreeNode, scope: list[frozenset]) -> bool:
        pas = arguments_at(root)
        if not pas:
            return False
        for pa in pas:
            a = af.by_key.get(pa.key)
            if a is None:
                return False
            o_roots = [c for n in pa.nodes for c in n.attack_children()]
            local: list[frozenset] = []
            p_roots: list[TreeNode] = []
            for o in o_roots:
                for opa in arguments_at(o):
                    by_uid: dict[int, set] = {}
                    for n in opa.nodes:
                        for c in n.attack_children():
                            by_uid.setdefault(c.history[0], set()).add(n.formula)
                            p_roots.append(c)
                    local.extend(frozenset(v) for v in by_uid.values())
            gammas = scope + local if cut else local
            for X in af.attacks_on(a.id):
                cl = closed(X)
                if not any(g <= cl for g in gammas):
                    return False
            child_scope = scope + local if cut else []
            seen = set()
            for c in p_roots:
                if c.uid in seen:
                    continue
                seen.add(c.uid)
                if not visit(c, child_scope):
                    return False
        return True

    return visit(t.root, [])


def classify_success(d: Dialogue, af: Psaf | None = None, redundancy: str = "non_redundant") -> Classification:
    """Search the focused subtrees of ``d`` for winning ones.

    ``redundancy`` names the property from :func:`check_properties` used as
    the non-redundancy requirement of credulous success.
    """
    kb = d.kb
    af = af or build_psaf(kb)
    tree = build_tree(d)
    wins: set = set()
    cert: dict = {}
    for i, (sub, sd) in enumerate(focused_subtrees(tree)):
        props = check_properties(sub, af)
        if not props["defensive"] or not is_consistent(kb, defence_set(sub)):
            continue
        try:
            cred = props[redundancy] and exhaustive(sub, af, cut=True)
            grd = exhaustive(sub, af, cut=False)
        except KeyError:
            continue
        found = set()
        if cred:
            found |= {"admissible", "preferred", "stable"}
            if props["ideal"]:
                found.add("sceptical")
        if grd:
            found.add("grounded")
        new = found - wins
        if new:
            wins |= found
            cert.setdefault("subtrees", []).append(
                {"index": i, "successes": sorted(new), "defence_set": sorted(map(str, defence_set(sub)))}
            )
    return Classification(frozenset(wins), cert)


MODE_SUCCESS = {"credulous": "preferred", "grounded": "grounded", "sceptical": "sceptical"}


@dataclass
class GeneratedDialogue:
    dialogue: Dialogue
    tree: DialogueTree
    abstract: AbstractDialogueTree
    classification: Classification


def generate_dialogue(
    kb: KnowledgeBase,
    phi: Formula,
    mode: str,
    sem: str = "preferred",
    af: Psaf | None = None,
    kb_ref: str = "",
) -> GeneratedDialogue | None:
    """A winning dialogue for ``phi`` under ``mode``, or None when ``phi`` is
    not accepted or no witness tree can be built."""
    af = af or build_psaf(kb)
    at = witness_tree(kb, phi, mode, sem, af)
    if at is None:
        return None
    d, t = from_abstract(at, kb_ref)
    return GeneratedDialogue(d, t, at, classify_success(d, af))
