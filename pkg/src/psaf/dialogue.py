"""Explanatory dialogues: utterances, legal moves and dialogue trees.

A dialogue is a list of utterances. Replaying it builds a tree whose nodes
hold formulas tagged unmarked (``um``), non-fact (``nf``) or fact (``f``)
and labelled for the proponent (``P``) or the opponent (``O``). Inference
edges link a formula to the grounds offered for it; attack edges link a
formula to the contrary formulas raised against it.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .arguments import Argument, Psaf, enumerate_attacks
from .logic import (
    Formula,
    KnowledgeBase,
    cn_step,
    is_consistent,
    render_set,
)

KINDS = ("claim", "offer", "contrary", "concede", "fact", "pass")
UM, NF, F = "um", "nf", "f"
INFERENCE, ATTACK = "inference", "attack"


class DialogueError(ValueError):
    pass


@dataclass(frozen=True)
class Content:
    """Utterance content. ``against`` holds the formulas a set-contrary
    targets; it is empty for a contrary aimed at the single formula ``phi``."""

    kind: str
    phi: Formula | None = None
    delta: tuple[Formula, ...] = ()
    against: tuple[Formula, ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DialogueError(f"unknown utterance kind {self.kind!r}")

    def __str__(self) -> str:
        if self.kind == "pass":
            return "pass"
        if self.kind in ("claim", "concede", "fact"):
            return f"{self.kind}({self.phi})"
        target = render_set(self.against) if self.against else str(self.phi)
        return f"{self.kind}({render_set(self.delta)}, {target})"


@dataclass(frozen=True)
class Utterance:
    agent: str
    target: int
    id: int
    content: Content

    def __str__(self) -> str:
        return f"({self.agent}, {self.target}, {self.content}, {self.id})"


def claim(phi, id=1, agent="a1"):
    return Utterance(agent, 0, id, Content("claim", phi))


@dataclass
class Dialogue:
    kb: KnowledgeBase
    utterances: list[Utterance]
    kb_ref: str = ""

    @property
    def claim(self) -> Formula:
        return self.utterances[0].content.phi

    def by_id(self) -> dict[int, Utterance]:
        return {u.id: u for u in self.utterances}

    def to_dict(self) -> dict:
        out = []
        for u in self.utterances:
            content: dict = {"kind": u.content.kind}
            if u.content.phi is not None:
                content["phi"] = str(u.content.phi)
            if u.content.kind in ("offer", "contrary"):
                content["delta"] = [str(f) for f in u.content.delta]
            if u.content.against:
                content["against"] = [str(f) for f in u.content.against]
            out.append({"agent": u.agent, "target": u.target, "id": u.id, "content": content})
        return {"kb": self.kb_ref, "utterances": out}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)

    @classmethod
    def from_dict(cls, data: dict, kb: KnowledgeBase) -> "Dialogue":
        utts = []
        for item in data["utterances"]:
            c = item["content"]
            phi = kb.lookup(c["phi"]) if c.get("phi") is not None else None
            content = Content(
                c["kind"],
                phi,
                tuple(kb.lookup(s) for s in c.get("delta", [])),
                tuple(kb.lookup(s) for s in c.get("against", [])),
            )
            utts.append(Utterance(item["agent"], int(item["target"]), int(item["id"]), content))
        return cls(kb, utts, data.get("kb", ""))

    @classmethod
    def from_json(cls, text: str, kb: KnowledgeBase) -> "Dialogue":
        return cls.from_dict(json.loads(text), kb)


# ------------------------------------------------------------- legal moves


def _in_kb(kb: KnowledgeBase, phi: Formula) -> bool:
    return phi in kb.defeasible_part


def is_legal_move(kb: KnowledgeBase, so_far: Sequence[Utterance], u: Utterance) -> tuple[bool, str]:
    """Check ``u`` against the response table for its target utterance."""
    c = u.content
    if not so_far:
        if c.kind != "claim" or u.target != 0:
            return False, "a dialogue opens with a claim targeting 0"
        return True, "opening claim"
    if u.id <= so_far[-1].id:
        return False, f"identifier {u.id} is not increasing"
    if not 0 <= u.target < u.id:
        return False, "target must precede the utterance"
    if c.kind == "claim":
        return False, "only the opening utterance may be a claim"
    targets = {x.id: x for x in so_far}
    if c.kind in ("concede", "pass"):
        if u.target not in targets:
            return False, f"dangling target {u.target}"
        return True, "closing move"
    t = targets.get(u.target)
    if t is None:
        return False, f"dangling target {u.target}"
    tc = t.content
    if tc.kind in ("concede", "pass"):
        return False, f"no response is available after {tc.kind}"

    if c.kind == "offer":
        if not c.delta:
            return False, "offer needs nonempty grounds"
        if c.phi not in cn_step(kb, c.delta):
            return False, f"{c.phi} does not follow in one step from {render_set(c.delta)}"
        if tc.kind == "claim" and c.phi == tc.phi:
            return True, "offer for the claim"
        if tc.kind in ("offer", "contrary") and c.phi in tc.delta:
            return True, "offer for an uttered formula"
        return False, f"{c.phi} was not uttered by the target"

    if c.kind == "fact":
        if not _in_kb(kb, c.phi):
            return False, f"{c.phi} is not a member of the knowledge base"
        if tc.kind == "claim" and c.phi == tc.phi:
            return True, "fact for the claim"
        if tc.kind in ("offer", "contrary") and c.phi in tc.delta:
            return True, "fact for an uttered formula"
        return False, f"{c.phi} was not uttered by the target"

    if c.kind == "contrary":
        if not c.delta:
            return False, "contrary needs nonempty formulas"
        if c.against:
            if c.phi is not None:
                return False, "a contrary targets one formula or a set, not both"
            if is_consistent(kb, set(c.delta) | set(c.against)):
                return False, "contrary formulas are consistent with the attacked set"
            return True, "contrary against a set"
        if is_consistent(kb, set(c.delta) | {c.phi}):
            return False, f"{render_set(c.delta)} is consistent with {c.phi}"
        if tc.kind in ("claim", "fact", "offer") and c.phi == tc.phi:
            return True, "contrary to the target's formula"
        if tc.kind in ("offer", "contrary") and c.phi in tc.delta:
            return True, "contrary to an uttered formula"
        return False, f"{c.phi} was not uttered by the target"
    return False, f"unexpected kind {c.kind}"


def check_dialogue(d: Dialogue) -> None:
    seen: list[Utterance] = []
    for u in d.utterances:
        ok, reason = is_legal_move(d.kb, seen, u)
        if not ok:
            raise DialogueError(f"utterance {u.id} is not a legal move: {reason}")
        seen.append(u)


# ------------------------------------------------------------------- trees

_uid = itertools.count()


@dataclass(eq=False)
class TreeNode:
    formula: Formula
    tag: str
    label: str
    utterance_id: int
    children: list[tuple[str, "TreeNode"]] = field(default_factory=list)
    history: list[int] = field(default_factory=list, repr=False)
    uid: int = field(default_factory=lambda: next(_uid), repr=False)

    def inference_children(self) -> list["TreeNode"]:
        return [n for e, n in self.children if e == INFERENCE]

    def attack_children(self) -> list["TreeNode"]:
        return [n for e, n in self.children if e == ATTACK]

    def walk(self) -> Iterator["TreeNode"]:
        yield self
        for _, c in self.children:
            yield from c.walk()

    def signature(self) -> tuple:
        """Structural value used for equality between trees."""
        return (
            str(self.formula),
            self.tag,
            self.label,
            self.utterance_id,
            tuple((e, c.signature()) for e, c in self.children),
        )

    def to_dict(self) -> dict:
        return {
            "formula": str(self.formula),
            "tag": self.tag,
            "label": self.label,
            "utteranceId": self.utterance_id,
            "children": [{"edge": e, "node": c.to_dict()} for e, c in self.children],
        }


def flip(label: str) -> str:
    return "O" if label == "P" else "P"


@dataclass
class DialogueTree:
    root: TreeNode
    source: Dialogue | None = None

    def nodes(self) -> list[TreeNode]:
        return list(self.root.walk())

    def parents(self) -> dict[int, tuple[str, TreeNode]]:
        out: dict[int, tuple[str, TreeNode]] = {}
        for n in self.root.walk():
            for e, c in n.children:
                out[c.uid] = (e, n)
        return out

    def signature(self) -> tuple:
        return self.root.signature()

    def __eq__(self, other) -> bool:
        return isinstance(other, DialogueTree) and self.signature() == other.signature()


def _region(nodes: Iterable[TreeNode], parents: dict) -> list[TreeNode]:
    """Argument-level neighbourhood: climb inference edges to the nearest
    argument root (tree root or attack child) and collect the inference
    descendants of every root reached."""
    roots: dict[int, TreeNode] = {}
    for n in nodes:
        cur = n
        while cur.uid in parents and parents[cur.uid][0] == INFERENCE:
            cur = parents[cur.uid][1]
        roots[cur.uid] = cur
    out: dict[int, TreeNode] = {}

    def down(n: TreeNode) -> None:
        out[n.uid] = n
        for c in n.inference_children():
            down(c)

    for r in roots.values():
        down(r)
    return list(out.values())


def build_tree(d: Dialogue, validate: bool = True) -> DialogueTree:
    """Replay ``d`` and return the dialogue tree it draws."""
    if validate:
        check_dialogue(d)
    kb = d.kb
    if not d.utterances or d.utterances[0].content.kind != "claim":
        raise DialogueError("a dialogue opens with a claim")
    first = d.utterances[0]
    root = TreeNode(first.content.phi, UM, "P", first.id, history=[first.id])
    touched: dict[int, list[TreeNode]] = {first.id: [root]}

    def new_node(phi, label, uid_):
        tag = F if _in_kb(kb, phi) else NF
        return TreeNode(phi, tag, label, uid_, history=[uid_])

    for u in d.utterances[1:]:
        c = u.content
        if c.kind in ("concede", "pass"):
            continue
        pool = touched.get(u.target, [])
        if c.kind == "offer":
            matches = [n for n in pool if n.formula == c.phi]
            if matches and all(n.tag == F for n in matches):
                raise DialogueError(f"utterance {u.id}: cannot offer grounds for a fact-tagged node")
            matches = [n for n in matches if n.tag != F]
            if not matches:
                raise DialogueError(f"utterance {u.id}: no node for {c.phi} at target {u.target}")
            created = []
            for n in matches:
                for beta in c.delta:
                    child = new_node(beta, n.label, u.id)
                    n.children.append((INFERENCE, child))
                    created.append(child)
                n.tag = NF
            touched[u.id] = created + matches
        elif c.kind == "fact":
            matches = [n for n in pool if n.formula == c.phi]
            if not matches:
                raise DialogueError(f"utterance {u.id}: no node for {c.phi} at target {u.target}")
            for n in matches:
                n.tag = F
                n.utterance_id = u.id
                n.history.append(u.id)
            touched[u.id] = matches
        elif c.kind == "contrary":
            if c.against:
                region = _region(pool, _parent_map(root))
                wanted = set(c.against)
                matches = [n for n in region if n.formula in wanted and n.tag in (F, NF)]
                missing = wanted - {n.formula for n in matches}
                if missing:
                    raise DialogueError(
                        f"utterance {u.id}: {render_set(missing)} not found near target {u.target}"
                    )
            else:
                matches = [n for n in pool if n.formula == c.phi]
                if not matches:
                    raise DialogueError(f"utterance {u.id}: no node for {c.phi} at target {u.target}")
                if any(n.tag == UM for n in matches):
                    raise DialogueError(f"utterance {u.id}: cannot attack an unmarked node")
            created = []
            for n in matches:
                for beta in c.delta:
                    child = new_node(beta, flip(n.label), u.id)
                    n.children.append((ATTACK, child))
                    created.append(child)
            touched[u.id] = created
    return DialogueTree(root, d)


def _parent_map(root: TreeNode) -> dict[int, tuple[str, TreeNode]]:
    out = {}
    for n in root.walk():
        for e, c in n.children:
            out[c.uid] = (e, n)
    return out


# ----------------------------------------------------- potential arguments


@dataclass(frozen=True)
class PotentialArgument:
    root: TreeNode = field(compare=False, hash=False)
    nodes: tuple[TreeNode, ...] = field(compare=False, hash=False)
    label: str = "P"
    conclusion: Formula | None = None
    support: frozenset = frozenset()
    node_ids: frozenset = frozenset()

    @property
    def key(self) -> tuple:
        return (self.support, self.conclusion)

    def __str__(self) -> str:
        return f"{self.label}: {render_set(self.support)} ⇒ {self.conclusion}"


def _groups(node: TreeNode) -> list[list[TreeNode]]:
    by_id: dict[int, list[TreeNode]] = {}
    for c in node.inference_children():
        by_id.setdefault(c.history[0], []).append(c)
    return [by_id[k] for k in sorted(by_id)]


def _arg_choices(node: TreeNode) -> list[list[TreeNode]]:
    """Node lists of every way to complete ``node`` into an argument."""
    if node.tag == F:
        return [[node]]
    if node.tag == UM:
        return []
    out = []
    for group in _groups(node):
        per_child = [_arg_choices(c) for c in group]
        if any(not p for p in per_child):
            continue
        for combo in itertools.product(*per_child):
            out.append([node] + [n for part in combo for n in part])
    return out


def arguments_at(root: TreeNode) -> list[PotentialArgument]:
    out = []
    for nodes in _arg_choices(root):
        support = frozenset(n.formula for n in nodes if n.tag == F)
        out.append(
            PotentialArgument(
                root, tuple(nodes), root.label, root.formula, support,
                frozenset(n.uid for n in nodes),
            )
        )
    return out


def argument_roots(t: DialogueTree) -> list[TreeNode]:
    return [t.root] + [c for n in t.root.walk() for c in n.attack_children()]


def extract_potential_arguments(t: DialogueTree) -> list[PotentialArgument]:
    out = []
    for r in argument_roots(t):
        out.extend(arguments_at(r))
    return out


def _in_args_ids(t: DialogueTree) -> set[int]:
    ids: set[int] = set()
    for pa in extract_potential_arguments(t):
        ids |= pa.node_ids
    return ids


def defence_set(t: DialogueTree) -> frozenset:
    inside = _in_args_ids(t)
    return frozenset(n.formula for n in t.root.walk() if n.tag == F and n.label == "P" and n.uid in inside)


def culprits(t: DialogueTree) -> frozenset:
    inside = _in_args_ids(t)
    out = set()
    for n in t.root.walk():
        if n.tag == F and n.label == "O" and n.uid in inside:
            if any(c.label == "P" and c.uid in inside for c in n.attack_children()):
                out.add(n.formula)
    return frozenset(out)


# -------------------------------------------------------------- properties


def is_focused(t: DialogueTree) -> bool:
    root_ids = {c.history[0] for c in t.root.inference_children()}
    if len(root_ids) > 1:
        return False
    for pa in extract_potential_arguments(t):
        if pa.label != "O":
            continue
        ids = {c.history[0] for n in pa.nodes for c in n.attack_children() if c.label == "P"}
        if len(ids) > 1:
            return False
    return True


def is_patient(t: DialogueTree) -> bool:
    inside = _in_args_ids(t)
    return all(n.uid in inside for n in t.root.walk() if n.tag == F)


def is_last_word(t: DialogueTree) -> bool:
    for n in t.root.walk():
        if not n.children and not (n.tag == F and n.label == "P"):
            return False
    pas = extract_potential_arguments(t)
    inside = set()
    for pa in pas:
        inside |= pa.node_ids
    for n in t.root.walk():
        if n.label == "O" and n.tag in (F, NF) and n.uid not in inside:
            return False
    for pa in pas:
        if pa.label == "O" and not any(
            c.label == "P" for n in pa.nodes for c in n.attack_children()
        ):
            return False
    return True


def is_defensive(t: DialogueTree) -> bool:
    if not is_last_word(t):
        return False
    kb = t.source.kb
    de = defence_set(t)
    o_formulas = {n.formula for n in t.root.walk() if n.label == "O"}
    return not any(a in de for a in o_formulas) or is_consistent(kb, de)


def is_non_redundant(t: DialogueTree) -> bool:
    """No potential argument appears with both labels."""
    pas = extract_potential_arguments(t)
    p_keys = {pa.key for pa in pas if pa.label == "P"}
    return not any(pa.key in p_keys for pa in pas if pa.label == "O")


def is_non_redundant_literal(t: DialogueTree) -> bool:
    """No potential argument holds two distinct fact nodes with one formula."""
    for pa in extract_potential_arguments(t):
        seen = set()
        for n in pa.nodes:
            if n.tag == F:
                if n.formula in seen:
                    return False
                seen.add(n.formula)
    return True


def attack_groups(t: DialogueTree) -> list[tuple[PotentialArgument, list[list[PotentialArgument]]]]:
    """For each potential argument, the opposing groups raised against it,
    one group per contrary utterance."""
    out = []
    for pa in extract_potential_arguments(t):
        by_id: dict[int, list[TreeNode]] = {}
        for n in pa.nodes:
            for c in n.attack_children():
                by_id.setdefault(c.history[0], []).append(c)
        groups = []
        for uid in sorted(by_id):
            members = []
            for c in by_id[uid]:
                members.extend(arguments_at(c))
            groups.append(members)
        out.append((pa, groups))
    return out


def is_non_redundant_groups(t: DialogueTree) -> bool:
    """No raised opponent group consists only of proponent arguments."""
    pas = extract_potential_arguments(t)
    p_keys = {pa.key for pa in pas if pa.label == "P"}
    for pa, groups in attack_groups(t):
        if pa.label != "P":
            continue
        for g in groups:
            if g and all(m.key in p_keys for m in g):
                return False
    return True


def psaf_from_tree(t: DialogueTree, kb_af: Psaf) -> Psaf:
    """Framework over the tree's potential arguments, attacks recomputed."""
    kb = t.source.kb
    args: dict[str, Argument] = {}
    for pa in extract_potential_arguments(t):
        a = kb_af.by_key.get(pa.key)
        if a is None:
            raise DialogueError(f"potential argument {pa} matches no argument of the knowledge base")
        args[a.id] = a
    ordered = sorted(args.values(), key=lambda a: int(a.id[1:]))
    return Psaf(ordered, enumerate_attacks(kb, ordered), kb)


def check_properties(t: DialogueTree, kb_af: Psaf | None = None) -> dict[str, bool]:
    """Success predicates of a dialogue tree.

    ``ideal`` is judged against ``kb_af`` when given (every argument of the
    knowledge base), otherwise against the framework drawn from the tree.
    """
    from .semantics import enumerate_extensions

    focused = is_focused(t)
    report = {
        "focused": focused,
        "patient": is_patient(t),
        "last_word": focused and is_last_word(t),
        "defensive": focused and is_defensive(t),
        "non_redundant": focused and is_non_redundant(t),
        "non_redundant_literal": focused and is_non_redundant_literal(t),
        "non_redundant_groups": focused and is_non_redundant_groups(t),
    }
    ideal = report["defensive"] and report["non_redundant"]
    if ideal:
        af = kb_af
        if af is None:
            from .arguments import build_psaf

            af = psaf_from_tree(t, build_psaf(t.source.kb))
        credulous = set().union(*enumerate_extensions(af, "preferred"))
        for pa in extract_potential_arguments(t):
            if pa.label == "O":
                a = af.by_key.get(pa.key)
                if a is not None and a.id in credulous:
                    ideal = False
                    break
    report["ideal"] = ideal
    return report


# --------------------------------------------------------- focused subtrees


def _copy(node: TreeNode, keep) -> TreeNode:
    clone = TreeNode(node.formula, node.tag, node.label, node.utterance_id, [], list(node.history), node.uid)
    for e, c in node.children:
        sub = keep(node, e, c)
        if sub is not None:
            clone.children.append((e, sub))
    return clone


def _region_variants(root: TreeNode, is_tree_root: bool) -> list[TreeNode]:
    if is_tree_root:
        ids = sorted({c.history[0] for c in root.inference_children()})
        root_choices = ids or [None]
    else:
        root_choices = [None]
    results = []
    for rc in root_choices:
        # region nodes under this root choice
        region: list[TreeNode] = []

        def collect(n: TreeNode, top: bool) -> None:
            region.append(n)
            for c in n.inference_children():
                if top and rc is not None and c.history[0] != rc:
                    continue
                collect(c, False)

        collect(root, True)
        attacks = [(n, c) for n in region for c in n.attack_children()]
        if root.label == "O":
            ids = sorted({c.history[0] for _, c in attacks if c.label == "P"})
            att_choices = ids or [None]
        else:
            att_choices = [None]
        for ac in att_choices:
            kept = [(n, c) for n, c in attacks if ac is None or c.history[0] == ac]
            options = [_region_variants(c, False) for _, c in kept]
            for combo in itertools.product(*options):
                chosen = {c.uid: v for (_, c), v in zip(kept, combo)}
                region_ids = {n.uid for n in region}

                def keep(parent, edge, child):
                    if edge == INFERENCE:
                        if child.uid not in region_ids:
                            return None
                        return _copy(child, keep)
                    return chosen.get(child.uid)

                results.append(_copy(root, keep))
    return results


def focused_subtrees(t: DialogueTree) -> list[tuple[DialogueTree, Dialogue]]:
    """Maximal focused subtrees, each with the sub-dialogue that draws it."""
    out = []
    seen = set()
    for root in _region_variants(t.root, True):
        sub = DialogueTree(root)
        sig = sub.signature()
        if sig in seen:
            continue
        seen.add(sig)
        ids = {h for n in root.walk() for h in n.history}
        utts = [u for u in t.source.utterances if u.id in ids]
        utts += [
            u for u in t.source.utterances
            if u.content.kind in ("concede", "pass") and (u.target in ids or u.target == 0)
        ]
        utts.sort(key=lambda u: u.id)
        sd = Dialogue(t.source.kb, utts, t.source.kb_ref)
        sub.source = sd
        out.append((sub, sd))
    return out
