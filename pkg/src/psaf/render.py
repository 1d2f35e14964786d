"""DOT, JSON and plain-text views of dialogues and dialogue trees."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .dialogue import (
    ATTACK,
    F,
    INFERENCE,
    Dialogue,
    DialogueTree,
    TreeNode,
)
from .logic import Formula, KnowledgeBase, parse_literal, sort_formulas


@dataclass(frozen=True)
class RenderOptions:
    format: str = "text"
    show_ids: bool = True
    show_tags: bool = True


# ---------------------------------------------------------------------- DOT


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def node_ids(t: DialogueTree) -> dict[int, str]:
    """Deterministic DOT ids ``n<utteranceId>_<k>`` in preorder."""
    counts: dict[int, int] = {}
    out: dict[int, str] = {}
    for n in t.root.walk():
        k = counts.get(n.utterance_id, 0)
        counts[n.utterance_id] = k + 1
        out[n.uid] = f"n{n.utterance_id}_{k}"
    return out


def render_dot(t: DialogueTree, opts: RenderOptions | None = None) -> str:
    opts = opts or RenderOptions(format="dot")
    ids = node_ids(t)
    lines = ["digraph dialogue {", "  rankdir=TB;", '  node [fontname="Helvetica"];']
    for n in t.root.walk():
        label = _dot_escape(str(n.formula))
        extra = []
        if opts.show_tags:
            extra.append(n.tag)
        if opts.show_ids:
            extra.append(f"#{n.utterance_id}")
        if extra:
            label += "\\n" + " ".join(extra)
        shape = "box" if n.label == "P" else "ellipse"
        peripheries = ' peripheries=2' if n.tag == F else ""
        lines.append(f'  {ids[n.uid]} [label="{label}" shape={shape}{peripheries}];')
    for n in t.root.walk():
        for edge, c in n.children:
            if edge == INFERENCE:
                attrs = "style=dashed arrowhead=none"
            else:
                # children raised by one utterance attack collectively
                attrs = f'style=solid color=red label="u{c.history[0] if c.history else c.utterance_id}"'
            lines.append(f"  {ids[n.uid]} -> {ids[c.uid]} [{attrs}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------- JSON


def render_json(t: DialogueTree) -> str:
    return json.dumps(t.root.to_dict(), indent=2, ensure_ascii=False) + "\n"


def parse_tree_json(text: str, kb: KnowledgeBase | None = None) -> DialogueTree:
    """Inverse of :func:`render_json`.

    Formulas are resolved against ``kb`` when given (needed for rule
    members in the defeasible modes), else parsed as literals.
    """

    def formula(s: str) -> Formula:
        return kb.lookup(s) if kb is not None else parse_literal(s)

    def build(d: dict) -> TreeNode:
        node = TreeNode(formula(d["formula"]), d["tag"], d["label"], int(d["utteranceId"]))
        node.history = [node.utterance_id]
        for child in d["children"]:
            if child["edge"] not in (INFERENCE, ATTACK):
                raise ValueError(f"unknown edge kind {child['edge']!r}")
            node.children.append((child["edge"], build(child["node"])))
        return node

    return DialogueTree(build(json.loads(text)))


def render_dialogue_json(d: Dialogue) -> str:
    return d.to_json()


# --------------------------------------------------------------------- text


ADVERBS = {"credulous": "possibly", "grounded": "certainly", "sceptical": "necessarily"}
SPEAKERS = {"P": "Proponent", "O": "Opponent"}


@dataclass
class Transcript:
    lines: list[tuple[str, str]] = field(default_factory=list)

    def __str__(self) -> str:
        return "\n".join(f"{who}: {text}" for who, text in self.lines)


def _and(items) -> str:
    items = [str(x) for x in items]
    if len(items) <= 1:
        return "".join(items)
    return ", ".join(items[:-1]) + " and " + items[-1]


def render_text(d: Dialogue, t: DialogueTree | None = None, mode: str | None = None) -> Transcript:
    """One sentence per argument put forward, plus the closing moves.

    Offers and facts are folded into the claim or contrary whose
    argument they spell out.
    """
    members = d.kb.defeasible_part
    by_id = d.by_id()
    opener: dict[int, int] = {}
    chunks: dict[int, list] = {}
    order: list[int] = []
    for u in d.utterances:
        kind = u.content.kind
        if kind in ("claim", "contrary"):
            opener[u.id] = u.id
            chunks[u.id] = [u]
            order.append(u.id)
        elif kind in ("offer", "fact"):
            head = opener.get(u.target, u.target)
            opener[u.id] = head
            chunks.setdefault(head, []).append(u)
        else:
            order.append(u.id)

    adverb = ADVERBS.get(mode or "", "")
    script = Transcript()
    for uid in order:
        u = by_id[uid]
        kind = u.content.kind
        speaker = "Proponent" if u.agent == "a1" else "Opponent"
        if kind == "concede":
            script.lines.append((speaker, f"I concede that {u.content.phi}."))
            continue
        if kind == "pass":
            script.lines.append((speaker, "I pass."))
            continue
        parts = chunks[uid]
        facts: list = []
        reasons: list[str] = []
        for p in parts[1:]:
            if p.content.kind == "offer":
                reasons.append(f"{p.content.phi} because {_and(p.content.delta)}")
                facts += [f for f in p.content.delta if f in members]
            else:
                facts.append(p.content.phi)
        if kind == "claim":
            verb = f"I {adverb} believe" if adverb else "I believe"
            text = f"{verb} that {u.content.phi}"
        else:
            if t is not None:
                label = _label_of(t, uid)
                speaker = SPEAKERS.get(label, speaker)
            facts += [f for f in u.content.delta if f in members]
            against = u.content.against
            if against and len(against) > 1:
                text = f"{_and(against)} are not possible together because {_and(u.content.delta)}"
            else:
                target = against[0] if against else u.content.phi
                text = f"{target} is not possible because {_and(u.content.delta)}"
        if kind == "claim" and reasons:
            first, *rest = reasons
            text += " because " + first.split(" because ", 1)[1]
            reasons = rest
        if reasons:
            text += ", and " + ", and ".join(reasons)
        facts = sort_formulas(set(facts))
        if facts:
            text += f", given the fact that {_and(facts)}"
        script.lines.append((speaker, text + "."))
    return script


def _label_of(t: DialogueTree, uid: int) -> str | None:
    for n in t.root.walk():
        if n.history and n.history[0] == uid:
            return n.label
    return None


def render(t: DialogueTree, d: Dialogue | None = None, opts: RenderOptions | None = None, mode: str | None = None) -> str:
    opts = opts or RenderOptions()
    if opts.format == "dot":
        return render_dot(t, opts)
    if opts.format == "json":
        return render_json(t)
    if opts.format == "text":
        if d is None:
            raise ValueError("text rendering needs the dialogue")
        return str(render_text(d, t, mode)) + "\n"
    raise ValueError(f"unknown format {opts.format!r}")
