from __future__ import annotations

import re

import pytest

from dialogues import rese_dialogue, k4_tree_dialogue, k5_chain
from psaf.dialogue import build_tree
from psaf.logic import parse_kb, parse_literal
from psaf.render import (
    RenderOptions,
    node_ids,
    parse_tree_json,
    render,
    render_dot,
    render_json,
    render_text,
)
from psaf.strategy import generate_dialogue

L = parse_literal


@pytest.mark.parametrize("name, make", [("university", rese_dialogue), ("k4", k4_tree_dialogue), ("k5", k5_chain)])
def test_json_roundtrip_is_byte_identical(kbs, name, make):
    t = build_tree(make(kbs[name]))
    text = render_json(t)
    again = parse_tree_json(text, kbs[name])
    assert render_json(again) == text
    assert again == t


def test_json_roundtrip_with_rule_members():
    kb = parse_kb("@mode defeasible\nfact x.\nrule d1: x => y.\n")
    g = generate_dialogue(kb, L("y"), "credulous")
    text = render_json(g.tree)
    assert '"d1: x => y"' in text
    assert render_json(parse_tree_json(text, kb)) == text


def test_parse_tree_json_rejects_unknown_edge():
    bad = '{"formula": "p", "tag": "f", "label": "P", "utteranceId": 1, "children": [{"edge": "x", "node": {}}]}'
    with pytest.raises(ValueError):
        parse_tree_json(bad)


def test_dot_shapes_and_edges(kbs):
    t = build_tree(rese_dialogue(kbs["university"]))
    dot = render_dot(t)
    assert dot.startswith("digraph dialogue {") and dot.rstrip().endswith("}")
    node_lines = [line for line in dot.splitlines() if "[label=" in line]
    assert len(node_lines) == len(t.nodes())
    assert sum("shape=ellipse" in line for line in node_lines) == 3  # ta(v), taOf, uc
    assert sum("peripheries=2" in line for line in node_lines) == 6  # te(v,kd) twice
    attacks = re.findall(r'-> \S+ \[style=solid color=red label="u(\d+)"\]', dot)
    assert attacks == ["4", "6", "6"]
    assert dot.count("style=dashed") == len(t.nodes()) - 1 - len(attacks)
    # the line break in labels is a single DOT escape
    assert '\\n' in dot and '\\\\n' not in dot


def test_dot_ids_deterministic(kbs):
    kb = kbs["university"]
    ids1 = list(node_ids(build_tree(rese_dialogue(kb))).values())
    ids2 = list(node_ids(build_tree(rese_dialogue(kb))).values())
    assert ids1 == ids2 and ids1[0] == "n1_0"
    assert len(set(ids1)) == len(ids1)


def test_dot_options(kbs):
    t = build_tree(k5_chain(kbs["k5"]))
    plain = render_dot(t, RenderOptions(format="dot", show_ids=False, show_tags=False))
    assert "#" not in plain and '"A(a)"' in plain


def test_text_transcript(kbs):
    g = generate_dialogue(kbs["university"], L("rese(v)"), "credulous")
    lines = str(render_text(g.dialogue, g.tree, "credulous")).splitlines()
    assert lines[0].startswith("Proponent: I possibly believe that rese(v) because fp(v)")
    assert lines[1].startswith("Opponent: rese(v) is not possible because ta(v)")
    assert lines[2].startswith("Proponent: taOf(v,kd) and uc(kd) are not possible together because lect(v)")
    assert lines[-1] == "Opponent: I concede that rese(v)."
    assert all(line.endswith(".") for line in lines)


@pytest.mark.parametrize("mode, adverb", [("credulous", "possibly"), ("grounded", "certainly"), ("sceptical", "necessarily")])
def test_transcript_adverbs(kbs, mode, adverb):
    g = generate_dialogue(kbs["consistent"], L("anc(ann,bob)"), mode)
    first = str(render_text(g.dialogue, g.tree, mode)).splitlines()[0]
    assert first == f"Proponent: I {adverb} believe that anc(ann,bob) because parent(ann,bob), given the fact that parent(ann,bob)."


def test_render_dispatch(kbs):
    d = rese_dialogue(kbs["university"])
    t = build_tree(d)
    assert render(t, opts=RenderOptions(format="json")) == render_json(t)
    assert render(t, opts=RenderOptions(format="dot")) == render_dot(t)
    assert render(t, d).startswith("Proponent: I believe that rese(v)")
    with pytest.raises(ValueError):
        render(t)
    with pytest.raises(ValueError):
        render(t, d, RenderOptions(format="svg"))
