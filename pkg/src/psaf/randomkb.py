"""Random acyclic knowledge bases for sweeps and property tests."""

from __future__ import annotations

import random

from .logic import KnowledgeBase, check_acyclic_dependency, parse_kb

PREDICATES = ("p", "q", "r", "s", "t", "u")


def random_kb_text(rng: random.Random, max_facts: int = 5, max_rules: int = 4, max_constraints: int = 2) -> str:
    mode = rng.choice(["datalog", "datalog", "defeasible", "defeasible-contrapositive"])
    negation = mode != "datalog"

    def lit(pred: str, var: bool) -> str:
        sign = "~" if negation and rng.random() < 0.25 else ""
        return f"{sign}{pred}({'X' if var else 'a'})"

    lines = [f"@mode {mode}"]
    facts = set()
    for _ in range(rng.randint(1, max_facts)):
        facts.add(lit(rng.choice(PREDICATES[:4]), False))
    lines += [f"fact {f}." for f in sorted(facts)]
    # heads always use a later predicate than the body, so the graph is acyclic
    for i in range(rng.randint(0, max_rules)):
        h = rng.randrange(1, len(PREDICATES))
        preds = rng.sample(PREDICATES[:h], min(h, rng.randint(1, 2)))
        body = {lit(pr, True) for pr in preds}
        arrow = "=>" if negation and rng.random() < 0.5 else "->"
        head = lit(PREDICATES[h], True)
        lines.append(f"rule r{i + 1}: {', '.join(sorted(body))} {arrow} {head}.")
    for i in range(rng.randint(0, max_constraints)):
        body = {lit(rng.choice(PREDICATES), True) for _ in range(rng.randint(2, 3))}
        if len(body) < 2:
            continue
        lines.append(f"constraint c{i + 1}: {', '.join(sorted(body))} -> !.")
    return "\n".join(lines) + "\n"


def random_kb(seed: int, **limits) -> KnowledgeBase:
    """Deterministic acyclic KB for ``seed`` (cyclic draws are redrawn)."""
    rng = random.Random(seed)
    while True:
        kb = parse_kb(random_kb_text(rng, **limits))
        if check_acyclic_dependency(kb)[0]:
            return kb
