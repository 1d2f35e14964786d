"""Knowledge bases, the one-step consequence operator and repairs.

Three logic modes are supported:

* ``datalog``: facts form the defeasible part; rules and constraints are
  fixed inference rules, grounded over the constants of the KB.
* ``defeasible``: facts *and* rules are members of the KB. A rule only
  fires when it is itself part of the formula set being closed.
* ``defeasible-contrapositive``: as ``defeasible``, and every selected
  rule also licenses its contrapositives.

Constraints (rules whose head is the absurdity marker) are always active.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence, Union

MODES = ("datalog", "defeasible", "defeasible-contrapositive")

_IDENT = r"[A-Za-z_][A-Za-z0-9_]*"


def is_variable(term: str) -> bool:
    return term[:1].isupper()


@dataclass(frozen=True, order=True)
class Atom:
    predicate: str
    args: tuple[str, ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.predicate
        return f"{self.predicate}({','.join(self.args)})"

    @property
    def is_ground(self) -> bool:
        return not any(is_variable(t) for t in self.args)


@dataclass(frozen=True)
class Literal:
    atom: Atom
    negated: bool = False

    def __str__(self) -> str:
        return ("~" if self.negated else "") + str(self.atom)

    def negate(self) -> "Literal":
        return Literal(self.atom, not self.negated)

    @property
    def is_ground(self) -> bool:
        return self.atom.is_ground

    def substitute(self, binding: dict[str, str]) -> "Literal":
        args = tuple(binding.get(t, t) for t in self.atom.args)
        return Literal(Atom(self.atom.predicate, args), self.negated)

    @property
    def signed_predicate(self) -> str:
        return ("~" if self.negated else "") + self.atom.predicate


BOTTOM = Literal(Atom("⊥"))
"""The absurdity marker produced when a constraint fires."""


@dataclass(frozen=True)
class Rule:
    """A strict or defeasible rule; a constraint when ``head`` is None."""

    id: str
    body: tuple[Literal, ...]
    head: Literal | None
    defeasible: bool = False

    @property
    def is_constraint(self) -> bool:
        return self.head is None

    @property
    def strength(self) -> str:
        return "defeasible" if self.defeasible else "strict"

    def variables(self) -> list[str]:
        seen: dict[str, None] = {}
        for lit in self.body:
            for t in lit.atom.args:
                if is_variable(t):
                    seen.setdefault(t)
        return list(seen)

    @property
    def is_ground(self) -> bool:
        return not self.variables() and (self.head is None or self.head.is_ground)

    def __str__(self) -> str:
        arrow = "=>" if self.defeasible else "->"
        head = "!" if self.head is None else str(self.head)
        return f"{self.id}: {', '.join(map(str, self.body))} {arrow} {head}"


Formula = Union[Literal, Rule]


def formula_key(f: Formula) -> str:
    return str(f)


def sort_formulas(items: Iterable[Formula]) -> list[Formula]:
    return sorted(items, key=str)


def set_key(items: Iterable[Formula]) -> tuple:
    """Canonical ordering key for formula sets: size first, then rendering."""
    rendered = sorted(str(f) for f in items)
    return (len(rendered), rendered)


def render_set(items: Iterable[Formula]) -> str:
    return "{" + ", ".join(str(f) for f in sort_formulas(items)) + "}"


class KBError(ValueError):
    """Base class for knowledge-base errors."""


class ParseError(KBError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col
        self.reason = message


class ExistentialVariableError(ParseError):
    pass


class ArityError(ParseError):
    pass


class DuplicateIdError(ParseError):
    pass


class CyclicDependencyError(KBError):
    def __init__(self, cycle: Sequence[str]):
        self.cycle = list(cycle)
        super().__init__("cyclic dependency: " + "→".join(self.cycle))


@dataclass(frozen=True)
class KnowledgeBase:
    mode: str
    facts: frozenset[Literal] = frozenset()
    rules: frozenset[Rule] = frozenset()
    constraints: frozenset[Rule] = frozenset()
    _engine: "Engine | None" = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        if self.mode not in MODES:
            raise KBError(f"unknown mode {self.mode!r}")

    @property
    def is_defeasible(self) -> bool:
        return self.mode != "datalog"

    @property
    def contrapositive(self) -> bool:
        return self.mode == "defeasible-contrapositive"

    @property
    def defeasible_part(self) -> frozenset[Formula]:
        """The formulas repairs range over."""
        if self.is_defeasible:
            return frozenset(self.facts) | frozenset(self.engine.member_rules)
        return frozenset(self.facts)

    @property
    def engine(self) -> "Engine":
        if self._engine is None:
            object.__setattr__(self, "_engine", Engine(self))
        return self._engine

    def constants(self) -> list[str]:
        consts: set[str] = set()
        for lit in self.facts:
            consts.update(lit.atom.args)
        for rule in itertools.chain(self.rules, self.constraints):
            for lit in itertools.chain(rule.body, [rule.head] if rule.head else []):
                consts.update(t for t in lit.atom.args if not is_variable(t))
        return sorted(consts)

    def lookup(self, text: str) -> Formula:
        """Resolve the rendering of a formula (or a bare rule id) in this KB."""
        return self.engine.lookup(text)


# ---------------------------------------------------------------- parsing


class _Cursor:
    def __init__(self, text: str, line: int, offset: int = 0):
        self.text = text
        self.pos = offset
        self.line = line

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] in " \t\r":
            self.pos += 1

    def peek(self, token: str) -> bool:
        self.skip_ws()
        return self.text.startswith(token, self.pos)

    def accept(self, token: str) -> bool:
        if self.peek(token):
            self.pos += len(token)
            return True
        return False

    def expect(self, token: str) -> None:
        if not self.accept(token):
            self.fail(f"expected {token!r}")

    def ident(self, what: str = "identifier") -> str:
        self.skip_ws()
        m = re.compile(_IDENT).match(self.text, self.pos)
        if not m:
            self.fail(f"expected {what}")
        self.pos = m.end()
        return m.group(0)

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def fail(self, message: str, cls: type = ParseError):
        raise cls(message, self.line, self.pos + 1)


def _parse_literal(cur: _Cursor, allow_negation: bool) -> Literal:
    negated = False
    cur.skip_ws()
    start = cur.pos
    while cur.accept("~"):
        negated = not negated
    if cur.pos != start and not allow_negation:
        cur.pos = start
        cur.fail("strong negation '~' is only allowed in defeasible modes")
    pred = cur.ident("predicate name")
    args: list[str] = []
    if cur.accept("("):
        args.append(cur.ident("term"))
        while cur.accept(","):
            args.append(cur.ident("term"))
        cur.expect(")")
    return Literal(Atom(pred, tuple(args)), negated)


def parse_literal(text: str, allow_negation: bool = True) -> Literal:
    """Parse a single literal such as ``taOf(v,kd)`` or ``~p``."""
    cur = _Cursor(text.strip(), 1)
    lit = _parse_literal(cur, allow_negation)
    if not cur.at_end():
        cur.fail("unexpected trailing input")
    return lit


def _strip_comment(line: str) -> str:
    idx = line.find("#")
    return line if idx < 0 else line[:idx]


def parse_kb(text: str) -> KnowledgeBase:
    """Parse the line-oriented KB format into a validated KnowledgeBase."""
    mode: str | None = None
    facts: list[Literal] = []
    rules: list[Rule] = []
    constraints: list[Rule] = []
    arity: dict[str, int] = {}
    ids: set[str] = set()

    def check_arity(lit: Literal, cur: _Cursor, col: int) -> None:
        pred, n = lit.atom.predicate, len(lit.atom.args)
        known = arity.setdefault(pred, n)
        if known != n:
            raise ArityError(
                f"predicate {pred!r} used with arity {n}, previously {known}", cur.line, col
            )

    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = _strip_comment(raw)
        if not body.strip():
            continue
        cur = _Cursor(body, lineno)
        if mode is None:
            if not cur.accept("@mode"):
                cur.fail("the first statement must be an '@mode' header")
            cur.skip_ws()
            m = re.compile(r"[a-z-]+").match(body, cur.pos)
            if not m or m.group(0) not in MODES:
                cur.fail("mode must be one of " + ", ".join(MODES))
            mode = m.group(0)
            cur.pos = m.end()
            if not cur.at_end():
                cur.fail("unexpected trailing input after mode")
            continue
        if cur.peek("@mode"):
            cur.fail("duplicate '@mode' header")
        defeasible_mode = mode != "datalog"
        keyword = cur.ident("statement keyword")
        if keyword == "fact":
            col = cur.pos + 1
            lit = _parse_literal(cur, defeasible_mode)
            if not lit.is_ground:
                raise ParseError("facts must be ground", lineno, col)
            check_arity(lit, cur, col)
            facts.append(lit)
        elif keyword in ("rule", "constraint"):
            id_col = cur.pos + 1
            rid = cur.ident("rule id")
            if rid in ids:
                raise DuplicateIdError(f"duplicate rule id {rid!r}", lineno, id_col + 1)
            cur.expect(":")
            lits: list[tuple[Literal, int]] = []
            while True:
                cur.skip_ws()
                col = cur.pos + 1
                lits.append((_parse_literal(cur, defeasible_mode), col))
                if not cur.accept(","):
                    break
            if cur.accept("=>"):
                if not defeasible_mode:
                    cur.fail("defeasible rules '=>' are only allowed in defeasible modes")
                if keyword == "constraint":
                    cur.fail("constraints must use '->'")
                defeasible = True
            elif cur.accept("->"):
                defeasible = False
            else:
                cur.fail("expected '->' or '=>'")
            for lit, col in lits:
                check_arity(lit, cur, col)
            cur.skip_ws()
            head_col = cur.pos + 1
            if keyword == "constraint":
                cur.expect("!")
                head = None
            else:
                if cur.peek("!"):
                    cur.fail("rules cannot conclude '!'; use 'constraint'")
                head = _parse_literal(cur, defeasible_mode)
                check_arity(head, cur, head_col)
            rule = Rule(rid, tuple(l for l, _ in lits), head, defeasible)
            if head is not None:
                body_vars = set(rule.variables())
                free = [t for t in head.atom.args if is_variable(t) and t not in body_vars]
                if free:
                    raise ExistentialVariableError(
                        f"head variable(s) {', '.join(free)} of rule {rid!r} not bound in the body",
                        lineno,
                        head_col,
                    )
            ids.add(rid)
            (constraints if head is None else rules).append(rule)
        else:
            raise ParseError(f"unknown statement {keyword!r}", lineno, 1)
        if not cur.accept("."):
            cur.fail("expected '.' at end of statement")
        if not cur.at_end():
            cur.fail("unexpected trailing input")
    if mode is None:
        raise ParseError("missing '@mode' header", 1, 1)
    return KnowledgeBase(mode, frozenset(facts), frozenset(rules), frozenset(constraints))


def load_kb(path: str) -> KnowledgeBase:
    with open(path, encoding="utf-8") as fh:
        return parse_kb(fh.read())


# -------------------------------------------------------------- grounding


def _instances(rule: Rule, constants: Sequence[str]) -> Iterator[Rule]:
    variables = rule.variables()
    if not variables:
        yield rule
        return
    for values in itertools.product(constants, repeat=len(variables)):
        binding = dict(zip(variables, values))
        body = tuple(l.substitute(binding) for l in rule.body)
        head = rule.head.substitute(binding) if rule.head is not None else None
        yield Rule(f"{rule.id}[{','.join(values)}]", body, head, rule.defeasible)


def ground_rules(kb: KnowledgeBase) -> list[Rule]:
    """Every ground instance of the KB's rules and constraints.

    Variables are replaced by the constants occurring in the KB; rules that
    are already ground are returned unchanged.
    """
    constants = kb.constants()
    out: list[Rule] = []
    for rule in sorted(itertools.chain(kb.rules, kb.constraints), key=lambda r: r.id):
        out.extend(_instances(rule, constants))
    return out


def contrapositives(rules: Iterable[Rule]) -> list[Rule]:
    """For each body position i, swap the i-th body literal with the negated head."""
    out: list[Rule] = []
    for rule in rules:
        if rule.head is None:
            continue
        for i, lit in enumerate(rule.body):
            body = rule.body[:i] + (rule.head.negate(),) + rule.body[i + 1 :]
            out.append(Rule(f"{rule.id}~{i + 1}", body, lit.negate(), rule.defeasible))
    return out


@dataclass(frozen=True)
class Inference:
    """A ground inference step; ``source`` is the KB rule that must be present
    for the step to be available (None when the rule is fixed, as in datalog)."""

    rule: Rule
    source: Rule | None


class Engine:
    """Per-KB forward-chaining machinery with memoised closures."""

    def __init__(self, kb: KnowledgeBase):
        self.kb = kb
        grounded = ground_rules(kb)
        self.ground_constraints = [r for r in grounded if r.is_constraint]
        ground = [r for r in grounded if not r.is_constraint]
        self.member_rules: list[Rule] = ground if kb.is_defeasible else []
        steps: list[Inference] = []
        for r in ground:
            source = r if kb.is_defeasible else None
            steps.append(Inference(r, source))
            if kb.contrapositive:
                steps.extend(Inference(c, source) for c in contrapositives([r]))
        for c in self.ground_constraints:
            steps.append(Inference(c, None))
        self.steps = steps
        self._by_body: dict[Literal, list[int]] = {}
        for i, step in enumerate(steps):
            for lit in set(step.rule.body):
                self._by_body.setdefault(lit, []).append(i)
        self._closure_cache: dict[frozenset, frozenset] = {}
        self._lookup: dict[str, Formula] | None = None

    def active(self, step: Inference, X: frozenset) -> bool:
        return step.source is None or step.source in X

    def cn_step(self, X: frozenset) -> frozenset:
        out = set(X)
        for step in self.steps:
            if self.active(step, X) and all(l in X for l in step.rule.body):
                out.add(step.rule.head if step.rule.head is not None else BOTTOM)
        return frozenset(out)

    def closure(self, X: frozenset) -> frozenset:
        X = frozenset(X)
        hit = self._closure_cache.get(X)
        if hit is not None:
            return hit
        derived = set(X)
        missing = [len(set(s.rule.body)) for s in self.steps]
        agenda = [f for f in X if isinstance(f, Literal)]
        ready = [i for i, m in enumerate(missing) if m == 0]
        seen: set[Literal] = set()
        while agenda or ready:
            while agenda:
                lit = agenda.pop()
                if lit in seen:
                    continue
                seen.add(lit)
                for i in self._by_body.get(lit, ()):
                    missing[i] -= 1
                    if missing[i] == 0:
                        ready.append(i)
            while ready:
                step = self.steps[ready.pop()]
                if not self.active(step, X):
                    continue
                head = step.rule.head if step.rule.head is not None else BOTTOM
                if head not in derived:
                    derived.add(head)
                    agenda.append(head)
        result = frozenset(derived)
        self._closure_cache[X] = result
        return result

    def inconsistent(self, X: Iterable[Formula]) -> bool:
        closed = self.closure(frozenset(X))
        if BOTTOM in closed:
            return True
        if self.kb.is_defeasible:
            return any(isinstance(f, Literal) and f.negated and f.negate() in closed for f in closed)
        return False

    def lookup(self, text: str) -> Formula:
        if self._lookup is None:
            table: dict[str, Formula] = {}
            for r in self.member_rules:
                table[str(r)] = r
                table[r.id] = r
            self._lookup = table
        text = text.strip()
        if text in self._lookup:
            return self._lookup[text]
        if ":" in text:
            rid = text.split(":", 1)[0].strip()
            if rid in self._lookup:
                return self._lookup[rid]
            raise KBError(f"unknown rule {text!r}")
        return parse_literal(text, allow_negation=True)


# ------------------------------------------------------------ operations


def cn_step(kb: KnowledgeBase, X: Iterable[Formula]) -> frozenset:
    """One application of the consequence operator.

    In defeasible modes only the rules that are members of ``X`` fire.
    """
    return kb.engine.cn_step(frozenset(X))


def closure(kb: KnowledgeBase, X: Iterable[Formula]) -> frozenset:
    """Least fixpoint of :func:`cn_step` containing ``X``."""
    return kb.engine.closure(frozenset(X))


def closure_literals(kb: KnowledgeBase, X: Iterable[Formula]) -> frozenset[Literal]:
    """Literals (absurdity marker excluded) in the closure of ``X``."""
    return frozenset(
        f for f in closure(kb, X) if isinstance(f, Literal) and f != BOTTOM
    )


def is_consistent(kb: KnowledgeBase, X: Iterable[Formula]) -> bool:
    return not kb.engine.inconsistent(X)


def entails(kb: KnowledgeBase, X: Iterable[Formula], phi: Formula) -> bool:
    return phi in closure(kb, X)


def _minimise(sets: Iterable[frozenset]) -> list[frozenset]:
    out: list[frozenset] = []
    for s in sorted(set(sets), key=len):
        if not any(o <= s for o in out):
            out.append(s)
    return out


def minimal_inconsistent_subsets(kb: KnowledgeBase, base: Iterable[Formula]) -> list[frozenset]:
    """All subset-minimal inconsistent subsets of ``base``.

    Computed from minimal derivation bases: for every literal we keep the
    antichain of minimal subsets of ``base`` that derive it, then combine
    those of constraint bodies and complementary pairs.
    """
    eng = kb.engine
    base = frozenset(base)
    derives: dict[Literal, list[frozenset]] = {}
    for f in base:
        if isinstance(f, Literal):
            derives.setdefault(f, []).append(frozenset([f]))
    rule_steps = [
        s for s in eng.steps
        if not s.rule.is_constraint and (s.source is None or s.source in base)
    ]
    changed = True
    while changed:
        changed = False
        for step in rule_steps:
            options = [derives.get(l) for l in step.rule.body]
            if any(not o for o in options):
                continue
            extra = frozenset([step.source]) if step.source is not None else frozenset()
            head = step.rule.head
            current = derives.get(head, [])
            new = [frozenset().union(*combo) | extra for combo in itertools.product(*options)]
            merged = _minimise(current + new)
            if set(merged) != set(current):
                derives[head] = merged
                changed = True
    conflicts: list[frozenset] = []
    for c in eng.ground_constraints:
        options = [derives.get(l) for l in c.body]
        if all(options):
            conflicts.extend(frozenset().union(*combo) for combo in itertools.product(*options))
    if kb.is_defeasible:
        for lit, supports in derives.items():
            if lit.negated and lit.negate() in derives:
                conflicts.extend(a | b for a in supports for b in derives[lit.negate()])
    return sorted(_minimise(conflicts), key=set_key)


def minimal_conflicts(kb: KnowledgeBase) -> list[frozenset]:
    """Subset-minimal inconsistent subsets of the defeasible part."""
    return minimal_inconsistent_subsets(kb, kb.defeasible_part)


def minimal_hitting_sets(family: Sequence[frozenset]) -> list[frozenset]:
    """Minimal transversals of ``family`` (Berge's incremental algorithm)."""
    transversals: list[frozenset] = [frozenset()]
    for edge in family:
        grown = []
        for t in transversals:
            if t & edge:
                grown.append(t)
            else:
                grown.extend(t | {x} for x in edge)
        transversals = _minimise(grown)
    return transversals


def enumerate_mcs(kb: KnowledgeBase) -> list[frozenset]:
    """Maximal consistent subsets of the defeasible part, canonically sorted.

    Each repair is the complement of a minimal hitting set of the minimal
    conflicts.
    """
    part = kb.defeasible_part
    conflicts = minimal_conflicts(kb)
    repairs = {part - h for h in minimal_hitting_sets(conflicts)}
    return sorted(repairs, key=set_key)


def mcs_query(kb: KnowledgeBase, phi: Formula, mode: str, repairs: Sequence[frozenset] | None = None) -> bool:
    """Inconsistency-tolerant entailment: ``some`` / ``all`` / ``intersection``."""
    if repairs is None:
        repairs = enumerate_mcs(kb)
    if mode == "some":
        return any(entails(kb, r, phi) for r in repairs)
    if mode == "all":
        return all(entails(kb, r, phi) for r in repairs)
    if mode == "intersection":
        common = frozenset.intersection(*repairs) if repairs else frozenset()
        return entails(kb, common, phi)
    raise ValueError(f"unknown MCS query mode {mode!r}")


def dependency_graph(kb: KnowledgeBase) -> dict[str, set[str]]:
    """Signed-predicate graph: an edge p→q when a rule with p in its body
    concludes q (contrapositives included in contrapositive mode)."""
    rules = list(kb.rules)
    if kb.contrapositive:
        rules += contrapositives(rules)
    graph: dict[str, set[str]] = {}
    for r in rules:
        head = r.head.signed_predicate
        graph.setdefault(head, set())
        for lit in r.body:
            graph.setdefault(lit.signed_predicate, set()).add(head)
    return graph


def check_acyclic_dependency(kb: KnowledgeBase) -> tuple[bool, list[str]]:
    """Return ``(True, [])`` or ``(False, cycle)`` where cycle starts and ends
    at the same predicate, e.g. ``['P', 'Q', 'P']``."""
    graph = dependency_graph(kb)
    colour: dict[str, int] = {}
    stack: list[str] = []

    def visit(node: str) -> list[str] | None:
        colour[node] = 1
        stack.append(node)
        for nxt in sorted(graph.get(node, ())):
            state = colour.get(nxt, 0)
            if state == 1:
                return stack[stack.index(nxt):] + [nxt]
            if state == 0:
                found = visit(nxt)
                if found:
                    return found
        stack.pop()
        colour[node] = 2
        return None

    for node in sorted(graph):
        if colour.get(node, 0) == 0:
            cycle = visit(node)
            if cycle:
                return False, cycle
    return True, []


def require_acyclic(kb: KnowledgeBase) -> None:
    ok, cycle = check_acyclic_dependency(kb)
    if not ok:
        raise CyclicDependencyError(cycle)
