"""Command-line front end: ``psaf query|extensions|mcs|arguments|verify|classify``."""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from .arguments import TooManyArgumentsError, build_psaf
from .dialogue import Dialogue, DialogueError
from .logic import BOTTOM, KBError, Rule, closure, enumerate_mcs, load_kb, mcs_query, render_set
from .randomkb import random_kb
from .render import RenderOptions, render_dot, render_json, render_text
from .semantics import accepted, enumerate_extensions, extension_conclusions, repair_report, verify_postulates
from .strategy import classify_success, generate_dialogue

EXIT_YES, EXIT_NO, EXIT_ERROR, EXIT_DISAGREE = 0, 1, 2, 3

# query mode -> (acceptance mode, repair query)
QUERY_MODES = {
    "possible": ("credulous", "some"),
    "plausible": ("sceptical", "all"),
    "surest": ("grounded", "intersection"),
}
POSTULATE_SEMANTICS = ("complete", "preferred", "stable", "grounded")


def _semantics(mode: str, sem: str) -> str:
    if mode == "surest":
        return "grounded"
    # an admissible witness always extends to a preferred one
    return "preferred" if sem == "admissible" else sem


def _success_kind(acceptance: str, sem: str) -> str:
    return {"credulous": sem, "grounded": "grounded", "sceptical": "sceptical"}[acceptance]


def _emit(text: str, out: Path | None, suffix: str) -> None:
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        Path(f"{out}{suffix}").write_text(text, encoding="utf-8")


def cmd_query(args) -> int:
    kb = load_kb(args.kb)
    phi = kb.lookup(args.query)
    if not getattr(phi, "is_ground", True):
        raise KBError(f"query {args.query!r} is not ground")
    acceptance, repair_query = QUERY_MODES[args.mode]
    sem = _semantics(args.mode, args.semantics)
    af = build_psaf(kb)
    by_extensions = accepted(af, phi, acceptance, "preferred" if sem == "grounded" else sem).accepted
    by_repairs = mcs_query(kb, phi, repair_query)
    generated = generate_dialogue(kb, phi, acceptance, sem, af=af, kb_ref=str(args.kb))
    by_dialogue = generated is not None and _success_kind(acceptance, sem) in generated.classification
    if not by_extensions == by_repairs == by_dialogue:
        print(
            f"oracle disagreement for {phi} ({args.mode}): dialogue={by_dialogue} "
            f"extensions={by_extensions} repairs={by_repairs}",
            file=sys.stderr,
        )
        return EXIT_DISAGREE
    if not by_dialogue:
        print("no")
        return EXIT_NO
    print("yes")
    d, t = generated.dialogue, generated.tree
    out = Path(args.out) if args.out else None
    if args.format == "json":
        if out is None:
            doc = {"dialogue": d.to_dict(), "tree": json.loads(render_json(t))}
            print(json.dumps(doc, indent=2, ensure_ascii=False))
        else:
            _emit(d.to_json(), out, ".dialogue.json")
            _emit(render_json(t), out, ".tree.json")
    elif args.format == "dot":
        if out is not None:
            _emit(d.to_json(), out, ".dialogue.json")
        _emit(render_dot(t, RenderOptions(format="dot")), out, ".tree.dot")
    else:
        if out is not None:
            _emit(d.to_json(), out, ".dialogue.json")
        _emit(str(render_text(d, t, acceptance)), out, ".txt")
    return EXIT_YES


def _ext_name(E) -> str:
    return "{" + ", ".join(sorted(E, key=lambda a: int(a[1:]))) + "}"


def cmd_extensions(args) -> int:
    kb = load_kb(args.kb)
    af = build_psaf(kb)
    exts = enumerate_extensions(af, args.semantics)
    if args.format == "json":
        doc = [
            {
                "arguments": sorted(E, key=lambda a: int(a[1:])),
                "conclusions": sorted(map(str, extension_conclusions(af, E))),
            }
            for E in exts
        ]
        print(json.dumps(doc, indent=2, ensure_ascii=False))
        return 0
    print(f"{len(exts)} {args.semantics} extension(s)")
    for i, E in enumerate(exts, 1):
        print(f"E{i}: {_ext_name(E)} concluding {render_set(extension_conclusions(af, E))}")
    return 0


def cmd_mcs(args) -> int:
    kb = load_kb(args.kb)
    repairs = enumerate_mcs(kb)
    if args.format == "json":
        print(json.dumps([sorted(map(str, r)) for r in repairs], indent=2, ensure_ascii=False))
        return 0
    print(f"{len(repairs)} maximal consistent subset(s)")
    for i, r in enumerate(repairs, 1):
        print(f"B{i}: {render_set(r)}")
    return 0


def cmd_arguments(args) -> int:
    kb = load_kb(args.kb)
    af = build_psaf(kb)
    if args.format == "json":
        doc = {
            "arguments": [
                {"id": a.id, "support": sorted(map(str, a.support)), "conclusion": str(a.conclusion), "tree": a.tree.to_dict()}
                for a in af.arguments
            ],
            "attacks": [
                {"attackers": sorted(att.attackers, key=lambda x: int(x[1:])), "target": att.target, "kind": att.kind}
                for att in af.attacks
            ],
        }
        print(json.dumps(doc, indent=2, ensure_ascii=False))
        return 0
    print(f"{len(af.arguments)} argument(s)")
    for a in af.arguments:
        print(str(a))
    if args.attacks:
        print(f"{len(af.attacks)} minimal attack(s)")
        for att in af.attacks:
            print(f"{_ext_name(att.attackers)} -> {att.target} ({att.kind})")
    return 0


def _reports(kb) -> list[tuple[str, dict]]:
    af = build_psaf(kb)
    out = [("repairs", repair_report(kb, af))]
    for sem in POSTULATE_SEMANTICS:
        out.append((f"postulates/{sem}", verify_postulates(af, kb, sem)))
    return out


def _agreement(kb) -> list[str]:
    """Three-way answers for every derivable literal and each query mode."""
    af = build_psaf(kb)
    problems = []
    for phi in sorted((f for f in closure(kb, kb.defeasible_part) if f != BOTTOM and not isinstance(f, Rule)), key=str):
        for name, (acceptance, repair_query) in QUERY_MODES.items():
            sem = "grounded" if name == "surest" else "preferred"
            ext = accepted(af, phi, acceptance).accepted
            rep = mcs_query(kb, phi, repair_query)
            g = generate_dialogue(kb, phi, acceptance, sem, af=af)
            dlg = g is not None and _success_kind(acceptance, sem) in g.classification
            if not ext == rep == dlg:
                problems.append(f"{phi} {name}: dialogue={dlg} extensions={ext} repairs={rep}")
    return problems


def cmd_verify(args) -> int:
    failures = 0
    if args.random:
        rng = random.Random(args.seed)
        seeds = [rng.randrange(2**31) for _ in range(args.random)]
        for seed in seeds:
            kb = random_kb(seed)
            bad = [c for _, rep in _reports(kb) for c in rep["checks"] if c["status"] == "fail"]
            bad_answers = _agreement(kb)
            if bad or bad_answers:
                failures += 1
                print(f"seed {seed}: {len(bad)} failed check(s), {len(bad_answers)} answer mismatch(es)")
                for c in bad:
                    print(f"  FAIL {c['name']} {c['detail']}".rstrip())
                for line in bad_answers:
                    print(f"  MISMATCH {line}")
        print(f"{len(seeds) - failures}/{len(seeds)} random knowledge bases clean")
        return 0 if failures == 0 else 1

    kb = load_kb(args.kb)
    report = {name: rep for name, rep in _reports(kb)}
    answers = _agreement(kb)
    failures = sum(c["status"] == "fail" for rep in report.values() for c in rep["checks"])
    if args.format == "json":
        report["answers"] = {"mismatches": answers}
        print(json.dumps(report, indent=2, ensure_ascii=False))
    else:
        for name, rep in report.items():
            for c in rep["checks"]:
                line = f"{c['status'].upper():4} {name}: {c['name']}"
                if c["detail"]:
                    line += f" ({c['detail']})"
                print(line)
        print(f"{'PASS' if not answers else 'FAIL'} answers: dialogue, extensions and repairs agree")
        for line in answers:
            print(f"  {line}")
    return 0 if failures == 0 and not answers else 1


def cmd_classify(args) -> int:
    kb = load_kb(args.kb)
    d = Dialogue.from_json(Path(args.dialogue).read_text(encoding="utf-8"), kb)
    c = classify_success(d)
    if args.format == "json":
        print(json.dumps({"successes": sorted(c.successes), "certificate": c.certificate}, indent=2))
    else:
        print(c.label)
    return 0 if c.successes else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="psaf", description="Query answering and dialogue explanations over inconsistent rule-based knowledge bases.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt_default="text", formats=("text", "json")):
        sp.add_argument("--kb", required=True, help="knowledge base file")
        sp.add_argument("--format", choices=formats, default=fmt_default)

    q = sub.add_parser("query", help="answer a query and explain it with a dialogue")
    common(q, formats=("text", "json", "dot"))
    q.add_argument("--query", required=True, help="ground literal, e.g. 'rese(v)'")
    q.add_argument("--mode", choices=tuple(QUERY_MODES), default="possible")
    q.add_argument("--semantics", choices=("admissible", "preferred", "stable"), default="preferred")
    q.add_argument("--out", help="write explanation files with this path prefix instead of stdout")
    q.add_argument("--seed", type=int, default=0, help="accepted for interface symmetry; generation is deterministic")
    q.set_defaults(func=cmd_query)

    e = sub.add_parser("extensions", help="list extensions")
    common(e)
    e.add_argument("--semantics", choices=("admissible", "complete", "preferred", "stable", "grounded"), default="preferred")
    e.set_defaults(func=cmd_extensions)

    m = sub.add_parser("mcs", help="list maximal consistent subsets")
    common(m)
    m.set_defaults(func=cmd_mcs)

    a = sub.add_parser("arguments", help="list arguments (and attacks)")
    common(a)
    a.add_argument("--attacks", action="store_true")
    a.set_defaults(func=cmd_arguments)

    v = sub.add_parser("verify", help="cross-check repairs, extensions, postulates and dialogues")
    v.add_argument("--kb", help="knowledge base file")
    v.add_argument("--format", choices=("text", "json"), default="text")
    v.add_argument("--random", type=int, default=0, metavar="N", help="check N random knowledge bases instead")
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("classify", help="classify a dialogue JSON file")
    common(c)
    c.add_argument("--dialogue", required=True)
    c.set_defaults(func=cmd_classify)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify" and not args.kb and not args.random:
        parser.error("verify needs --kb or --random N")
    try:
        return args.func(args)
    except (KBError, DialogueError, TooManyArgumentsError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
