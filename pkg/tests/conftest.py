from __future__ import annotations

from pathlib import Path

import pytest

from psaf.logic import load_kb

DATA = Path(__file__).resolve().parents[1] / "src" / "psaf" / "data"

# filled by tests/test_acceptance.py, printed at the end of the run
ACCEPTANCE_RESULTS: dict[int, tuple[bool, str, str]] = {}


def kb_path(name: str) -> Path:
    return DATA / f"{name}.kb"


@pytest.fixture(scope="session")
def kbs():
    names = ["university", "k2", "k3", "k4", "k5", "focused", "consistent"]
    return {n: load_kb(kb_path(n)) for n in names}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        ok, title, detail = ACCEPTANCE_RESULTS[number]
        line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
