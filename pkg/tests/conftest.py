from __future__ import annotations

from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"

# criterion id -> (passed, detail); filled by the acceptance tests
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def record_criterion():
    def record(cid: str, passed: bool, detail: str) -> None:
        ACCEPTANCE[cid] = (bool(passed), detail)
        print(f"[{cid}] {'PASS' if passed else 'FAIL'}: {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(ACCEPTANCE, key=lambda c: int(c[1:])):
        passed, detail = ACCEPTANCE[cid]
        terminalreporter.write_line(f"{cid:>3} {'PASS' if passed else 'FAIL'}  {detail}")
