from __future__ import annotations

import sys
from pathlib import Path

import pytest

from qgforge import store

sys.path.insert(0, str(Path(__file__).parent))  # gen/oracle helpers

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "fixtures" / "explanation-stage"

SCORE_GATE = "QG_FidelityRobustnessScore_(SHAPLIME)"
METHOD_GATE = "QG_MethodConfiguration_(Explanation)"


@pytest.fixture(scope="session")
def fixture_repo():
    return store.load(FIXTURE_DIR)


# one pass/fail line per acceptance criterion, printed after the run
_acceptance_outcomes: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance.py" not in report.nodeid:
        return
    _acceptance_outcomes[report.nodeid.split("::")[-1]] = report.outcome


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in sorted(_acceptance_outcomes.items()):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{status}] {name}")
