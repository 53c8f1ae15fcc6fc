from pathlib import Path

import pytest

from sparql_algebra import parse_dataset, parse_pattern

DATA = Path(__file__).parent / "data"

EXAMPLE_PATTERNS = {
    "P1": "((?A email ?E) OPT (?A webPage ?W))",
    "P2": "(((?A name ?N) OPT (?A email ?E)) OPT (?A webPage ?W))",
    "P3": "((?A name ?N) OPT ((?A email ?E) OPT (?A webPage ?W)))",
    "P4": "((?A name ?N) AND ((?A email ?E) UNION (?A webPage ?W)))",
    "P5": '(((?A name ?N) OPT (?A phone ?P)) FILTER ?P = "777-3426")',
}

NESTED_OPT = "((?X name paul) OPT ((?Y name george) OPT (?X email ?Z)))"
AND_THEN_OPT = "((?X name paul) AND ((?Y name george) OPT (?X email ?Z)))"
OPT_THEN_AND = "(((?Y name george) OPT (?X email ?Z)) AND (?X name paul))"


@pytest.fixture(scope="session")
def example_dataset():
    return parse_dataset((DATA / "people.txt").read_text())


@pytest.fixture(scope="session")
def example_patterns():
    return {name: parse_pattern(text) for name, text in EXAMPLE_PATTERNS.items()}


_acceptance: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and report.when == "call":
        _acceptance[report.nodeid.split("::")[-1]] = "PASS" if report.passed else "FAIL"
    elif "test_acceptance.py" in report.nodeid and report.when == "setup" and report.failed:
        _acceptance[report.nodeid.split("::")[-1]] = "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance.items():
        terminalreporter.write_line(f"{outcome}  {name}")
