"""Shared fixtures plus the acceptance summary block.

Acceptance tests live in test_acceptance.py; their pass/fail states are
collected here and printed as one line per criterion at the end of the run.
"""

from pathlib import Path

import pytest

from modelgate import Engine, LibraryStore

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def library_root(tmp_path: Path) -> Path:
    root = tmp_path / "library"
    LibraryStore.init(root)
    return root


@pytest.fixture
def store(library_root: Path) -> LibraryStore:
    return LibraryStore(library_root)


@pytest.fixture
def engine(store: LibraryStore) -> Engine:
    return Engine(store)


_acceptance_results: list[tuple[str, bool]] = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        _acceptance_results.append((name, report.passed))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed in _acceptance_results:
        terminalreporter.write_line(f"{name}: {'PASS' if passed else 'FAIL'}")
