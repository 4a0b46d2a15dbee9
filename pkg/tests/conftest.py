import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from lpa.graph import load_graph  # noqa: E402

CORPUS = Path(__file__).resolve().parents[1] / "src" / "lpa" / "corpus"

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def corpus():
    return {p.stem: load_graph(p) for p in sorted(CORPUS.glob("*.graph"))}


@pytest.fixture
def G(corpus):
    """Named example graphs."""
    return {
        "G1": corpus["loop"], "G2": corpus["rose2"], "G4": corpus["toeplitz"],
        "G5": corpus["mixed"], "G6": corpus["uncountable"], "A2": corpus["line_a2"],
        "A3": corpus["line_a3"], "A4": corpus["line_a4"],
    }


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
