import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from halograph.graph import Edge, Graph  # noqa: E402


def ghz43_graph(weight: float = 1.0) -> Graph:
    a, b, c, d = range(4)
    edges = [Edge(a, b, 0, 0, weight), Edge(c, d, 0, 0, weight),
             Edge(a, c, 1, 1, weight), Edge(b, d, 1, 1, weight),
             Edge(a, d, 2, 2, weight), Edge(b, c, 2, 2, weight)]
    return Graph(4, (3, 3, 3, 3), tuple(edges))


def naive44_graph() -> Graph:
    g = ghz43_graph()
    extra = [Edge(0, 1, 3, 3, 1.0), Edge(2, 3, 3, 3, 1.0)]
    return Graph(4, (4, 4, 4, 4), g.edges + tuple(extra))


@pytest.fixture
def ghz43():
    return ghz43_graph()


@pytest.fixture
def naive44():
    return naive44_graph()


ACCEPTANCE_LINES: dict[int, str] = {}


class CriterionRecord:
    def __init__(self, number: int):
        self.number = number
        self.details: list[str] = []

    def note(self, text: str) -> None:
        self.details.append(text)

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        status = "PASS" if exc_type is None else "FAIL"
        detail = "; ".join(self.details)
        if exc_type is not None:
            detail = f"{detail}; {exc_type.__name__}: {exc}".strip("; ")
        ACCEPTANCE_LINES[self.number] = f"criterion {self.number}: {status}  {detail}"
        return False


@pytest.fixture
def criterion():
    return CriterionRecord


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n].splitlines()[0])
