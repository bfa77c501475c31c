import pytest

from trendlab import ArrivalEvent, Arrival, replay


@pytest.fixture
def fig1_graph():
    """The four-component example graph: sizes 5, 2, 4, 2 in tree order.

    Green is a star around its root, blue a short chain-like tree, yellow and
    red single edges.
    """
    T1, T2 = Arrival.T1, Arrival.T2
    events = [
        ArrivalEvent(1, T2, 1, 0, 1, 0),   # green: root 0
        ArrivalEvent(2, T2, 2, 0, 2, 0),
        ArrivalEvent(3, T2, 3, 0, 3, 0),
        ArrivalEvent(4, T2, 4, 0, 4, 0),
        ArrivalEvent(5, T1, 5),            # yellow: root 5, tree 1
        ArrivalEvent(6, T2, 6, 5, 6, 1),
        ArrivalEvent(7, T1, 7),            # blue: root 7, tree 2
        ArrivalEvent(8, T2, 8, 7, 8, 2),
        ArrivalEvent(9, T2, 9, 8, 9, 2),
        ArrivalEvent(10, T2, 10, 7, 10, 2),
        ArrivalEvent(11, T1, 11),          # red: root 11, tree 3
        ArrivalEvent(12, T2, 12, 11, 12, 3),
    ]
    return replay(events)



# one PASS/FAIL line per acceptance criterion, filled in by test_acceptance
VERDICTS: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(VERDICTS, key=lambda k: int(k.split()[0])):
        ok, detail = VERDICTS[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def verdict():
    """Record ``(criterion, ok, detail)`` for the summary, then assert ``ok``."""
    def record(key: str, ok: bool, detail: str):
        VERDICTS[key] = (bool(ok), detail)
        assert ok, f"criterion {key}: {detail}"
    return record
