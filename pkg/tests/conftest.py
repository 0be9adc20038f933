import sys

import pytest

from mefe.core import make_instance


def trio_instance(k=7):
    """Three courses and three TAs; grades equal the course valuations."""
    vals = {"c1": (9, 8, 7), "c2": (8, 7, 9), "c3": (7, 7, 7)}
    utils = {"t1": (9, 8, 8), "t2": (8, 8, 8), "t3": (8, 8, 8)}
    tas, courses = ["t1", "t2", "t3"], ["c1", "c2", "c3"]
    return make_instance(
        [(c, 1, dict(zip(tas, vals[c]))) for c in courses],
        [(t, dict(zip(courses, utils[t])), {c: vals[c][i] for c in courses}) for i, t in enumerate(tas)],
        k,
    )


def one_course(cap, rows, k, allow_short=False):
    """Single course ``x``; rows are (ta, value, utility, grade)."""
    return make_instance(
        [("x", cap, {t: v for t, v, _, _ in rows})],
        [(t, {"x": u} if u else {}, {"x": g}) for t, _, u, g in rows],
        k,
        allow_short,
    )


@pytest.fixture
def trio():
    return trio_instance()


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
