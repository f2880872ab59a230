from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import strategies as st

from svtakagi.exactgeom import Polyhedron

_RESULTS: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _RESULTS[number] = (title, "PASS" if report.passed else "FAIL")


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        title, status = _RESULTS[number]
        terminalreporter.write_line(f"criterion {number:2d} [{status}] {title}")


# -- strategies --------------------------------------------------------------

small_q = st.fractions(min_value=-4, max_value=4, max_denominator=6)
pos_q = st.fractions(min_value=Fraction(1, 8), max_value=4, max_denominator=8)


def vectors(dim: int):
    return st.tuples(*[small_q] * dim)


def nonzero_vectors(dim: int):
    return vectors(dim).filter(lambda v: any(c != 0 for c in v))


@st.composite
def polyhedra(draw, dim: int = 2, max_vertices: int = 4, max_rays: int = 2):
    verts = draw(st.lists(vectors(dim), min_size=1, max_size=max_vertices))
    rays = draw(st.lists(nonzero_vectors(dim), max_size=max_rays))
    return Polyhedron(dim, tuple(verts), tuple(rays))
