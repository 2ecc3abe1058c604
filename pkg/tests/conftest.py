import os
import sys

import pytest
from hypothesis import HealthCheck, settings

from congest_apsp.graph import WeightedDigraph

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

G3_EDGES = [(0, 1, 2), (1, 0, 1), (1, 2, 3), (2, 1, 1), (0, 2, 6), (2, 0, 1)]
G3_DIST = [[0, 2, 5], [1, 0, 3], [1, 1, 0]]


@pytest.fixture
def g3():
    return WeightedDigraph.from_edges(3, G3_EDGES)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results):
        ok, detail = results[k]
        terminalreporter.write_line(f"CRITERION {k} {'PASS' if ok else 'FAIL'}: {detail}")
