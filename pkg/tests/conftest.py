from __future__ import annotations

import networkx as nx
import pytest
from hypothesis import HealthCheck, settings

from limrand.graph import Graph

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def path_graph(ids) -> Graph:
    ids = list(ids)
    return Graph.from_edges(ids, list(zip(ids, ids[1:])))


def clique(ids) -> Graph:
    ids = list(ids)
    return Graph.from_edges(ids, [(a, b) for i, a in enumerate(ids) for b in ids[i + 1:]])


def from_nx(h: nx.Graph, offset: int = 1) -> Graph:
    return Graph.from_edges([v + offset for v in h.nodes], [(u + offset, v + offset) for u, v in h.edges])


@pytest.fixture
def gnp512():
    from limrand.graph import generate
    return generate("gnp", 512, {"p": 0.02}, seed=5)


ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
