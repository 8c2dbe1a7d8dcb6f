from __future__ import annotations

import pytest

from meshsched.conflict import build_conflict_graph, build_multigraph
from meshsched.routing import PathSet


def structural_graph(*node_lists):
    """Conflict graph from path structure alone (no off-path interference)."""
    ps = PathSet.of(*node_lists)
    return build_conflict_graph(build_multigraph(None, ps)), ps


def chain(k: int):
    """A single path of ``k`` hops."""
    return structural_graph(tuple(range(k + 1)))


THREE_ROUTES = ((1, 2, 3, 4), (1, 2, 5, 4), (1, 6, 7, 4))


@pytest.fixture
def three_routes():
    return structural_graph(*THREE_ROUTES)


def random_graph(seed: int, n: int = 16, delta: int = 4, P: int | None = None):
    """Geometric conflict graph of a random network and path group."""
    from meshsched.conflict import conflict_graph
    from meshsched.routing import generate_path_group
    from meshsched.topology import generate_network

    net = generate_network(n, delta, seed)
    group = generate_path_group(net, 0, seed)
    ps = group.full if P is None else group.set_for(P)
    return conflict_graph(net, ps)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
