"""Minimum-hop routes and nested path-set groups."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .seeding import make_rng
from .topology import MeshNetwork, neighbors

__all__ = [
    "PairingExhausted",
    "RoutePath",
    "PathSet",
    "PathGroup",
    "shortest_path",
    "generate_path_group",
    "generate_path_groups",
    "save_path_groups",
    "load_path_groups",
]


class PairingExhausted(RuntimeError):
    """No routable pair of unused endpoints is left and retries ran out."""


@dataclass(frozen=True)
class RoutePath:
    path_id: int
    nodes: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.nodes) < 2:
            raise ValueError("a path needs at least two nodes")
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError(f"path {self.path_id} visits a node twice: {self.nodes}")

    @property
    def hops(self) -> int:
        return len(self.nodes) - 1

    @property
    def origin(self) -> int:
        return self.nodes[0]

    @property
    def destination(self) -> int:
        return self.nodes[-1]

    def edges(self) -> list[tuple[int, int]]:
        return list(zip(self.nodes, self.nodes[1:]))

    def validate(self, net: MeshNetwork) -> None:
        for a, b in self.edges():
            if b not in neighbors(net, a):
                raise ValueError(f"path {self.path_id}: {a}->{b} is not a link")


@dataclass(frozen=True)
class PathSet:
    """Paths in a fixed order. Generated sets also have pairwise-distinct
    endpoints (see ``check_endpoints``); hand-built ones need not."""

    paths: tuple[RoutePath, ...]

    def check_endpoints(self) -> None:
        ends = self.endpoints()
        if len(ends) != len(set(ends)):
            raise ValueError("path endpoints must be pairwise distinct")

    @property
    def P(self) -> int:
        return len(self.paths)

    def endpoints(self) -> list[int]:
        return [e for p in self.paths for e in (p.origin, p.destination)]

    def prefix(self, k: int) -> PathSet:
        return PathSet(self.paths[:k])

    def to_list(self) -> list[dict]:
        return [{"path_id": p.path_id, "nodes": list(p.nodes)} for p in self.paths]

    @classmethod
    def from_list(cls, items) -> PathSet:
        return cls(tuple(RoutePath(int(d["path_id"]), tuple(int(v) for v in d["nodes"])) for d in items))

    @classmethod
    def of(cls, *node_lists) -> PathSet:
        return cls(tuple(RoutePath(i, tuple(nodes)) for i, nodes in enumerate(node_lists)))


@dataclass(frozen=True)
class PathGroup:
    """The nested sequence PathSet_1 < PathSet_2 < ...; stored as its largest set."""

    group_id: int
    full: PathSet
    redraws: int = 0
    regenerations: int = 0

    def __post_init__(self) -> None:
        self.full.check_endpoints()

    def __len__(self) -> int:
        return self.full.P

    def sets(self) -> list[PathSet]:
        return [self.full.prefix(k) for k in range(1, self.full.P + 1)]

    def set_for(self, P: int) -> PathSet:
        if not 1 <= P <= self.full.P:
            raise ValueError(f"P={P} outside 1..{self.full.P}")
        return self.full.prefix(P)


def _hop_distances(net: MeshNetwork, dst: int) -> list[int]:
    dist = [-1] * net.n
    dist[dst] = 0
    queue = deque([dst])
    while queue:
        u = queue.popleft()
        for v in neighbors(net, u):
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def shortest_path(net: MeshNetwork, src: int, dst: int, path_id: int = 0) -> RoutePath | None:
    """Minimum-hop path, lexicographically smallest among ties; ``None`` if unreachable."""
    for v in (src, dst):
        if not 0 <= v < net.n:
            raise IndexError(f"node {v} not in network of {net.n} nodes")
    if src == dst:
        raise ValueError("src and dst must differ")
    dist = _hop_distances(net, dst)
    if dist[src] < 0:
        return None
    # walking down the distance field, always taking the smallest admissible id,
    # yields the lexicographically smallest shortest path
    nodes = [src]
    u = src
    while u != dst:
        u = min(v for v in neighbors(net, u) if dist[v] == dist[u] - 1)
        nodes.append(u)
    return RoutePath(path_id, tuple(nodes))


def _build_group(net: MeshNetwork, P_max: int, rng: np.random.Generator):
    unused = list(range(net.n))
    paths: list[RoutePath] = []
    redraws = 0
    while len(paths) < P_max:
        i, j = rng.choice(len(unused), size=2, replace=False)
        src, dst = unused[i], unused[j]
        route = shortest_path(net, src, dst, path_id=len(paths))
        if route is None:
            redraws += 1
            legal = [
                (a, b) for a in unused for b in unused
                if a != b and shortest_path(net, a, b) is not None
            ]
            if not legal:
                return None, redraws
            src, dst = legal[int(rng.integers(len(legal)))]
            route = shortest_path(net, src, dst, path_id=len(paths))
        paths.append(route)
        unused.remove(src)
        unused.remove(dst)
    return PathSet(tuple(paths)), redraws


def generate_path_group(
    net: MeshNetwork, group_id: int, seed: int, *, max_regenerations: int = 100
) -> PathGroup:
    """One nested group, built from its own substream ``(seed, group_id)``."""
    if net.n % 2:
        raise ValueError("path groups need an even number of nodes")
    rng = make_rng(seed, group_id)
    redraws = 0
    for attempt in range(max_regenerations):
        full, r = _build_group(net, net.n // 2, rng)
        redraws += r
        if full is not None:
            return PathGroup(group_id, full, redraws, attempt)
    raise PairingExhausted(f"group {group_id}: no perfect routable pairing after {max_regenerations} tries")


def generate_path_groups(net: MeshNetwork, groups: int, seed: int) -> list[PathGroup]:
    if groups < 1:
        raise ValueError("groups must be >= 1")
    return [generate_path_group(net, g, seed) for g in range(groups)]


def save_path_groups(path: str | Path, groups, network_ref: str | int | None = None) -> None:
    doc = [
        {
            "network_ref": network_ref,
            "group_id": g.group_id,
            "sets": [s.to_list() for s in g.sets()],
        }
        for g in groups
    ]
    Path(path).write_text(json.dumps(doc) + "\n", encoding="utf-8")


def load_path_groups(path: str | Path) -> list[PathGroup]:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if isinstance(doc, dict):
        doc = [doc]
    out = []
    for g in doc:
        sets = [PathSet.from_list(s) for s in g["sets"]]
        for small, big in zip(sets, sets[1:]):
            if big.paths[: small.P] != small.paths or big.P != small.P + 1:
                raise ValueError(f"group {g['group_id']}: sets are not nested one path at a time")
        out.append(PathGroup(int(g["group_id"]), sets[-1]))
    return out
