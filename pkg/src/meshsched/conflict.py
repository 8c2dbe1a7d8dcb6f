"""Transmission multigraph and its distance-2 conflict graph.

Every hop of every path is a separate transmission, so two paths crossing the
same link contribute two (parallel or antiparallel) transmissions. The
conflict graph has one node per transmission. It is built by

1. adding a temporary node for every in-range pair of path nodes that is not
   itself a hop of some path,
2. joining any two nodes whose node pairs share a mesh node,
3. joining any two nodes at distance exactly 2 in the graph from step 2,
4. dropping the temporary nodes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .routing import PathSet
from .topology import MeshNetwork

__all__ = [
    "Transmission",
    "Multigraph",
    "ConflictGraph",
    "build_multigraph",
    "interference_pairs",
    "build_conflict_graph",
    "conflict_graph",
    "rho",
]


@dataclass(frozen=True)
class Transmission:
    path_id: int
    hop: int
    tail: int
    head: int

    @property
    def tx_id(self) -> tuple[int, int]:
        return (self.path_id, self.hop)

    @property
    def ends(self) -> frozenset[int]:
        return frozenset((self.tail, self.head))


@dataclass(frozen=True)
class Multigraph:
    """D = (X, Y); transmissions are ordered by (path_id, hop)."""

    nodes: tuple[int, ...]
    transmissions: tuple[Transmission, ...]
    paths: PathSet


def build_multigraph(net: MeshNetwork | None, ps: PathSet) -> Multigraph:
    if net is not None:
        for p in ps.paths:
            p.validate(net)
    X = sorted({v for p in ps.paths for v in p.nodes})
    Y = tuple(
        Transmission(p.path_id, h, a, b)
        for p in ps.paths
        for h, (a, b) in enumerate(p.edges())
    )
    return Multigraph(tuple(X), Y, ps)


def interference_pairs(net: MeshNetwork, d: Multigraph) -> list[tuple[int, int]]:
    """In-range pairs of D's nodes that no path uses as a hop, either direction."""
    used = {frozenset((t.tail, t.head)) for t in d.transmissions}
    X = d.nodes
    out = []
    for i, a in enumerate(X):
        for b in X[i + 1:]:
            if frozenset((a, b)) not in used and net.distance(a, b) <= net.radius:
                out.append((a, b))
    return out


@dataclass(frozen=True, eq=False)
class ConflictGraph:
    nodes: tuple[Transmission, ...]
    adj: tuple[tuple[int, ...], ...]
    P: int
    pred: tuple[int, ...] = field(repr=False)
    succ: tuple[int, ...] = field(repr=False)
    terminal: frozenset[int] = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.nodes)

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i, nb in enumerate(self.adj) for j in nb if i < j]

    def num_edges(self) -> int:
        return sum(len(nb) for nb in self.adj) // 2

    def adjacent(self, i: int, j: int) -> bool:
        return j in self._adjsets[i]

    @property
    def _adjsets(self) -> tuple[frozenset[int], ...]:
        cached = self.__dict__.get("_adjsets_cache")
        if cached is None:
            cached = tuple(frozenset(nb) for nb in self.adj)
            object.__setattr__(self, "_adjsets_cache", cached)
        return cached

    def is_independent(self, nodes) -> bool:
        nodes = list(nodes)
        s = set(nodes)
        return len(s) == len(nodes) and all(not (self._adjsets[i] & s) for i in nodes)

    def index_of(self, path_id: int, hop: int) -> int:
        for i, t in enumerate(self.nodes):
            if t.path_id == path_id and t.hop == hop:
                return i
        raise KeyError((path_id, hop))

    def path_nodes(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for i, t in enumerate(self.nodes):
            out.setdefault(t.path_id, []).append(i)
        return out

    def components(self) -> list[list[int]]:
        """Connected components, each as a sorted node list."""
        seen = [False] * self.size
        out = []
        for s in range(self.size):
            if seen[s]:
                continue
            seen[s] = True
            comp, stack = [], [s]
            while stack:
                u = stack.pop()
                comp.append(u)
                for v in self.adj[u]:
                    if not seen[v]:
                        seen[v] = True
                        stack.append(v)
            out.append(sorted(comp))
        return out

    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        indptr = np.zeros(self.size + 1, dtype=np.int32)
        indptr[1:] = np.cumsum([len(nb) for nb in self.adj])
        indices = np.fromiter((j for nb in self.adj for j in nb), dtype=np.int32, count=int(indptr[-1]))
        return indptr, indices

    @classmethod
    def from_edges(cls, transmissions, edges, P: int | None = None) -> ConflictGraph:
        transmissions = tuple(transmissions)
        n = len(transmissions)
        nb: list[set[int]] = [set() for _ in range(n)]
        for i, j in edges:
            if i == j:
                raise ValueError("self-loop in conflict graph")
            nb[i].add(j)
            nb[j].add(i)
        index = {t.tx_id: k for k, t in enumerate(transmissions)}
        pred = tuple(index.get((t.path_id, t.hop - 1), -1) for t in transmissions)
        succ = tuple(index.get((t.path_id, t.hop + 1), -1) for t in transmissions)
        terminal = frozenset(k for k in range(n) if succ[k] < 0)
        if P is None:
            P = len({t.path_id for t in transmissions})
        return cls(transmissions, tuple(tuple(sorted(s)) for s in nb), P, pred, succ, terminal)

    def to_dict(self) -> dict:
        return {
            "P": self.P,
            "nodes": [
                {
                    "tx_id": list(t.tx_id),
                    "tail": t.tail,
                    "head": t.head,
                    "pred": self.pred[i] if self.pred[i] >= 0 else None,
                    "succ": self.succ[i] if self.succ[i] >= 0 else None,
                    "terminal": i in self.terminal,
                }
                for i, t in enumerate(self.nodes)
            ],
            "edges": [list(e) for e in self.edges()],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> ConflictGraph:
        txs = [Transmission(int(d["tx_id"][0]), int(d["tx_id"][1]), int(d["tail"]), int(d["head"])) for d in doc["nodes"]]
        g = cls.from_edges(txs, [tuple(e) for e in doc["edges"]], doc.get("P"))
        for i, d in enumerate(doc["nodes"]):
            if (d.get("pred") if d.get("pred") is not None else -1) != g.pred[i]:
                raise ValueError(f"node {i}: pred does not match tx ids")
        return g

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> ConflictGraph:
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def build_conflict_graph(d: Multigraph, extra_pairs=()) -> ConflictGraph:
    """Run steps 1-4 on D plus the temporary node pairs ``extra_pairs``.

    Pass ``interference_pairs(net, d)`` for the geometric model; an empty
    ``extra_pairs`` builds G from the path structure alone.
    """
    txs = d.transmissions
    pairs = [(t.tail, t.head) for t in txs]
    seen = {frozenset(p) for p in pairs}
    for a, b in extra_pairs:
        key = frozenset((a, b))
        if a == b or key in seen:
            continue
        seen.add(key)
        pairs.append((a, b))
    col = {v: k for k, v in enumerate(sorted({v for p in pairs for v in p}))}
    inc = np.zeros((len(pairs), len(col)), dtype=np.float32)
    for r, (a, b) in enumerate(pairs):
        inc[r, col[a]] = 1.0
        inc[r, col[b]] = 1.0
    share = (inc @ inc.T) > 0
    np.fill_diagonal(share, False)
    t = len(txs)
    a_f = share.astype(np.float32)
    two_step = (a_f[:t] @ a_f[:, :t]) > 0
    adj = share[:t, :t] | two_step
    np.fill_diagonal(adj, False)
    ii, jj = np.nonzero(np.triu(adj, 1))
    return ConflictGraph.from_edges(txs, zip(ii.tolist(), jj.tolist()), d.paths.P)


def conflict_graph(net: MeshNetwork, ps: PathSet) -> ConflictGraph:
    d = build_multigraph(net, ps)
    return build_conflict_graph(d, interference_pairs(net, d))


def rho(g: ConflictGraph) -> Fraction:
    """P * |E'| / sum of hop counts, E' = conflict edges joining different paths."""
    cross = sum(1 for i, j in g.edges() if g.nodes[i].path_id != g.nodes[j].path_id)
    return Fraction(g.P * cross, g.size)
