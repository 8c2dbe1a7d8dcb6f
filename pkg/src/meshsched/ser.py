"""Scheduling by edge reversal.

Starting from an acyclic orientation of the conflict graph, every sink is
repeatedly turned into a source. The orientation sequence is eventually
periodic; the sink sets of one period form the schedule, and each node is a
sink the same number of times ``m`` in a period of length ``p``, giving
throughput ``P * m / p``. A disconnected conflict graph runs one such cycle
per component, so in general the throughput is the number of terminal sinks
per period divided by ``p``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from . import kernels
from .conflict import ConflictGraph
from .errors import BufferOverflowAttempt, PeriodNotFound

__all__ = [
    "SCHEMES",
    "Orientation",
    "Numbering",
    "Schedule",
    "PeriodReport",
    "number_transmissions",
    "initial_orientation",
    "initial_levels",
    "sinks",
    "reverse_sinks",
    "run_ser",
    "ser_steps",
]

SCHEMES = ("nd-bf", "nd-df", "ni-bf", "ni-df")
DEFAULT_MAX_ITERS = 10**6


@dataclass(frozen=True)
class Orientation:
    """Direction of every conflict edge; ``heads[e]`` is where edge ``e`` points."""

    edges: tuple[tuple[int, int], ...]
    heads: tuple[int, ...]

    @classmethod
    def from_rank(cls, g: ConflictGraph, rank) -> Orientation:
        """Orient each edge from the higher ``rank`` to the lower one."""
        edges = tuple(g.edges())
        heads = []
        for i, j in edges:
            if rank[i] == rank[j]:
                raise ValueError(f"adjacent nodes {i}, {j} share rank {rank[i]}")
            heads.append(j if rank[i] > rank[j] else i)
        return cls(edges, tuple(heads))

    def out_degrees(self, n: int) -> list[int]:
        out = [0] * n
        for (i, j), h in zip(self.edges, self.heads):
            out[i if h == j else j] += 1
        return out

    def successors(self, n: int) -> list[list[int]]:
        succ: list[list[int]] = [[] for _ in range(n)]
        for (i, j), h in zip(self.edges, self.heads):
            tail = i if h == j else j
            succ[tail].append(h)
        return succ

    def is_acyclic(self, n: int) -> bool:
        succ = self.successors(n)
        indeg = [0] * n
        for lst in succ:
            for v in lst:
                indeg[v] += 1
        stack = [v for v in range(n) if indeg[v] == 0]
        seen = 0
        while stack:
            u = stack.pop()
            seen += 1
            for v in succ[u]:
                indeg[v] -= 1
                if indeg[v] == 0:
                    stack.append(v)
        return seen == n

    def fingerprint(self) -> bytes:
        bits = np.fromiter((h == j for (_, j), h in zip(self.edges, self.heads)), dtype=bool, count=len(self.edges))
        return np.packbits(bits).tobytes()


@dataclass(frozen=True)
class Numbering:
    labels: tuple[int, ...]
    scheme: str


@dataclass(frozen=True)
class Schedule:
    slots: tuple[frozenset[int], ...]

    @property
    def L(self) -> int:
        return len(self.slots)

    def __len__(self) -> int:
        return len(self.slots)

    def check(self, g: ConflictGraph) -> None:
        for k, s in enumerate(self.slots):
            if not g.is_independent(s):
                raise ValueError(f"slot {k} is not an independent set")
        covered = set().union(*self.slots) if self.slots else set()
        if covered != set(range(g.size)):
            raise ValueError(f"schedule misses nodes {sorted(set(range(g.size)) - covered)}")

    def as_lists(self) -> list[list[int]]:
        return [sorted(s) for s in self.slots]


@dataclass(frozen=True)
class PeriodReport:
    p: int
    k: int
    m_per_node: tuple[int, ...]
    schedule: Schedule
    delivered: int
    T: Fraction
    iterations: int

    @property
    def m(self) -> int:
        """Sink count per node; only meaningful on a connected conflict graph."""
        return self.m_per_node[0] if self.m_per_node else 0


def number_transmissions(g: ConflictGraph, scheme: str) -> Numbering:
    """Label conflict nodes 1..|N| by walking the paths in ``scheme`` order."""
    scheme = scheme.lower()
    if scheme not in SCHEMES:
        raise ValueError(f"unknown numbering scheme {scheme!r}")
    by_path = g.path_nodes()
    order = sorted(by_path, key=lambda pid: (len(by_path[pid]) if scheme.startswith("nd") else -len(by_path[pid]), pid))
    labels = [0] * g.size
    nxt = 1
    if scheme.endswith("bf"):
        longest = max((len(v) for v in by_path.values()), default=0)
        for r in range(longest):
            for pid in order:
                if r < len(by_path[pid]):
                    labels[by_path[pid][r]] = nxt
                    nxt += 1
    else:
        for pid in order:
            for i in by_path[pid]:
                labels[i] = nxt
                nxt += 1
    return Numbering(tuple(labels), scheme)


def _levels_from_labels(g: ConflictGraph, labels) -> list[int]:
    lev = [0] * g.size
    for i in sorted(range(g.size), key=lambda v: labels[v]):
        lev[i] = 1 + max((lev[j] for j in g.adj[i] if labels[j] < labels[i]), default=0)
    return lev


def initial_orientation(g: ConflictGraph, scheme: str) -> tuple[Orientation, Numbering]:
    numbering = number_transmissions(g, scheme)
    return Orientation.from_rank(g, numbering.labels), numbering


def initial_levels(g: ConflictGraph, scheme: str) -> list[int]:
    """Sink-decomposition level of every node under the initial orientation."""
    return _levels_from_labels(g, number_transmissions(g, scheme).labels)


def sinks(g: ConflictGraph, omega: Orientation) -> frozenset[int]:
    out = omega.out_degrees(g.size)
    return frozenset(i for i in range(g.size) if out[i] == 0)


def reverse_sinks(g: ConflictGraph, omega: Orientation) -> Orientation:
    """Turn every sink of ``omega`` into a source."""
    s = sinks(g, omega)
    heads = tuple(
        (j if h == i else i) if h in s else h
        for (i, j), h in zip(omega.edges, omega.heads)
    )
    return Orientation(omega.edges, heads)


def ser_steps(g: ConflictGraph, scheme: str) -> Iterator[frozenset[int]]:
    """Endless sequence of sink sets, computed directly on orientations."""
    omega, _ = initial_orientation(g, scheme)
    while True:
        s = sinks(g, omega)
        yield s
        omega = reverse_sinks(g, omega)


def _graph_arrays(g: ConflictGraph):
    indptr, indices = g.csr()
    pred = np.asarray(g.pred, dtype=np.int32)
    succ = np.asarray(g.succ, dtype=np.int32)
    return indptr, indices, pred, succ


def run_ser(
    g: ConflictGraph,
    scheme: str = "nd-bf",
    max_iters: int = DEFAULT_MAX_ITERS,
    *,
    backend: str | None = None,
) -> PeriodReport:
    """Run SER to its period and report ``p``, ``m`` and ``T = P m / p``.

    Buffers are simulated alongside with ``B = 1``; an overflow would mean the
    alternation property is broken.
    """
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    kern = kernels.get(backend)
    indptr, indices, pred, succ = _graph_arrays(g)
    lev0 = np.asarray(_levels_from_labels(g, number_transmissions(g, scheme).labels), dtype=np.int32)
    occ0 = np.zeros(g.size, dtype=np.int32)
    status, k, p, t, hist, _, _ = kern.run_period(indptr, indices, pred, succ, lev0, occ0, 1, False, False, max_iters)
    if status == kernels.OVERFLOW:
        raise BufferOverflowAttempt("SER overflowed a unit buffer")
    if status == kernels.NO_PERIOD:
        raise PeriodNotFound(f"no period within {max_iters} orientations")
    counts = [0] * g.size
    slots = []
    for s in hist[k:k + p]:
        slots.append(frozenset(int(v) for v in s))
        for v in s:
            counts[v] += 1
    for comp in g.components():
        if len({counts[v] for v in comp}) > 1:
            raise AssertionError(f"SER period with uneven sink counts in component {sorted(comp)}")
    delivered = sum(counts[i] for i in g.terminal)
    return PeriodReport(
        p=p,
        k=k,
        m_per_node=tuple(counts),
        schedule=Schedule(tuple(slots)),
        delivered=delivered,
        T=Fraction(delivered, p),
        iterations=t,
    )
