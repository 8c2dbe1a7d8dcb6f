"""Scheduling by edge reversal with advancement.

The orientation is tracked through its sink decomposition ``I_1, ..., I_d``
(``I_1`` = sinks, ``I_2`` = sinks once ``I_1`` is removed, ...). In each step
the current sinks transmit, ``I_1`` is dropped, every other set moves down by
one, and each former sink is put back into the lowest set that

* holds none of its conflict neighbours,
* lies below its predecessor hop only if the shared buffer has a packet, and
* lies below its successor hop only if the shared buffer has room.

Plain SER corresponds to always using the slot just above the highest
neighbour, which is also the fallback that always satisfies the three rules.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

import numpy as np

from . import kernels
from .conflict import ConflictGraph
from .errors import BufferOverflowAttempt, PeriodNotFound
from .ser import DEFAULT_MAX_ITERS, Orientation, Schedule, _graph_arrays, initial_levels

__all__ = [
    "SinkDecomposition",
    "SeraState",
    "SeraReport",
    "decompose",
    "initial_state",
    "sera_step",
    "sera_steps",
    "run_sera",
]


@dataclass(frozen=True)
class SinkDecomposition:
    level: tuple[int, ...]

    @property
    def d(self) -> int:
        return max(self.level, default=0)

    @property
    def sets(self) -> list[frozenset[int]]:
        out: list[set[int]] = [set() for _ in range(self.d)]
        for v, k in enumerate(self.level):
            out[k - 1].add(v)
        return [frozenset(s) for s in out]

    def orientation(self, g: ConflictGraph) -> Orientation:
        return Orientation.from_rank(g, self.level)


def decompose(g: ConflictGraph, omega: Orientation) -> SinkDecomposition:
    """Peel sinks off repeatedly; node ``v`` lands in the set it is peeled with."""
    n = g.size
    succ = omega.successors(n)
    pending = [len(s) for s in succ]
    preds: list[list[int]] = [[] for _ in range(n)]
    for u, lst in enumerate(succ):
        for v in lst:
            preds[v].append(u)
    level = [0] * n
    layer = [v for v in range(n) if pending[v] == 0]
    k = 1
    while layer:
        nxt = []
        for v in layer:
            level[v] = k
        for v in layer:
            for u in preds[v]:
                pending[u] -= 1
                if pending[u] == 0:
                    nxt.append(u)
        layer = nxt
        k += 1
    if 0 in level:
        raise ValueError("orientation has a directed cycle")
    return SinkDecomposition(tuple(level))


@dataclass(frozen=True)
class SeraState:
    """Sink-decomposition levels plus buffer occupancies.

    ``occupancy[i]`` counts packets parked between ``pred[i]`` and ``i``; it is
    always 0 for first hops.
    """

    levels: tuple[int, ...]
    occupancy: tuple[int, ...]
    B: int

    def decomposition(self) -> SinkDecomposition:
        return SinkDecomposition(self.levels)

    def orientation(self, g: ConflictGraph) -> Orientation:
        return Orientation.from_rank(g, self.levels)

    def sinks(self) -> frozenset[int]:
        return frozenset(i for i, k in enumerate(self.levels) if k == 1)


def initial_state(g: ConflictGraph, scheme: str, B: int) -> SeraState:
    if B < 1:
        raise ValueError("B must be >= 1")
    return SeraState(tuple(initial_levels(g, scheme)), (0,) * g.size, B)


def sera_step(
    g: ConflictGraph,
    state: SeraState,
    *,
    advance: bool = True,
    order: Iterable[int] | None = None,
) -> tuple[SeraState, frozenset[int], int]:
    """Fire the current sinks, then re-place them.

    ``order`` fixes the sequence in which former sinks are re-placed
    (ascending id by default). Returns ``(new_state, sinks, deliveries)``.
    """
    B = state.B
    lev = list(state.levels)
    occ = list(state.occupancy)
    fired = [i for i, k in enumerate(lev) if k == 1]
    delivered = 0
    for i in fired:
        p, s = g.pred[i], g.succ[i]
        if p >= 0 and occ[i] == 0:
            continue  # nothing to send this slot
        if p >= 0:
            occ[i] -= 1
        if s < 0:
            delivered += 1
        elif occ[s] >= B:
            raise BufferOverflowAttempt(f"hop {i} fired into a full buffer")
        else:
            occ[s] += 1

    lev = [k - 1 for k in lev]
    for i in (sorted(fired) if order is None else order):
        nb_levels = {lev[j] for j in g.adj[i]}
        ser_slot = max(nb_levels, default=0) + 1
        if not advance:
            lev[i] = ser_slot
            continue
        p, s = g.pred[i], g.succ[i]
        for k in range(1, ser_slot + 1):
            if k in nb_levels:
                continue
            if p >= 0 and k < lev[p] and occ[i] < 1:
                continue
            if s >= 0 and k < lev[s] and occ[s] > B - 1:
                continue
            lev[i] = k
            break
    return SeraState(tuple(lev), tuple(occ), B), frozenset(fired), delivered


def sera_steps(g: ConflictGraph, scheme: str, B: int, *, advance: bool = True) -> Iterator[frozenset[int]]:
    """Endless sequence of sink sets under the reference step."""
    state = initial_state(g, scheme, B)
    while True:
        state, fired, _ = sera_step(g, state, advance=advance)
        yield fired


@dataclass(frozen=True)
class SeraReport:
    p: int
    k: int
    m_i: tuple[int, ...]
    delivered: int
    schedule: Schedule
    T: Fraction
    B: int
    iterations: int

    def terminal_counts(self, g: ConflictGraph) -> dict[int, int]:
        return {i: self.m_i[i] for i in sorted(g.terminal)}


def run_sera(
    g: ConflictGraph,
    scheme: str = "nd-bf",
    B: int = 1,
    max_iters: int = DEFAULT_MAX_ITERS,
    *,
    advance: bool = True,
    backend: str | None = None,
) -> SeraReport:
    """Iterate SERA until an (orientation, buffers) state recurs."""
    if B < 1:
        raise ValueError("B must be >= 1")
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    kern = kernels.get(backend)
    indptr, indices, pred, succ = _graph_arrays(g)
    lev0 = np.asarray(initial_levels(g, scheme), dtype=np.int32)
    occ0 = np.zeros(g.size, dtype=np.int32)
    status, k, p, t, hist, dels, _ = kern.run_period(indptr, indices, pred, succ, lev0, occ0, B, advance, True, max_iters)
    if status == kernels.OVERFLOW:
        raise BufferOverflowAttempt(f"out-buffer overflow at step {t - 1}")
    if status == kernels.NO_PERIOD:
        raise PeriodNotFound(f"no period within {max_iters} states")
    counts = [0] * g.size
    slots = []
    for s in hist[k:k + p]:
        slots.append(frozenset(int(v) for v in s))
        for v in s:
            counts[v] += 1
    delivered = int(sum(dels[k:k + p]))
    expected = sum(counts[i] for i in g.terminal)
    if delivered != expected:
        raise AssertionError(f"period delivered {delivered} packets but terminal sinks fired {expected} times")
    return SeraReport(
        p=p,
        k=k,
        m_i=tuple(counts),
        delivered=delivered,
        schedule=Schedule(tuple(slots)),
        T=Fraction(delivered, p),
        B=B,
        iterations=t,
    )
