"""Brute-force references for tiny instances.

Nothing here touches the SER/SERA code: schedules are replayed by a separate
packet simulator, the best schedule is found by exhaustive search, and the
conflict graph and routes have naive re-derivations of their own.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterable, Sequence

import numpy as np

from .conflict import ConflictGraph, build_multigraph, build_conflict_graph, interference_pairs
from .metrics import ThroughputSample
from .routing import PathSet, RoutePath
from .topology import MeshNetwork

__all__ = [
    "InstanceTooLarge",
    "TinyInstance",
    "ReplayReport",
    "naive_conflict_edges",
    "naive_shortest_path",
    "replay_schedule",
    "brute_force_best_schedule",
    "random_tiny_instance",
]

MAX_NODES = 8
MAX_L = 16
MAX_L_ENUMERATE = 8


class InstanceTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class TinyInstance:
    g: ConflictGraph
    ps: PathSet
    B: int = 1

    def __post_init__(self) -> None:
        if self.B < 1:
            raise ValueError("B must be >= 1")


@dataclass(frozen=True)
class ReplayReport:
    sample: ThroughputSample
    independence_violations: tuple[int, ...]
    c2_violations: int
    max_occupancy: int
    steady: bool
    B: int

    @property
    def T(self) -> Fraction:
        return self.sample.T

    @property
    def ok(self) -> bool:
        return not self.independence_violations and self.c2_violations == 0 and self.max_occupancy <= self.B


def naive_conflict_edges(
    hops: Sequence[tuple[int, int]], in_range: Iterable[tuple[int, int]] = ()
) -> set[frozenset[int]]:
    """Distance-2 edges among ``hops`` (indices into the list), by direct search.

    ``in_range`` lists mesh-node pairs close enough to interfere; the ones
    that are not hops become temporary nodes.
    """
    used = {frozenset(h) for h in hops}
    temps = {frozenset(p) for p in in_range if len(set(p)) == 2} - used
    items = [frozenset(h) for h in hops] + sorted(temps, key=sorted)
    m = len(items)
    nbr = [{j for j in range(m) if j != i and items[i] & items[j]} for i in range(m)]
    edges = set()
    for i in range(len(hops)):
        two = set()
        for k in nbr[i]:
            two |= nbr[k]
        for j in range(len(hops)):
            if j != i and (j in nbr[i] or j in two):
                edges.add(frozenset((i, j)))
    return edges


def naive_shortest_path(net: MeshNetwork, src: int, dst: int) -> tuple[int, ...] | None:
    """Fewest hops, then lexicographically smallest, over all simple paths."""
    adj = [{u for u in range(net.n) if u != v and net.distance(u, v) <= net.radius} for v in range(net.n)]
    best: tuple[int, ...] | None = None

    def walk(path: list[int]) -> None:
        nonlocal best
        u = path[-1]
        if best is not None and len(path) > len(best):
            return
        if u == dst:
            cand = tuple(path)
            if best is None or (len(cand), cand) < (len(best), best):
                best = cand
            return
        for v in adj[u]:
            if v not in path:
                path.append(v)
                walk(path)
                path.pop()

    walk([src])
    return best


def _simulate_rep(g: ConflictGraph, slots, occ: list[int], B: int):
    """One pass over the schedule; mutates ``occ``. Returns (delivered, c2, peak)."""
    delivered = c2 = 0
    peak = max(occ, default=0)
    for slot in slots:
        firing = [i for i in slot if g.pred[i] < 0 or occ[i] > 0]
        start = list(occ)
        for i in firing:
            if g.pred[i] >= 0:
                occ[i] -= 1
            s = g.succ[i]
            if s < 0:
                delivered += 1
            else:
                if start[s] >= B:
                    c2 += 1
                occ[s] += 1
        peak = max(peak, max(occ, default=0))
    return delivered, c2, peak


def replay_schedule(inst: TinyInstance, slots, reps: int | None = None) -> ReplayReport:
    """Repeat the schedule from empty buffers and measure its steady state.

    Steady state is the cycle of buffer states seen at schedule boundaries;
    if none recurs within ``reps`` passes the last pass is used.
    """
    g, B = inst.g, inst.B
    slots = [frozenset(s) for s in (slots.slots if hasattr(slots, "slots") else slots)]
    if not slots:
        raise ValueError("empty schedule")
    reps = 3 + B * g.size if reps is None else reps
    bad = tuple(k for k, s in enumerate(slots) if not g.is_independent(s))
    occ = [0] * g.size
    seen = {tuple(occ): 0}
    per_rep: list[int] = []
    c2_total = peak = 0
    steady = False
    delivered, length = 0, len(slots)
    for r in range(1, reps + 1):
        d, c2, pk = _simulate_rep(g, slots, occ, B)
        per_rep.append(d)
        c2_total += c2
        peak = max(peak, pk)
        key = tuple(occ)
        if key in seen:
            first = seen[key]
            delivered = sum(per_rep[first:r])
            length = (r - first) * len(slots)
            steady = True
            break
        seen[key] = r
    if not steady:
        delivered = per_rep[-1]
    return ReplayReport(ThroughputSample(delivered, length), bad, c2_total, peak, steady, B)


def _independent_sets(g: ConflictGraph) -> list[frozenset[int]]:
    out = []
    for r in range(1, g.size + 1):
        for combo in combinations(range(g.size), r):
            if g.is_independent(combo):
                out.append(frozenset(combo))
    return out


def _fire(g: ConflictGraph, slot, occ: tuple[int, ...], B: int):
    """Apply one slot; ``None`` if it breaks C2, else (new_occ, first_hop_fires)."""
    nxt = list(occ)
    firsts = 0
    for i in slot:
        if g.pred[i] < 0:
            firsts += 1
        elif occ[i] == 0:
            continue
        else:
            nxt[i] -= 1
        s = g.succ[i]
        if s >= 0:
            if occ[s] >= B:
                return None
            nxt[s] += 1
    return tuple(nxt), firsts


def _best_by_walks(inst: TinyInstance, L_max: int, sets):
    """Max first-hop fires per slot over closed walks in the buffer-state graph.

    Replaying a fixed schedule from empty buffers is monotone in the buffer
    state, so its per-pass states increase to a fixed point x. The schedule is
    therefore valid exactly when it labels a violation-free closed walk of
    length L (from x back to x), and by conservation every packet injected on
    that walk is also delivered, so T = first-hop fires / L.
    """
    g, B = inst.g, inst.B
    full = (1 << g.size) - 1
    set_masks = [sum(1 << i for i in st) for st in sets]
    # states reachable from empty buffers, with their outgoing moves
    zero = (0,) * g.size
    moves: dict[tuple[int, ...], list] = {}
    frontier = [zero]
    while frontier:
        new = []
        for x in frontier:
            out = moves[x] = []
            for k, st in enumerate(sets):
                r = _fire(g, st, x, B)
                if r is not None:
                    out.append((k, r[0], r[1], set_masks[k]))
                    if r[0] not in moves:
                        moves[r[0]] = []
                        new.append(r[0])
        frontier = new
    best = Fraction(0)
    best_seq: tuple[int, ...] = ()
    # every cycle is searched once, rotated to start at its smallest state
    for x in sorted(moves):
        layer = {(x, 0): (0, ())}
        for L in range(1, L_max + 1):
            nxt: dict = {}
            for (occ, mask), (F, seq) in layer.items():
                for k, nocc, fires, m in moves[occ]:
                    if nocc < x:
                        continue
                    key = (nocc, mask | m)
                    val = (F + fires, seq + (k,))
                    old = nxt.get(key)
                    if old is None or val > old:
                        nxt[key] = val
            layer = nxt
            hit = layer.get((x, full))
            if hit is not None and Fraction(hit[0], L) > best:
                best, best_seq = Fraction(hit[0], L), hit[1]
    return best, tuple(sets[k] for k in best_seq)


def _best_by_enumeration(inst: TinyInstance, L_max: int, sets):
    """Every rotation-canonical sequence, replayed; cut on a C2 break in the first pass."""
    g, B = inst.g, inst.B
    everything = frozenset(range(g.size))
    best = Fraction(0)
    best_seq: tuple[frozenset[int], ...] = ()
    for L in range(1, L_max + 1):
        seq: list[int] = []

        def dfs(occ: tuple[int, ...], covered: frozenset[int]) -> None:
            nonlocal best, best_seq
            if len(seq) == L:
                order = tuple(seq)
                if covered != everything or any(order[k:] + order[:k] < order for k in range(1, L)):
                    return
                slots = [sets[k] for k in order]
                rep = replay_schedule(inst, slots, reps=max(3 + B * g.size, 64))
                if rep.ok and rep.steady and rep.T > best:
                    best, best_seq = rep.T, tuple(slots)
                return
            for k in range(seq[0] if seq else 0, len(sets)):
                r = _fire(g, sets[k], occ, B)
                if r is None:
                    continue
                seq.append(k)
                dfs(r[0], covered | sets[k])
                seq.pop()

        dfs((0,) * g.size, frozenset())
    return best, best_seq


def brute_force_best_schedule(
    inst: TinyInstance, L_max: int = 8, *, method: str = "walks"
) -> tuple[Fraction, tuple[frozenset[int], ...]]:
    """Best steady-state throughput over all cyclic schedules of length <= L_max.

    A schedule is a sequence of independent sets covering N that, repeated
    from empty buffers, never breaks C2 or the buffer bound. ``method="walks"``
    searches closed walks of the buffer-state graph; ``method="enumerate"``
    replays every sequence and is kept as a cross-check for small ``L_max``.
    Returns ``(T, schedule)``, with ``T = 0`` and an empty schedule when no
    valid schedule exists.
    """
    g = inst.g
    if g.size > MAX_NODES:
        raise InstanceTooLarge(f"|N| = {g.size} > {MAX_NODES}")
    cap = MAX_L if method == "walks" else MAX_L_ENUMERATE
    if not 1 <= L_max <= cap:
        raise InstanceTooLarge(f"L_max must lie in 1..{cap} for method {method!r}")
    sets = _independent_sets(g)
    if method == "walks":
        best, slots = _best_by_walks(inst, L_max, sets)
        if slots:
            rep = replay_schedule(inst, slots)
            if not (rep.ok and rep.T == best):
                raise AssertionError(f"walk optimum {best} does not replay ({rep})")
        return best, slots
    if method == "enumerate":
        return _best_by_enumeration(inst, L_max, sets)
    raise ValueError(f"unknown method {method!r}")


def random_tiny_instance(
    rng: np.random.Generator,
    *,
    n: int = 10,
    radius: float = 0.4,
    max_paths: int = 4,
    min_size: int = 4,
    max_size: int = MAX_NODES,
    B: int | None = None,
    tries: int = 200,
    route: Callable[[MeshNetwork, int, int], tuple[int, ...] | None] | None = None,
) -> TinyInstance:
    """Random points in the unit square and a few min-hop paths, ``min_size <= |N| <= max_size``."""
    route = naive_shortest_path if route is None else route
    for _ in range(tries):
        pts = rng.random((n, 2))
        net = MeshNetwork.from_points(pts, radius)
        P = int(rng.integers(1, max_paths + 1))
        ends = rng.permutation(n)[: 2 * P]
        paths = []
        for a, b in zip(ends[0::2], ends[1::2]):
            nodes = route(net, int(a), int(b))
            if nodes is None:
                break
            paths.append(RoutePath(len(paths), nodes))
        if len(paths) != P:
            continue
        ps = PathSet(tuple(paths))
        if not min_size <= sum(p.hops for p in paths) <= max_size:
            continue
        d = build_multigraph(net, ps)
        g = build_conflict_graph(d, interference_pairs(net, d))
        return TinyInstance(g, ps, int(rng.integers(1, 3)) if B is None else B)
    raise RuntimeError("could not draw a tiny instance")
