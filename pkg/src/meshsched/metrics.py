"""Throughput accounting, the streaming estimator, the clique/independence
bound and confidence intervals."""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from . import kernels
from .conflict import ConflictGraph
from .errors import BufferOverflowAttempt, NotConverged, ZeroThroughputWindow
from .ser import _graph_arrays, initial_levels

__all__ = [
    "ThroughputSample",
    "Estimate",
    "PhiBound",
    "InsufficientSamples",
    "streaming_estimator",
    "estimate_throughput",
    "max_clique",
    "max_independent_set",
    "phi_bound",
    "component_bound",
    "summarize",
]

DEFAULT_TOL = 0.001


@dataclass(frozen=True)
class ThroughputSample:
    delivered: int
    length: int

    def __post_init__(self) -> None:
        if self.length < 1 or self.delivered < 0:
            raise ValueError("need length >= 1 and delivered >= 0")

    @property
    def T(self) -> Fraction:
        return Fraction(self.delivered, self.length)


@dataclass(frozen=True)
class Estimate:
    """``T = count / (t_plus + 1)`` where ``count`` is the number of terminal
    sink occurrences over steps ``0..t_plus``."""

    count: int
    t_plus: int

    @property
    def T(self) -> Fraction:
        return Fraction(self.count, self.t_plus + 1)


def _check_window(w, tol):
    if w < 1:
        raise ValueError("window must be >= 1")
    if tol <= 0:
        raise ValueError("tol must be positive")


def streaming_estimator(
    run: Iterable,
    w: int,
    tol: float = DEFAULT_TOL,
    t_max: int = 10**6,
    *,
    terminal=None,
    grace: int | None = None,
) -> Estimate:
    """Running average of terminal sinks per step, stopped once it settles.

    ``run`` yields, per step, either the terminal-sink count or (when
    ``terminal`` is given) the full sink set. The stopping time is the least
    ``t >= w`` with ``|T_t - T_{t-w}| <= tol * T_{t-w}``; windows where
    ``T_{t-w}`` is still zero are skipped for up to ``grace`` steps.
    """
    _check_window(w, tol)
    grace = 10 * w if grace is None else grace
    history = [0] * (w + 1)
    total = 0
    t = -1
    for t, item in enumerate(run):
        total += len(item & terminal) if terminal is not None else int(item)
        history[t % (w + 1)] = total
        if t >= w:
            prev = history[(t - w) % (w + 1)]
            if prev > 0:
                if abs(total * (t - w + 1) - prev * (t + 1)) <= tol * prev * (t + 1):
                    return Estimate(total, t)
            elif t >= w + grace:
                raise ZeroThroughputWindow(f"no terminal sink by step {t}")
        if t >= t_max:
            break
    raise NotConverged(f"estimator did not settle by step {t}")


def estimate_throughput(
    g: ConflictGraph,
    scheme: str = "nd-bf",
    *,
    advance: bool = False,
    B: int = 1,
    w: int | None = None,
    tol: float = DEFAULT_TOL,
    t_max: int = 10**6,
    grace: int | None = None,
    backend: str | None = None,
) -> Estimate:
    """Streaming estimate for SER (``advance=False``) or SERA, run in the kernel.

    The window defaults to ``|N|``.
    """
    w = g.size if w is None else w
    _check_window(w, tol)
    grace = 10 * w if grace is None else grace
    kern = kernels.get(backend)
    indptr, indices, pred, succ = _graph_arrays(g)
    terminal = np.zeros(g.size, dtype=np.uint8)
    terminal[list(g.terminal)] = 1
    lev0 = np.asarray(initial_levels(g, scheme), dtype=np.int32)
    occ0 = np.zeros(g.size, dtype=np.int32)
    status, count, t = kern.run_estimate(
        indptr, indices, pred, succ, terminal, lev0, occ0, B, advance, w, float(tol), t_max, grace
    )
    if status == kernels.OVERFLOW:
        raise BufferOverflowAttempt(f"out-buffer overflow at step {t}")
    if status == kernels.NOT_CONVERGED:
        raise NotConverged(f"estimator did not settle by step {t}")
    if status == kernels.ZERO_WINDOW:
        raise ZeroThroughputWindow(f"no terminal sink by step {t}")
    return Estimate(int(count), int(t))


def _bitsets(adj, n: int) -> list[int]:
    return [sum(1 << j for j in adj[i]) for i in range(n)]


def _clique_bits(nbr: list[int], n: int) -> list[int]:
    """Exact maximum clique; branch and bound with a greedy-colouring bound."""
    best: list[int] = []

    def colour_sort(cand: int):
        order, colours = [], []
        colour = 0
        uncoloured = cand
        while uncoloured:
            colour += 1
            q = uncoloured
            while q:
                v = (q & -q).bit_length() - 1
                q &= ~nbr[v] & ~(1 << v)
                uncoloured &= ~(1 << v)
                order.append(v)
                colours.append(colour)
        return order, colours

    def expand(clique: list[int], cand: int) -> None:
        nonlocal best
        order, colours = colour_sort(cand)
        for idx in range(len(order) - 1, -1, -1):
            if len(clique) + colours[idx] <= len(best):
                return
            v = order[idx]
            clique.append(v)
            sub = cand & nbr[v]
            if sub:
                expand(clique, sub)
            elif len(clique) > len(best):
                best = list(clique)
            clique.pop()
            cand &= ~(1 << v)

    if n:
        expand([], (1 << n) - 1)
    return sorted(best)


def max_clique(g: ConflictGraph) -> list[int]:
    return _clique_bits(_bitsets(g.adj, g.size), g.size)


def max_independent_set(g: ConflictGraph) -> list[int]:
    full = (1 << g.size) - 1
    comp = [full & ~b & ~(1 << i) for i, b in enumerate(_bitsets(g.adj, g.size))]
    return _clique_bits(comp, g.size)


@dataclass(frozen=True)
class PhiBound:
    omega: int
    alpha: int
    phi: Fraction
    bound: Fraction


def phi_bound(g: ConflictGraph, P: int | None = None, exact_limit: int = 40) -> PhiBound | None:
    """``P / max(omega, |N|/alpha)``; ``None`` when ``|N|`` exceeds ``exact_limit``."""
    if g.size > exact_limit or g.size == 0:
        return None
    P = g.P if P is None else P
    omega = len(max_clique(g))
    alpha = len(max_independent_set(g))
    phi = max(Fraction(omega), Fraction(g.size, alpha))
    return PhiBound(omega, alpha, phi, Fraction(P) / phi)


def component_bound(g: ConflictGraph, exact_limit: int = 40) -> Fraction | None:
    """Sum of ``P_c / phi(G_c)`` over connected components.

    The single-graph bound assumes every node of G is scheduled equally often,
    which SER only guarantees on a connected G; on a disconnected G each
    component cycles on its own and the bound holds per component.
    """
    if g.size > exact_limit or g.size == 0:
        return None
    total = Fraction(0)
    for comp in g.components():
        index = {v: k for k, v in enumerate(comp)}
        sub = ConflictGraph.from_edges(
            [g.nodes[v] for v in comp],
            [(index[i], index[j]) for i, j in g.edges() if i in index and j in index],
            P=sum(1 for v in comp if v in g.terminal),
        )
        total += phi_bound(sub, exact_limit=exact_limit).bound
    return total


class InsufficientSamples(ValueError):
    pass


def summarize(samples, level: float = 0.95) -> tuple[float, float]:
    """Mean and normal-approximation confidence half-width."""
    xs = [float(x) for x in samples]
    if len(xs) < 2:
        raise InsufficientSamples("need at least two samples")
    z = statistics.NormalDist().inv_cdf(0.5 + level / 2)
    return statistics.fmean(xs), z * statistics.stdev(xs) / math.sqrt(len(xs))
