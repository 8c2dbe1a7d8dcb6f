"""Random mesh topologies with a degree cap.

Nodes are dropped one at a time into a 1500 x 1500 square, the first one at
the centre. A candidate position is kept only if it has at least one placed
neighbour, keeps every degree at or below ``delta_max`` and stays at least 25
units away from all placed nodes. Two nodes are neighbours when their
Euclidean distance is at most the radius ``R = 200 * sqrt(20 * delta / n)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .seeding import make_rng

__all__ = [
    "SIDE",
    "MIN_SEPARATION",
    "ATTEMPTS_PER_NETWORK",
    "GenerationBudgetExhausted",
    "NodeSite",
    "MeshNetwork",
    "radius_for",
    "generate_network",
    "neighbors",
    "load_networks",
    "save_networks",
]

SIDE = 1500.0
MIN_SEPARATION = 25.0
ATTEMPTS_PER_NETWORK = 1000


class GenerationBudgetExhausted(RuntimeError):
    """Too many whole-network restarts; (n, delta) is probably infeasible."""


@dataclass(frozen=True)
class NodeSite:
    id: int
    x: float
    y: float


@dataclass(frozen=True)
class MeshNetwork:
    sites: tuple[NodeSite, ...]
    delta_max: int
    radius: float
    seed: int | None = None
    restarts: int = 0
    _adj: tuple[frozenset[int], ...] = field(default=(), repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self._adj:
            object.__setattr__(self, "_adj", _adjacency(self.sites, self.radius))

    @property
    def n(self) -> int:
        return len(self.sites)

    def coords(self) -> np.ndarray:
        return np.array([(s.x, s.y) for s in self.sites], dtype=float)

    def distance(self, a: int, b: int) -> float:
        sa, sb = self.sites[a], self.sites[b]
        return math.hypot(sa.x - sb.x, sa.y - sb.y)

    def degree(self, i: int) -> int:
        return len(self._adj[i])

    def degrees(self) -> list[int]:
        return [len(a) for a in self._adj]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "delta": self.delta_max,
            "radius": self.radius,
            "seed": self.seed,
            "sites": [{"id": s.id, "x": s.x, "y": s.y} for s in self.sites],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> MeshNetwork:
        sites = tuple(NodeSite(int(s["id"]), float(s["x"]), float(s["y"])) for s in doc["sites"])
        if [s.id for s in sites] != list(range(len(sites))):
            raise ValueError("site ids must be 0..n-1 in order")
        return cls(sites, int(doc["delta"]), float(doc["radius"]), doc.get("seed"))

    @classmethod
    def from_points(cls, points, radius: float, delta_max: int | None = None) -> MeshNetwork:
        """Hand-built network (tests, worked examples); no placement rules are checked."""
        sites = tuple(NodeSite(i, float(x), float(y)) for i, (x, y) in enumerate(points))
        net = cls(sites, delta_max if delta_max is not None else 0, float(radius))
        if delta_max is None:
            object.__setattr__(net, "delta_max", max(net.degrees(), default=0))
        return net


def _adjacency(sites, radius: float) -> tuple[frozenset[int], ...]:
    n = len(sites)
    if n == 0:
        return ()
    xy = np.array([(s.x, s.y) for s in sites], dtype=float)
    d = np.hypot(xy[:, None, 0] - xy[None, :, 0], xy[:, None, 1] - xy[None, :, 1])
    close = d <= radius
    np.fill_diagonal(close, False)
    return tuple(frozenset(np.flatnonzero(close[i]).tolist()) for i in range(n))


def radius_for(n: int, delta_max: int) -> float:
    """Radius that keeps the expected neighbourhood density close to the global one."""
    return 200.0 * math.sqrt(20.0 * delta_max / n)


def neighbors(net: MeshNetwork, i: int) -> frozenset[int]:
    if not 0 <= i < net.n:
        raise IndexError(f"node {i} not in network of {net.n} nodes")
    return net._adj[i]


def _try_build(n, delta_max, radius, rng, attempts, reset_on_success):
    xs = np.empty(n)
    ys = np.empty(n)
    deg = np.zeros(n, dtype=np.int64)
    xs[0] = ys[0] = SIDE / 2
    placed = 1
    failures = 0
    while placed < n:
        x, y = rng.uniform(0.0, SIDE, size=2)
        d = np.hypot(xs[:placed] - x, ys[:placed] - y)
        near = d <= radius
        k = int(near.sum())
        if 1 <= k <= delta_max and d.min() >= MIN_SEPARATION and not (deg[:placed][near] >= delta_max).any():
            xs[placed], ys[placed] = x, y
            deg[:placed][near] += 1
            deg[placed] = k
            placed += 1
            if reset_on_success:
                failures = 0
            continue
        failures += 1
        if failures >= attempts:
            return None
    return xs, ys


def generate_network(
    n: int,
    delta_max: int,
    seed: int,
    *,
    max_restarts: int = 100,
    attempts: int = ATTEMPTS_PER_NETWORK,
    reset_on_success: bool = False,
) -> MeshNetwork:
    """Place ``n`` nodes sequentially; deterministic in ``(n, delta_max, seed)``.

    Failed placements are counted for the network as a whole. Once ``attempts``
    of them pile up the partial network is thrown away and placement restarts
    from node 0, drawing from the same random stream. ``reset_on_success``
    zeroes the counter after every accepted node instead, for sensitivity runs.
    """
    if n < 2:
        raise ValueError("need at least two nodes")
    if delta_max < 1:
        raise ValueError("delta_max must be >= 1")
    radius = radius_for(n, delta_max)
    rng = make_rng(seed)
    for restart in range(max_restarts):
        built = _try_build(n, delta_max, radius, rng, attempts, reset_on_success)
        if built is not None:
            xs, ys = built
            sites = tuple(NodeSite(i, float(xs[i]), float(ys[i])) for i in range(n))
            return MeshNetwork(sites, delta_max, radius, seed, restarts=restart)
    raise GenerationBudgetExhausted(f"no network for n={n}, delta={delta_max} after {max_restarts} restarts")


def save_networks(path: str | Path, nets) -> None:
    Path(path).write_text(json.dumps([net.to_dict() for net in nets]) + "\n", encoding="utf-8")


def load_networks(path: str | Path) -> list[MeshNetwork]:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if isinstance(doc, dict):
        doc = [doc]
    return [MeshNetwork.from_dict(d) for d in doc]
