"""Experiment sweeps: networks, path groups, conflict graphs and scheduler runs
over a grid of (n, delta, P), written out as CSV.

Every network gets its own seed mixed from ``(seed, n, delta, network_id)``,
and every path group derives from that, so the result table is the same
whatever the worker count or execution order. ``wall_time`` is the one
nondeterministic field and goes to a separate ``timings.csv``.
"""

from __future__ import annotations

import csv
import json
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from fractions import Fraction
from pathlib import Path

import numpy as np

from .conflict import conflict_graph, rho
from .errors import BufferOverflowAttempt, NotConverged, PeriodNotFound, ZeroThroughputWindow
from .metrics import estimate_throughput, summarize
from .routing import PairingExhausted, generate_path_group, load_path_groups, save_path_groups
from .sera import run_sera
from .ser import SCHEMES, run_ser
from .seeding import substream
from .topology import GenerationBudgetExhausted, generate_network, load_networks, save_networks

__all__ = [
    "MissingArtifacts",
    "SweepConfig",
    "ResultRow",
    "PRESETS",
    "network_seed",
    "run_sweep",
    "write_results",
    "read_results",
    "emit_distributions",
]

ALGS = ("ser", "sera")
MODES = ("period", "estimate")
CENSORED = frozenset({"period_not_found", "not_converged", "zero_window", "pairing_exhausted", "generation_exhausted"})


class MissingArtifacts(FileNotFoundError):
    pass


@dataclass(frozen=True)
class SweepConfig:
    n_values: tuple[int, ...] = (60,)
    delta_values: tuple[int, ...] = (4, 8, 16, 32)
    networks_per_cell: int = 20
    groups_per_network: int = 20
    schemes: tuple[str, ...] = ("nd-bf",)
    algs: tuple[str, ...] = ALGS
    B_values: tuple[int, ...] = (1,)
    mode: str = "estimate"
    seed: int = 2024
    p_primes: tuple[float, ...] | None = None
    max_iters: int = 10**6
    t_max: int = 10**6
    tol: float = 0.001
    out_dir: str | None = None
    workers: int = 1

    def __post_init__(self) -> None:
        for name in ("n_values", "delta_values", "schemes", "algs", "B_values"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
            if not getattr(self, name):
                raise ValueError(f"{name} must not be empty")
        if self.p_primes is not None:
            object.__setattr__(self, "p_primes", tuple(float(x) for x in self.p_primes))
            if any(not 0 < x <= 1 for x in self.p_primes):
                raise ValueError("p_primes must lie in (0, 1]")
        if min(self.networks_per_cell, self.groups_per_network, self.workers, self.max_iters, self.t_max) < 1:
            raise ValueError("counts and caps must be >= 1")
        if any(n < 2 or n % 2 for n in self.n_values):
            raise ValueError("n values must be even and >= 2")
        if any(d < 1 for d in self.delta_values) or any(b < 1 for b in self.B_values):
            raise ValueError("delta and B values must be >= 1")
        if unknown := set(self.schemes) - set(SCHEMES):
            raise ValueError(f"unknown schemes {sorted(unknown)}")
        if unknown := set(self.algs) - set(ALGS):
            raise ValueError(f"unknown algorithms {sorted(unknown)}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")

    def P_values(self, n: int) -> list[int]:
        if self.p_primes is None:
            return list(range(1, n // 2 + 1))
        return sorted({max(1, round(x * n / 2)) for x in self.p_primes})

    @classmethod
    def from_json(cls, path: str | Path) -> SweepConfig:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        base = PRESETS[doc.pop("preset")] if "preset" in doc else cls()
        known = {f.name for f in fields(cls)}
        if unknown := set(doc) - known:
            raise ValueError(f"unknown config keys {sorted(unknown)}")
        return replace(base, **doc)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


PRESETS = {
    "paper": SweepConfig(
        n_values=(60, 80, 100, 120),
        delta_values=(4, 8, 16, 32),
        networks_per_cell=100,
        groups_per_network=100,
        schemes=SCHEMES,
        B_values=(1,),
    ),
    "desk": SweepConfig(p_primes=(0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)),
}


@dataclass(frozen=True)
class ResultRow:
    n: int
    delta: int
    network_id: int
    group_id: int
    P: int
    P_prime: float
    alg: str
    scheme: str
    B: int
    T: Fraction | None
    p: int
    delivered: int
    rho: float
    iterations: int
    status: str = "ok"
    wall_time: float = field(default=0.0, compare=False)

    def key(self) -> tuple:
        return (self.n, self.delta, self.network_id, self.group_id, self.P, self.alg, self.scheme, self.B)


RESULT_COLUMNS = [f.name for f in fields(ResultRow) if f.name != "wall_time"]
KEY_COLUMNS = ["n", "delta", "network_id", "group_id", "P", "alg", "scheme", "B"]


def network_seed(seed: int, n: int, delta: int, network_id: int) -> int:
    return int(substream(seed, n, delta, network_id).generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class _Unit:
    cfg: SweepConfig
    n: int
    delta: int
    network_id: int


@dataclass
class _UnitResult:
    n: int
    delta: int
    network_id: int
    rows: list[ResultRow]
    network: object = None
    groups: list = field(default_factory=list)
    rho_full: list[float] = field(default_factory=list)
    status: str = "ok"


def _status_of(exc: BaseException) -> str:
    if isinstance(exc, PeriodNotFound):
        return "period_not_found"
    if isinstance(exc, NotConverged):
        return "not_converged"
    if isinstance(exc, ZeroThroughputWindow):
        return "zero_window"
    if isinstance(exc, PairingExhausted):
        return "pairing_exhausted"
    if isinstance(exc, GenerationBudgetExhausted):
        return "generation_exhausted"
    if isinstance(exc, BufferOverflowAttempt):
        return "error:overflow"
    return f"error:{type(exc).__name__}"


def _run_one(cfg: SweepConfig, g, alg: str, scheme: str, B: int):
    """Returns (T, p, delivered, iterations)."""
    advance = alg == "sera"
    if cfg.mode == "estimate":
        est = estimate_throughput(g, scheme, advance=advance, B=B, tol=cfg.tol, t_max=cfg.t_max)
        return est.T, est.t_plus + 1, est.count, est.t_plus + 1
    if advance:
        r = run_sera(g, scheme, B, cfg.max_iters)
    else:
        r = run_ser(g, scheme, cfg.max_iters)
    return r.T, r.p, r.delivered, r.iterations


def _run_unit(unit: _Unit) -> _UnitResult:
    cfg, n, delta, net_id = unit.cfg, unit.n, unit.delta, unit.network_id
    out = _UnitResult(n, delta, net_id, [])
    seed = network_seed(cfg.seed, n, delta, net_id)
    try:
        net = generate_network(n, delta, seed)
    except GenerationBudgetExhausted as exc:
        out.status = _status_of(exc)
        return out
    out.network = net
    runs = [(alg, scheme, B) for alg in cfg.algs for scheme in cfg.schemes for B in (cfg.B_values if alg == "sera" else (1,))]
    for gid in range(cfg.groups_per_network):
        try:
            group = generate_path_group(net, gid, seed)
        except PairingExhausted as exc:
            for P in cfg.P_values(n):
                for alg, scheme, B in runs:
                    out.rows.append(ResultRow(n, delta, net_id, gid, P, 2 * P / n, alg, scheme, B, None, 0, 0, float("nan"), 0, _status_of(exc)))
            continue
        out.groups.append(group)
        out.rho_full.append(float(rho(conflict_graph(net, group.full))))
        for P in cfg.P_values(n):
            g = conflict_graph(net, group.set_for(P))
            r = float(rho(g))
            for alg, scheme, B in runs:
                t0 = time.perf_counter()
                try:
                    T, p, delivered, iters = _run_one(cfg, g, alg, scheme, B)
                    status = "ok"
                except Exception as exc:  # failures are data
                    T, p, delivered, iters, status = None, 0, 0, 0, _status_of(exc)
                out.rows.append(
                    ResultRow(n, delta, net_id, gid, P, 2 * P / n, alg, scheme, B, T, p, delivered, r, iters, status,
                              time.perf_counter() - t0)
                )
    return out


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, float):
        return repr(round(v, 12))
    return str(v)


def write_results(path: str | Path, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RESULT_COLUMNS)
        for row in sorted(rows, key=ResultRow.key):
            w.writerow([_fmt(getattr(row, c)) for c in RESULT_COLUMNS])


def _write_timings(path: Path, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(KEY_COLUMNS + ["wall_time"])
        for row in sorted(rows, key=ResultRow.key):
            w.writerow([_fmt(getattr(row, c)) for c in KEY_COLUMNS] + [f"{row.wall_time:.6f}"])


def read_results(path: str | Path) -> list[ResultRow]:
    path = Path(path)
    if not path.exists():
        raise MissingArtifacts(f"{path} not found")
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        for d in csv.DictReader(fh):
            rows.append(
                ResultRow(
                    n=int(d["n"]), delta=int(d["delta"]), network_id=int(d["network_id"]), group_id=int(d["group_id"]),
                    P=int(d["P"]), P_prime=float(d["P_prime"]), alg=d["alg"], scheme=d["scheme"], B=int(d["B"]),
                    T=Fraction(d["T"]) if d["T"] else None, p=int(d["p"]), delivered=int(d["delivered"]),
                    rho=float(d["rho"]), iterations=int(d["iterations"]), status=d["status"],
                )
            )
    return rows


@dataclass
class SweepResult:
    rows: list[ResultRow]
    table1: list[dict]
    failures: Counter

    @property
    def exit_code(self) -> int:
        return 0 if all(s in CENSORED for s in self.failures) else 1


def _table1(units: list[_UnitResult]) -> list[dict]:
    cells: dict[tuple[int, int], list[_UnitResult]] = {}
    for u in units:
        cells.setdefault((u.n, u.delta), []).append(u)
    out = []
    for (n, delta), us in sorted(cells.items()):
        nets = [u.network for u in us if u.network is not None]
        deg = [float(np.mean(net.degrees())) for net in nets]
        nodes = [float(np.mean([len(p.nodes) for p in g.full.paths])) for u in us for g in u.groups]
        rhos = [r for u in us for r in u.rho_full]
        row = {"n": n, "delta": delta, "networks": len(nets), "groups": len(nodes)}
        for name, xs in (("degree", deg), ("path_nodes", nodes), ("path_hops", [x - 1 for x in nodes]), ("rho", rhos)):
            if len(xs) >= 2:
                m, hw = summarize(xs)
            else:
                m, hw = (xs[0] if xs else float("nan")), float("nan")
            row[f"mean_{name}"] = m
            row[f"{name}_hw"] = hw
        out.append(row)
    return out


def _write_table1(path: Path, table) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        cols = list(table[0]) if table else ["n", "delta"]
        w.writerow(cols)
        for row in table:
            w.writerow([_fmt(row[c]) for c in cols])


def run_sweep(cfg: SweepConfig, out_dir: str | Path | None = None) -> SweepResult:
    """Run every (n, delta, network) unit, possibly in parallel, and collect rows.

    With an output directory, writes ``results.csv``, ``timings.csv``,
    ``table1.csv``, ``config.json`` and the network/path artifacts.
    """
    units = [
        _Unit(cfg, n, delta, k)
        for n in cfg.n_values
        for delta in cfg.delta_values
        for k in range(cfg.networks_per_cell)
    ]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            done = list(pool.map(_run_unit, units, chunksize=1))
    else:
        done = [_run_unit(u) for u in units]
    rows = sorted((r for u in done for r in u.rows), key=ResultRow.key)
    failures = Counter(r.status for r in rows if r.status != "ok")
    failures.update(u.status for u in done if u.status != "ok")
    result = SweepResult(rows, _table1(done), failures)

    out_dir = out_dir if out_dir is not None else cfg.out_dir
    if out_dir is not None:
        out = Path(out_dir)
        (out / "networks").mkdir(parents=True, exist_ok=True)
        (out / "paths").mkdir(exist_ok=True)
        write_results(out / "results.csv", rows)
        _write_timings(out / "timings.csv", rows)
        _write_table1(out / "table1.csv", result.table1)
        (out / "config.json").write_text(cfg.to_json() + "\n", encoding="utf-8")
        by_cell: dict[tuple[int, int], list[_UnitResult]] = {}
        for u in done:
            by_cell.setdefault((u.n, u.delta), []).append(u)
        for (n, delta), us in by_cell.items():
            us.sort(key=lambda u: u.network_id)
            save_networks(out / "networks" / f"n{n}_d{delta}.json", [u.network for u in us if u.network is not None])
            for u in us:
                if u.network is not None:
                    save_path_groups(out / "paths" / f"n{n}_d{delta}_net{u.network_id}.json", u.groups,
                                     network_ref=u.network_id)
    return result


def emit_distributions(out_dir: str | Path) -> dict[str, Path]:
    """Degree and path-length histograms per (n, delta) from sweep artifacts."""
    out = Path(out_dir)
    results = out / "results.csv"
    if not results.exists() or not read_results(results):
        raise MissingArtifacts(f"no sweep results in {out}")
    net_files = sorted((out / "networks").glob("n*_d*.json")) if (out / "networks").is_dir() else []
    if not net_files:
        raise MissingArtifacts(f"no network artifacts in {out / 'networks'}")
    degree: Counter = Counter()
    hops: Counter = Counter()
    for nf in net_files:
        n, delta = (int(x) for x in nf.stem[1:].split("_d"))
        for net in load_networks(nf):
            for k in net.degrees():
                degree[(n, delta, int(k))] += 1
        for pf in sorted((out / "paths").glob(f"n{n}_d{delta}_net*.json")):
            for grp in load_path_groups(pf):
                for p in grp.full.paths:
                    hops[(n, delta, p.hops)] += 1
    paths = {"degree": out / "degree_hist.csv", "path_hops": out / "path_hops_hist.csv"}
    for name, counts, col in (("degree", degree, "degree"), ("path_hops", hops, "hops")):
        with open(paths[name], "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["n", "delta", col, "count"])
            for key in sorted(counts):
                w.writerow([*key, counts[key]])
    return paths
