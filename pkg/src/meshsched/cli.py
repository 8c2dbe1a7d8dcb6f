"""Command-line entry point: ``meshsched <command> ...``."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from collections import defaultdict
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

from .conflict import ConflictGraph, conflict_graph
from .errors import NotConverged, PeriodNotFound, ZeroThroughputWindow
from .harness import PRESETS, MissingArtifacts, SweepConfig, emit_distributions, run_sweep
from .metrics import estimate_throughput, summarize
from .oracle import TinyInstance, brute_force_best_schedule
from .routing import PathSet, generate_path_groups, load_path_groups, save_path_groups
from .ser import SCHEMES, run_ser
from .sera import run_sera
from .topology import generate_network, load_networks, save_networks


def _cmd_gen(a) -> int:
    nets = [generate_network(a.n, a.delta, a.seed + k) for k in range(a.count)]
    save_networks(a.out, nets)
    print(f"wrote {len(nets)} networks (R = {nets[0].radius:g}) to {a.out}")
    return 0


def _cmd_paths(a) -> int:
    net = load_networks(a.net)[a.index]
    groups = generate_path_groups(net, a.groups, a.seed)
    save_path_groups(a.out, groups, network_ref=a.index)
    print(f"wrote {len(groups)} path groups of {net.n // 2} paths to {a.out}")
    return 0


def _cmd_build(a) -> int:
    net = load_networks(a.net)[a.index]
    group = load_path_groups(a.paths)[a.group]
    ps = group.full if a.P is None else group.set_for(a.P)
    g = conflict_graph(net, ps)
    g.save(a.out)
    print(f"|N| = {g.size}, |E| = {g.num_edges()}, P = {g.P}")
    return 0


RUN_COLUMNS = ["graph", "alg", "numbering", "mode", "B", "p", "m", "L", "t_plus", "delivered", "T", "m_i"]


def _cmd_run(a) -> int:
    g = ConflictGraph.load(a.graph)
    row = dict.fromkeys(RUN_COLUMNS, "")
    row.update(graph=Path(a.graph).name, alg=a.alg, numbering=a.numbering, mode=a.mode)
    if a.alg == "sera":
        row["B"] = a.buffers
    try:
        if a.mode == "estimate":
            est = estimate_throughput(g, a.numbering, advance=a.alg == "sera", B=a.buffers, t_max=a.max_iters)
            row.update(t_plus=est.t_plus, delivered=est.count, T=str(est.T))
        elif a.alg == "ser":
            r = run_ser(g, a.numbering, a.max_iters)
            row.update(p=r.p, m=r.m, L=r.schedule.L, delivered=r.delivered, T=str(r.T))
        else:
            r = run_sera(g, a.numbering, a.buffers, a.max_iters)
            row.update(p=r.p, L=r.schedule.L, delivered=r.delivered, T=str(r.T),
                       m_i=json.dumps(r.terminal_counts(g)))
    except (PeriodNotFound, NotConverged, ZeroThroughputWindow) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    print(f"T = {row['T']} ({float(Fraction(row['T'])):.6f})")
    if a.out:
        out = Path(a.out)
        new = not out.exists() or out.stat().st_size == 0
        with open(out, "a", encoding="utf-8", newline="") as fh:
            w = csv.DictWriter(fh, RUN_COLUMNS, lineterminator="\n")
            if new:
                w.writeheader()
            w.writerow(row)
    return 0


def _cmd_stats(a) -> int:
    keys = [k.strip() for k in a.group_by.split(",") if k.strip()]
    groups: dict[tuple, list[float]] = defaultdict(list)
    with open(a.input, encoding="utf-8", newline="") as fh:
        for d in csv.DictReader(fh):
            if d.get("status", "ok") != "ok" or not d.get(a.value):
                continue
            groups[tuple(d[k] for k in keys)].append(float(Fraction(d[a.value])))
    out = open(a.out, "w", encoding="utf-8", newline="") if a.out else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(keys + ["count", "mean", "half_width"])
        for k in sorted(groups, key=lambda t: [float(x) if _numeric(x) else x for x in t]):
            xs = groups[k]
            if len(xs) >= 2:
                m, hw = summarize(xs, a.level)
                w.writerow(list(k) + [len(xs), repr(round(m, 12)), repr(round(hw, 12))])
            else:
                w.writerow(list(k) + [len(xs), repr(round(xs[0], 12)), ""])
    finally:
        if a.out:
            out.close()
    return 0


def _numeric(x: str) -> bool:
    try:
        float(x)
        return True
    except ValueError:
        return False


def _cmd_sweep(a) -> int:
    cfg = SweepConfig.from_json(a.config) if a.config else PRESETS[a.preset]
    if a.workers is not None:
        cfg = replace(cfg, workers=a.workers)
    out = a.out or cfg.out_dir
    if out is None:
        print("no output directory (set out_dir in the config or pass --out)", file=sys.stderr)
        return 2
    res = run_sweep(cfg, out)
    print(f"{len(res.rows)} rows written to {out}/results.csv")
    for status, count in sorted(res.failures.items()):
        print(f"  {status}: {count}")
    return res.exit_code


def _cmd_oracle(a) -> int:
    g = ConflictGraph.load(a.graph)
    best, slots = brute_force_best_schedule(TinyInstance(g, PathSet(()), a.buffers), a.lmax)
    print(f"best T = {best}")
    print("schedule:", [sorted(s) for s in slots])
    return 0


def _cmd_dist(a) -> int:
    try:
        paths = emit_distributions(a.dir)
    except MissingArtifacts as exc:
        print(f"missing artifacts: {exc}", file=sys.stderr)
        return 2
    for p in paths.values():
        print(p)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="meshsched", description="Conflict graphs and edge-reversal link schedules for mesh networks.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("gen", help="generate random mesh networks")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--delta", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_gen)

    p = sub.add_parser("paths", help="generate nested path groups for one network")
    p.add_argument("--net", required=True)
    p.add_argument("--index", type=int, default=0, help="network index within the file")
    p.add_argument("--groups", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_paths)

    p = sub.add_parser("build", help="build the conflict graph of a path set")
    p.add_argument("--net", required=True)
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--paths", required=True)
    p.add_argument("--group", type=int, default=0)
    p.add_argument("--P", type=int, default=None, help="number of paths (default: all)")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_build)

    p = sub.add_parser("run", help="run SER or SERA on a conflict graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--alg", choices=("ser", "sera"), default="ser")
    p.add_argument("--numbering", choices=SCHEMES, default="nd-bf")
    p.add_argument("--mode", choices=("period", "estimate"), default="period")
    p.add_argument("--buffers", type=int, default=1)
    p.add_argument("--max-iters", type=int, default=10**6)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("stats", help="group means and confidence half-widths")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--group-by", default="n,delta,P")
    p.add_argument("--value", default="T")
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_stats)

    p = sub.add_parser("sweep", help="run a configured experiment sweep")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--config")
    src.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--workers", type=int)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("oracle", help="exhaustive best schedule for a tiny graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--lmax", type=int, default=6)
    p.add_argument("--buffers", type=int, default=1)
    p.set_defaults(fn=_cmd_oracle)

    p = sub.add_parser("dist", help="degree and path-length histograms of a sweep")
    p.add_argument("--dir", required=True)
    p.set_defaults(fn=_cmd_dist)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
