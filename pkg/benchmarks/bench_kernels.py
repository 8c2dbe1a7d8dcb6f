"""Compare the compiled and pure-Python step kernels on desk-scale graphs.

    python benchmarks/bench_kernels.py [--n 60] [--delta 8] [--graphs 5]
"""

from __future__ import annotations

import argparse
import time

from meshsched import kernels
from meshsched.conflict import conflict_graph
from meshsched.metrics import estimate_throughput
from meshsched.routing import generate_path_group
from meshsched.ser import run_ser
from meshsched.sera import run_sera
from meshsched.topology import generate_network


def _graphs(n: int, delta: int, count: int):
    out = []
    for k in range(count):
        net = generate_network(n, delta, 1000 + k)
        out.append(conflict_graph(net, generate_path_group(net, 0, 1000 + k).full))
    return out


def _time(fn, graphs, backend: str) -> tuple[float, list]:
    t0 = time.perf_counter()
    res = [fn(g, backend) for g in graphs]
    return time.perf_counter() - t0, res


TASKS = {
    "ser/period": lambda g, b: run_ser(g, "nd-bf", backend=b).T,
    "sera/period B=1": lambda g, b: run_sera(g, "nd-bf", 1, backend=b).T,
    "sera/estimate B=2": lambda g, b: estimate_throughput(g, "nd-bf", advance=True, B=2, backend=b).T,
}


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=60)
    ap.add_argument("--delta", type=int, default=8)
    ap.add_argument("--graphs", type=int, default=5)
    a = ap.parse_args()
    graphs = _graphs(a.n, a.delta, a.graphs)
    print(f"{len(graphs)} graphs, n={a.n}, delta={a.delta}, mean |N| = {sum(g.size for g in graphs) / len(graphs):.0f}")
    if "cython" not in kernels.BACKENDS:
        print("compiled backend not built; only the Python kernel is available")
    for name, fn in TASKS.items():
        times = {}
        results = {}
        for backend in kernels.BACKENDS:
            times[backend], results[backend] = _time(fn, graphs, backend)
        agree = len({tuple(r) for r in results.values()}) == 1
        line = "  ".join(f"{b}: {t:8.3f}s" for b, t in times.items())
        speed = f"  speedup x{times['python'] / times['cython']:.1f}" if "cython" in times else ""
        print(f"{name:20s} {line}{speed}  results agree: {agree}")


if __name__ == "__main__":
    main()
