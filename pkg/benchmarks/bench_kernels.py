"""Time the compiled and pure-Python kernels on the same inputs and check they agree.

    python benchmarks/bench_kernels.py --n 300 --p-edge 0.2 --repeat 3
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from kplist.generators import erdos_renyi
from kplist.graph import ClusterView, sweep_order
from kplist.kernels import backends


def _best(fn, repeat: int) -> tuple[float, object]:
    best, out = float("inf"), None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def cases(n: int, p_edge: float, seed: int):
    g = erdos_renyi(n, p_edge, seed)
    yield "list_cliques p=4", lambda k: k.list_cliques(g.indptr, g.indices, 4)
    yield "list_cliques p=5", lambda k: k.list_cliques(g.indptr, g.indices, 5)
    view = ClusterView(g, np.arange(n), "loop")
    order, _ = sweep_order(view, seed)
    deg = g.degree.astype(np.int64)
    yield "sweep_cut", lambda k: k.sweep_cut(order, g.indptr, g.indices, deg)
    small = erdos_renyi(18, 0.4, seed)
    sv = ClusterView(small, np.arange(18), "loop")
    masks = sv.local_adjacency_masks()
    sdeg = sv.view_degree.astype(np.int64)
    yield "exact_min_cut n=18", lambda k: k.exact_min_cut(masks, sdeg)


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        return np.array_equal(np.sort(a, axis=0) if a.ndim > 1 else a, np.sort(b, axis=0) if b.ndim > 1 else b)
    return a == b


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=300)
    ap.add_argument("--p-edge", type=float, default=0.2)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    impls = backends()
    names = sorted(impls)
    print(f"{'kernel':<22}" + "".join(f"{name:>12}" for name in names) + f"{'speedup':>10}  agree")
    ok = True
    for label, fn in cases(args.n, args.p_edge, args.seed):
        times, outs = {}, {}
        for name in names:
            times[name], outs[name] = _best(lambda: fn(impls[name]), args.repeat)
        agree = all(_same(outs[names[0]], outs[x]) for x in names[1:])
        ok &= agree
        speed = times["python"] / times["cython"] if "cython" in times and times["cython"] > 0 else float("nan")
        row = f"{label:<22}" + "".join(f"{times[name]:>11.4f}s" for name in names)
        print(row + f"{speed:>9.1f}x  {agree}")
    if "cython" not in impls:
        print("compiled backend not built; only the Python kernels were timed")
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
