"""Time the compiled kernels against their pure-numpy twins.

Run as: python3 benchmarks/bench_kernels.py [--nodes N] [--edges M]
The numba variants are exercised only when numba imported (i.e. not
under FLOWRANK_NO_NUMBA=1); results report per-call time after warmup.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from flowrank import _kernels, build_graph
from flowrank.rng import trial_base


def _random_graph(n: int, m: int, seed: int):
    rng = np.random.default_rng(seed)
    ring = np.column_stack((np.arange(n), (np.arange(n) + 1) % n))
    extra = rng.integers(0, n, size=(m, 2))
    return build_graph(np.vstack((ring, extra)))


def _time(fn, *args, repeat: int = 5, inner: int = 20) -> float:
    fn(*args)  # warmup (and numba compilation)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for _ in range(inner):
            fn(*args)
        best = min(best, (time.perf_counter() - t0) / inner)
    return best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nodes", type=int, default=20_000)
    ap.add_argument("--edges", type=int, default=120_000)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()

    g = _random_graph(args.nodes, args.edges, args.seed)
    x = np.random.default_rng(args.seed).random(g.node_count)
    seeds = np.array([0], dtype=np.int64)
    base = np.uint64(trial_base(args.seed, 0))

    print(f"graph: {g.node_count} nodes, {g.edge_count} edges; "
          f"active backend: {_kernels.BACKEND}")
    header = f"{'kernel':<12} {'backend':<8} {'per call':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, call_args in (
            ("gather_sum", (g.in_indptr, g.in_indices, x)),
            ("ic_spread", (g.out_indptr, g.out_indices, seeds, 0.02, base))):
        times = {}
        for backend, impls in _kernels.IMPLEMENTATIONS.items():
            fn = impls[0] if name == "gather_sum" else impls[1]
            times[backend] = _time(fn, *call_args)
        for backend, t in times.items():
            speedup = times["numpy"] / t
            print(f"{name:<12} {backend:<8} {t * 1e6:>10.1f}us {speedup:>8.1f}x")


if __name__ == "__main__":
    main()
