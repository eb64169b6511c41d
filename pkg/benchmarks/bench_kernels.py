"""Time the compiled and pure-Python Schur sweeps on the same inputs.

Run ``python benchmarks/bench_kernels.py``; prints one line per (depth, grid)
pair with the median time of each backend and their maximum disagreement.
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from bethe_sumrules import kernels
from bethe_sumrules.sum_rules import offset_nodes


def bench(depth: int, nodes: int, repeat: int) -> None:
    v = np.random.default_rng(depth).uniform(-2, 2, 2 ** (depth + 1) - 1)
    zetas = np.exp(1j * offset_nodes(nodes))
    out, times = {}, {}
    for name in kernels.BACKENDS:
        fn = kernels.BACKENDS[name].schur_sweep
        out[name] = fn(v, zetas)
        times[name] = np.median(timeit.repeat(lambda: fn(v, zetas), number=1, repeat=repeat))
    line = "  ".join(f"{k}={t * 1e3:9.3f} ms" for k, t in times.items())
    if len(out) == 2:
        a, b = out.values()
        diff = max(np.max(np.abs(a[0] - b[0]) / np.abs(b[0])), np.max(np.abs(a[1] - b[1]) / np.abs(b[1])))
        speed = times["python"] / times["compiled"]
        line += f"  speedup={speed:6.1f}x  max_rel_diff={diff:.1e}"
    print(f"depth={depth:2d} nodes={nodes:6d}  {line}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if "compiled" not in kernels.BACKENDS:
        print("compiled extension not built; timing the Python fallback only")
    for depth, nodes in [(2, 256), (4, 1024), (6, 4096), (8, 4096), (10, 1024)]:
        bench(depth, nodes, args.repeat)


if __name__ == "__main__":
    main()
