"""Compare the compiled and pure-Python kernel backends.

Usage::

    python3 benchmarks/bench_kernels.py [--n 1280] [--k 72] [--repeat 5] [--json out.json]

Each kernel is timed on the same k-NN hypergraph with both backends; the
table reports the best of ``--repeat`` runs and the speedup. Exponents
with a closed form (p = 1.5, 2.5, 3, 4) skip the scalar pow call; other
exponents are pow-bound in both backends.
"""
import argparse
import json
import timeit

import numpy as np

from hyplap.experiments import interp1d_instance
from hyplap.hgraph import knn_hypergraph
from hyplap.kernels import available_backends


def kernel_calls(mod, H, L, u):
    free = np.ones(H.n, dtype=np.uint8)
    free[L.vertices] = 0
    out = np.empty_like(u)
    inc = (H.edge_ptr, H.edge_idx, H.inc_ptr, H.inc_edge, H.inc_vertex, H.weights, free)
    best = u.copy()
    return {
        "edge_extrema": lambda: mod.edge_extrema(u, H.edge_ptr, H.edge_idx),
        "ae_p2_sweep": lambda: mod.ae_p2_sweep(u, out, *inc),
        "ae_residual(p=3)": lambda: mod.ae_residual(u, 3.0, *inc),
        "ae_residual(p=2.7)": lambda: mod.ae_residual(u, 2.7, *inc),
        "ae_step(p=3)": lambda: mod.ae_step(u, out, 1e-3, 3.0, *inc),
        "ae_jacobi_sweep(p=3)": lambda: mod.ae_jacobi_sweep(u, out, 3.0, *inc),
        "ae_jacobi_sweep(p=2.7)": lambda: mod.ae_jacobi_sweep(u, out, 2.7, *inc),
        "fce_residual(p=2)": lambda: mod.fce_residual(u, 2.0, *inc),
        "fh_value(p=2)": lambda: mod.fh_value(u, 2.0, H.edge_ptr, H.edge_idx, H.weights),
        "fh_subgradient(p=2)": lambda: mod.fh_subgradient(u, 2.0, 1e-12, H.edge_ptr, H.edge_idx, H.weights),
        "fh_subgrad_run(10 it)": lambda: mod.fh_subgrad_run(
            u.copy(), best, np.inf, free, 2.0, 1.0, 1, 11, 1e-12, H.edge_ptr, H.edge_idx, H.weights
        ),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", type=int, default=1280)
    ap.add_argument("--k", type=int, default=72)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json")
    args = ap.parse_args(argv)

    x, L = interp1d_instance(args.n, 6, args.seed, connect_k=args.k)
    H = knn_hypergraph(x, args.k)
    u = L.impose(np.random.default_rng(args.seed).uniform(0, 1, H.n))
    backends = available_backends()
    if "cython" not in backends:
        print("compiled backend not available; timing the Python backend only")

    rows = {}
    for name, mod in backends.items():
        for kern, fn in kernel_calls(mod, H, L, u).items():
            number = 1 if name == "python" and kern.startswith("fh_subgrad_run") else 3
            t = min(timeit.repeat(fn, number=number, repeat=args.repeat)) / number
            rows.setdefault(kern, {})[name] = t

    print(f"n={H.n} m={H.m} nnz={H.edge_idx.size}")
    print(f"{'kernel':<24}{'python [ms]':>14}{'cython [ms]':>14}{'speedup':>10}")
    for kern, t in rows.items():
        py, cy = t.get("python"), t.get("cython")
        cy_s = f"{1e3 * cy:14.3f}" if cy is not None else f"{'-':>14}"
        sp = f"{py / cy:9.1f}x" if cy else f"{'-':>10}"
        print(f"{kern:<24}{1e3 * py:14.3f}{cy_s}{sp}")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump({"n": H.n, "m": H.m, "seconds": rows}, fh, indent=2)


if __name__ == "__main__":
    main()
