"""Command-line front end: ``hyplap {solve,ssl,interp1d,knn,verify,bench}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import io
from .experiments import bench, interp1d_instance, run_interp1d, time_to_error, write_manifest
from .hgraph import categorical_hypergraph, knn_graph, knn_hypergraph
from .kernels import BACKEND
from .oracle import verify_instance
from .solver import SOLVERS, SolverConfig, solve
from .ssl import run_trials

log = logging.getLogger("hyplap")


def _solver_flags(p: argparse.ArgumentParser, tol: float = 1e-8, max_iter: int = 100_000) -> None:
    p.add_argument("--method", choices=sorted(SOLVERS), default="ae-p2")
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--tol", type=float, default=tol)
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--max-iter", type=int, default=max_iter)
    p.add_argument("--init", choices=("min", "max", "zero"), default="min")
    p.add_argument("--trace-every", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scheme", choices=("explicit", "jacobi"), default="explicit", help="general-p scheme for --method ae")
    p.add_argument("--stop", choices=("delta", "error"), default="delta", help="stop on update size or on estimated error")


def _cfg(args) -> SolverConfig:
    return SolverConfig(
        p=args.p, tau=args.tau, tol=args.tol, max_iter=args.max_iter, init=args.init,
        seed=args.seed, trace_every=args.trace_every, scheme=args.scheme, stop=args.stop,
    )


def _resolved(args) -> dict:
    out = {k: v for k, v in vars(args).items() if k != "func"}
    out["backend"] = BACKEND
    return out


def cmd_solve(args) -> int:
    H = io.load_hypergraph(args.hypergraph)
    L = io.load_labels(args.labels)
    u, rep = solve(args.method, H, L, _cfg(args))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    io.write_solution(u, out / "solution.csv")
    io.write_trace(rep.trace, out / "trace.csv")
    (out / "report.json").write_text(json.dumps(rep.as_dict(), indent=2) + "\n")
    write_manifest(out, _resolved(args))
    print(json.dumps(rep.as_dict()))
    return 0 if rep.converged or args.method == "fh" else 1


def _load_dataset(args):
    path = Path(args.dataset)
    if path.suffix.lower() == ".csv":
        if not args.label_column:
            raise SystemExit("--label-column is required for CSV datasets")
        rows, truth, _ = io.load_categorical_csv(path, args.label_column)
        return categorical_hypergraph(rows), truth
    if not args.labels:
        raise SystemExit("--labels (vertex class lines) is required for hypergraph datasets")
    H = io.load_hypergraph(path)
    pairs = io.read_label_pairs(args.labels)
    truth = np.zeros(H.n, dtype=np.int64)
    for i, c in pairs:
        truth[i] = int(c)
    if len(pairs) != H.n or truth.min() < 1:
        raise SystemExit("labels file must give a class >= 1 for every vertex")
    return H, truth


def cmd_ssl(args) -> int:
    H, truth = _load_dataset(args)
    if args.dump_hypergraph:
        io.write_hypergraph(H, args.dump_hypergraph)
    metrics = run_trials(
        H, truth, size=args.train_size, rate=args.train_rate, runs=args.runs, seed=args.seed,
        method=args.method, cfg=_cfg(args), eval_all=args.eval_all,
    )
    metrics.update({"n": H.n, "m": H.m, "config": _resolved(args)})
    text = json.dumps(metrics, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    print(text, end="")
    return 0


def cmd_interp1d(args) -> int:
    cfg = SolverConfig(tol=args.tol, max_iter=args.max_iter, trace_every=args.trace_every)
    res = run_interp1d(args.n, args.labeled, args.k, args.methods, args.seed, args.out, cfg, args.parallel_grid)
    for r in res["runs"]:
        print(f"{r['method']:>6} k={r['k']:<4d} iters={r['iterations']:<8d} seconds={r['seconds']:.3f} spike={r['spike']:.4f}")
    return 0


def cmd_knn(args) -> int:
    P = io.load_points(args.points)
    H = knn_graph(P, args.k) if args.kind == "graph" else knn_hypergraph(P, args.k)
    io.write_hypergraph(H, args.out)
    print(f"wrote {args.out}: n={H.n} m={H.m}")
    return 0


def cmd_verify(args) -> int:
    H = io.load_hypergraph(args.hypergraph)
    L = io.load_labels(args.labels)
    res = verify_instance(H, L, args.p, args.seeds, args.iters, args.eps, args.tol)
    text = json.dumps(res, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    print(text, end="")
    return 0 if res["proposition_D"] and res["lemma_maxmin"] else 1


def cmd_bench(args) -> int:
    if args.hypergraph:
        if not args.labels:
            raise SystemExit("--labels is required with --hypergraph")
        H, L = io.load_hypergraph(args.hypergraph), io.load_labels(args.labels)
    else:
        x, L = interp1d_instance(args.n, args.labeled, args.seed, connect_k=args.k)
        H = knn_hypergraph(x, args.k)
    cfg = SolverConfig(p=args.p, tol=args.tol, max_iter=args.max_iter)
    res = bench(H, L, args.methods, cfg=cfg, stride=args.stride, out_dir=args.out)
    summary = {
        m: {"iterations": r["iterations"], "time_to_1e-3": time_to_error(r["trajectory"], 1e-3), "final_error": r["trajectory"][-1][2]}
        for m, r in res.items()
    }
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "metrics.json").write_text(json.dumps(summary, indent=2) + "\n")
    write_manifest(out, _resolved(args))
    print(json.dumps(summary, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hyplap", description="Hypergraph p-Laplacian interpolation and classification")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="interpolate labels on a hypergraph file")
    p.add_argument("--hypergraph", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--out", required=True, help="output directory")
    _solver_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("ssl", help="one-vs-rest classification trials")
    p.add_argument("--dataset", required=True, help="categorical CSV (with header) or hypergraph file")
    p.add_argument("--label-column")
    p.add_argument("--labels", help="'vertex class' lines for hypergraph datasets")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--train-size", type=int)
    g.add_argument("--train-rate", type=float)
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--eval-all", action="store_true", help="measure error on all vertices instead of V \\ L")
    p.add_argument("--dump-hypergraph")
    p.add_argument("--out")
    _solver_flags(p, tol=1e-4)
    p.set_defaults(func=cmd_ssl)

    p = sub.add_parser("interp1d", help="1D interpolation on k-NN graphs and hypergraphs")
    p.add_argument("--n", type=int, default=1280)
    p.add_argument("--labeled", type=int, default=6)
    p.add_argument("--k", type=int, nargs="+", default=[9, 18, 36, 72])
    p.add_argument("--methods", nargs="+", default=["fce", "ae-p2"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=1_000_000)
    p.add_argument("--trace-every", type=int, default=10)
    p.add_argument("--parallel-grid", action="store_true", help="run grid points concurrently")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_interp1d)

    p = sub.add_parser("knn", help="build a k-NN graph or hypergraph from a point file")
    p.add_argument("--points", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--kind", choices=("graph", "hypergraph"), default="hypergraph")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_knn)

    p = sub.add_parser("verify", help="oracle checks of pinned vertices and extrema uniqueness")
    p.add_argument("--hypergraph", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    p.add_argument("--iters", type=int, default=1_000_000)
    p.add_argument("--eps", type=float, default=1e-3)
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="wall time versus relative l2 error")
    p.add_argument("--hypergraph")
    p.add_argument("--labels")
    p.add_argument("--n", type=int, default=1280)
    p.add_argument("--labeled", type=int, default=6)
    p.add_argument("--k", type=int, default=72)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--methods", nargs="+", default=["ae-p2", "fce"])
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=100_000)
    p.add_argument("--stride", type=int, default=10)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
