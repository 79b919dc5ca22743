"""1D interpolation experiment, convergence benchmark and SVG output."""
from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Sequence

import numpy as np

from . import io
from .functional import Labeling
from .hgraph import Hypergraph, is_connected, knn_graph, knn_hypergraph, knn_indices
from .solver import SolverConfig, relative_l2_error, solve, solve_FH_subgrad

log = logging.getLogger(__name__)

METHODS_1D = ("fg", "fce", "fh", "ae", "ae-p2")

# Reference ("true") solutions: delta <= 1e-12 or 1e7 sweeps, whichever first.
REFERENCE_TOL = 1e-12
REFERENCE_MAX_ITER = 10_000_000


MAX_REDRAWS = 100


def _draw_points(rng, n: int, k: int | None) -> np.ndarray:
    # Small k can leave a gap that splits the k-NN graph; redraw until connected.
    for _ in range(MAX_REDRAWS):
        x = rng.uniform(0.0, 1.0, n)
        if k is None or is_connected(knn_graph(x, k)):
            return x
    raise RuntimeError(f"no connected {k}-NN graph on {n} points after {MAX_REDRAWS} draws")


def interp1d_instance(n: int, labeled, seed: int = 0, connect_k: int | None = None):
    """Uniform points on [0, 1] plus a labeling.

    ``labeled`` is either a count ``c`` or a list of ``(position, value)``.
    For a count, the labeled vertices are the sample points nearest to the
    evenly spaced positions ``(2j + 1) / (2c)`` and their values are drawn
    uniformly from [0, 1]. Explicit positions are prepended as extra points.
    With ``connect_k`` the points are redrawn until the ``connect_k``-NN
    graph is connected (then every larger k is connected too).
    """
    rng = np.random.default_rng(seed)
    if isinstance(labeled, (int, np.integer)):
        c = int(labeled)
        if not 1 <= c <= n:
            raise ValueError(f"labeled count must lie in [1, n], got {c}")
        x = _draw_points(rng, n, connect_k)
        targets = (2.0 * np.arange(c) + 1.0) / (2.0 * c)
        taken: list[int] = []
        for t in targets:
            order = np.argsort(np.abs(x - t), kind="stable")
            taken.append(int(next(i for i in order if i not in taken)))
        y = rng.uniform(0.0, 1.0, c)
        return x, Labeling(zip(taken, y.tolist()))
    pairs = [(float(a), float(b)) for a, b in labeled]
    if len(pairs) > n:
        raise ValueError("more labeled points than points")
    for _ in range(MAX_REDRAWS):
        x = np.concatenate([[a for a, _ in pairs], rng.uniform(0.0, 1.0, n - len(pairs))])
        if connect_k is None or is_connected(knn_graph(x, connect_k)):
            break
    else:
        raise RuntimeError(f"no connected {connect_k}-NN graph after {MAX_REDRAWS} draws")
    return x, Labeling((i, b) for i, (_, b) in enumerate(pairs))


def spike_score(points, u, L: Labeling, k: int) -> float:
    """Largest gap between a label and the median of ``u`` over its k nearest neighbours."""
    nbrs = knn_indices(points, k)
    u = np.asarray(u)
    return float(max(abs(y - np.median(u[nbrs[i]])) for i, y in zip(L.vertices, L.values)))


def build_1d(points, k: int, method: str) -> Hypergraph:
    return knn_graph(points, k) if method == "fg" else knn_hypergraph(points, k)


def _solver_method(method: str) -> str:
    # The graph functional is the 2-uniform case of the p = 2 hypergraph equation.
    return "ae-p2" if method == "fg" else method


def svg_plot(x, u, L: Labeling, title: str = "", width: int = 640, height: int = 360) -> str:
    """Scatter of ``(x_i, u_i)`` with the interpolant as a polyline; labels in red."""
    x = np.asarray(x, dtype=np.float64).ravel()
    u = np.asarray(u, dtype=np.float64)
    pad = 30.0
    x0, x1 = float(x.min()), float(x.max())
    y0, y1 = float(min(u.min(), L.lo)), float(max(u.max(), L.hi))
    sx = (width - 2 * pad) / ((x1 - x0) or 1.0)
    sy = (height - 2 * pad) / ((y1 - y0) or 1.0)

    def px(a, b):
        return f"{pad + (a - x0) * sx:.2f},{height - pad - (b - y0) * sy:.2f}"

    order = np.argsort(x, kind="stable")
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{pad}" y="18" font-family="sans-serif" font-size="13">{title}</text>',
        '<polyline fill="none" stroke="#1f77b4" stroke-width="1" points="' + " ".join(px(x[i], u[i]) for i in order) + '"/>',
    ]
    for i in order:
        a, b = px(x[i], u[i]).split(",")
        parts.append(f'<circle cx="{a}" cy="{b}" r="1.2" fill="#555"/>')
    for i, y in zip(L.vertices, L.values):
        a, b = px(x[i], y).split(",")
        parts.append(f'<circle cx="{a}" cy="{b}" r="5" fill="none" stroke="red" stroke-width="1.5"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_manifest(out: Path, config: dict) -> None:
    (out / "manifest.json").write_text(json.dumps(config, indent=2, sort_keys=True, default=str) + "\n")


def run_interp1d(
    n: int = 1280,
    labeled=6,
    ks: Sequence[int] = (9, 18, 36, 72),
    methods: Sequence[str] = ("fce", "ae-p2"),
    seed: int = 0,
    out_dir=None,
    cfg: SolverConfig | None = None,
    parallel: bool = False,
) -> dict:
    """Interpolate labels on k-NN graphs/hypergraphs of uniform 1D points.

    Writes one solution CSV, trace CSV and SVG per (method, k) when
    ``out_dir`` is given, and returns per-run metrics including spike scores.
    ``parallel`` runs grid points concurrently; timings are then not comparable.
    """
    cfg = cfg or SolverConfig(tol=1e-8, max_iter=1_000_000, trace_every=10)
    for k in ks:
        if not 1 <= int(k) < n:
            raise ValueError(f"k must satisfy 1 <= k < n, got k={k}, n={n}")
    for mth in methods:
        if mth not in METHODS_1D:
            raise ValueError(f"unknown method {mth!r}; choose from {METHODS_1D}")
    x, L = interp1d_instance(n, labeled, seed, connect_k=min(map(int, ks)))
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        io.write_points(x, out / "points.txt")
        io.write_labels(L, out / "labels.txt")

    def one(k: int, mth: str):
        H = build_1d(x, k, mth)
        u, rep = solve(_solver_method(mth), H, L, cfg)
        entry = {**rep.as_dict(), "method": mth, "k": k, "spike": spike_score(x, u, L, k)}
        return entry, u, rep

    grid = [(int(k), mth) for k in ks for mth in methods]
    if parallel:
        with ThreadPoolExecutor() as pool:
            results = list(pool.map(lambda km: one(*km), grid))
    else:
        results = [one(k, mth) for k, mth in grid]
    runs = []
    for (k, mth), (entry, u, rep) in zip(grid, results):
        runs.append(entry)
        if out is not None:
            stem = f"{mth}_k{k}"
            io.write_solution(u, out / f"solution_{stem}.csv")
            io.write_trace(rep.trace, out / f"trace_{stem}.csv")
            (out / f"{stem}.svg").write_text(svg_plot(x, u, L, f"{mth}, k={k}"))
    result = {"n": n, "seed": seed, "labels": L.as_dict(), "runs": runs}
    if out is not None:
        metrics = {"runs": runs}
        (out / "metrics.json").write_text(json.dumps(metrics, indent=2) + "\n")
        write_manifest(
            out,
            {
                "experiment": "interp1d",
                "n": n,
                "labeled": labeled if isinstance(labeled, (int, np.integer)) else list(labeled),
                "ks": list(map(int, ks)),
                "methods": list(methods),
                "seed": seed,
                "parallel": parallel,
                "solver": {k: v for k, v in vars(cfg).items() if k != "u0"},
            },
        )
    return result


def reference_solution(method: str, H: Hypergraph, L: Labeling, cfg: SolverConfig | None = None):
    """Run ``method`` to a tight tolerance to obtain its limit."""
    base = cfg or SolverConfig()
    if method == "fh":
        ref_cfg = SolverConfig(p=base.p, max_iter=base.max_iter, init=base.init, u0=base.u0)
    else:
        ref_cfg = SolverConfig(p=base.p, tau=base.tau, tol=REFERENCE_TOL, max_iter=REFERENCE_MAX_ITER, init=base.init, u0=base.u0)
    u, _ = solve(method, H, L, ref_cfg)
    return u


def bench(
    H: Hypergraph,
    L: Labeling,
    methods: Sequence[str] = ("ae-p2",),
    references: dict | None = None,
    cfg: SolverConfig | None = None,
    stride: int = 1,
    out_dir=None,
) -> dict:
    """Wall time versus relative l2 error to each method's reference solution.

    Timing excludes the error evaluation itself. Missing references are
    computed on the fly.
    """
    cfg = cfg or SolverConfig()
    references = dict(references or {})
    result = {}
    for mth in methods:
        if mth not in references:
            log.warning("no reference for %s; computing one", mth)
            references[mth] = reference_solution(mth, H, L, cfg)
        u_star = references[mth]
        rows: list[tuple[int, float, float]] = []
        paused = [0.0]
        t_start = time.perf_counter()

        def record(it, u):
            t = time.perf_counter()
            if it % stride == 0:
                rows.append((it, t - t_start - paused[0], relative_l2_error(u, u_star)))
            paused[0] += time.perf_counter() - t

        run_cfg = SolverConfig(**{**vars(cfg), "trace_every": 0})
        if mth == "fh":
            u, rep = solve_FH_subgrad(H, L, run_cfg, callback=record, chunk=stride)
        else:
            u, rep = solve(mth, H, L, run_cfg, callback=record)
        if not rows or rows[-1][0] != rep.iterations:
            rows.append((rep.iterations, time.perf_counter() - t_start - paused[0], relative_l2_error(u, u_star)))
        result[mth] = {"trajectory": rows, "iterations": rep.iterations, "converged": rep.converged}
        if out_dir is not None:
            out = Path(out_dir)
            out.mkdir(parents=True, exist_ok=True)
            with open(out / f"bench_{mth}.csv", "w", encoding="utf-8") as fh:
                fh.write("iter,seconds,rel_error\n")
                for it, s, e in rows:
                    fh.write(f"{it},{s!r},{e!r}\n")
    return result


def time_to_error(trajectory, target: float) -> float:
    """First wall time at which the relative error drops to ``target`` (inf if never)."""
    for _, s, e in trajectory:
        if e <= target:
            return s
    return float("inf")
