"""Iterative solvers for label interpolation on hypergraphs.

``solve_AE_p2``
    Step-free Jacobi scheme for the hypergraph Laplace equation (p = 2):
    every unlabeled vertex moves to the weighted mean of the midranges
    ``(max + min) / 2`` of its hyperedges.
``solve_AE``
    Explicit fixed-point iteration ``u += tau * L_p u`` for general p.
``solve_FCE_gd``
    Explicit gradient descent for the clique-expansion functional.
``solve_FH_subgrad``
    Normalized subgradient descent for the max-range functional with
    best-iterate tracking.

All sweeps are Jacobi updates: hyperedge extrema are computed from the
previous iterate before any vertex moves.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import kernels
from .functional import Labeling, check_p
from .hgraph import Hypergraph, is_connected

log = logging.getLogger(__name__)

INIT_MODES = ("min", "max", "zero", "given")
SCHEMES = ("explicit", "jacobi")
STOP_RULES = ("delta", "error")


class DisconnectedError(ValueError):
    """The solvers need a connected hypergraph."""


@dataclass
class SolverConfig:
    p: float = 2.0
    tau: float | None = None
    tol: float = 1e-8
    max_iter: int = 100_000
    init: str = "min"
    u0: np.ndarray | None = None
    seed: int = 0
    trace_every: int = 0
    face_tol: float = 1e-12
    patience: int = 500
    scheme: str = "explicit"
    stop: str = "delta"

    def __post_init__(self):
        check_p(self.p)
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.tau is not None and not self.tau > 0:
            raise ValueError("tau must be positive")
        mode = {"min-label": "min", "max-label": "max"}.get(self.init, self.init)
        if mode not in INIT_MODES:
            raise ValueError(f"init must be one of {INIT_MODES}, got {self.init!r}")
        self.init = mode
        if self.stop not in STOP_RULES:
            raise ValueError(f"stop must be one of {STOP_RULES}, got {self.stop!r}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if mode == "given" and self.u0 is None:
            raise ValueError("init='given' needs u0")


@dataclass
class SolverReport:
    method: str
    iterations: int = 0
    delta: float = float("nan")
    residual: float = float("nan")
    seconds: float = 0.0
    converged: bool = False
    tau: float | None = None
    objective: float | None = None
    trace: list[tuple[int, float, float]] = field(default_factory=list)
    objective_trace: list[tuple[int, float]] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "method": self.method,
            "iterations": self.iterations,
            "delta": self.delta,
            "residual": self.residual,
            "seconds": self.seconds,
            "converged": self.converged,
            "tau": self.tau,
            "objective": self.objective,
            "notes": list(self.notes),
        }


Callback = Callable[[int, np.ndarray], None]


def monotone_init(L: Labeling, mode: str, n: int) -> np.ndarray:
    """Labels on L, and min (or max) label value everywhere else."""
    if mode in ("min", "min-label"):
        fill = L.lo
    elif mode in ("max", "max-label"):
        fill = L.hi
    else:
        raise ValueError(f"mode must be 'min' or 'max', got {mode!r}")
    return L.impose(np.full(n, fill))


def initial_guess(L: Labeling, cfg: SolverConfig, n: int) -> np.ndarray:
    if cfg.init in ("min", "max"):
        return monotone_init(L, cfg.init, n)
    if cfg.init == "zero":
        return L.impose(np.zeros(n))
    u0 = np.array(cfg.u0, dtype=np.float64)
    if u0.shape != (n,):
        raise ValueError(f"u0 must have length {n}")
    return L.impose(u0)


def _prepare(H: Hypergraph, L: Labeling, cfg: SolverConfig):
    L.check(H.n)
    if not is_connected(H):
        raise DisconnectedError("hypergraph is not connected; the solution is not unique")
    free = L.free(H.n)
    u = np.ascontiguousarray(initial_guess(L, cfg, H.n))
    return u, free


def _trivial(method: str, u: np.ndarray):
    rep = SolverReport(method, iterations=0, delta=0.0, residual=0.0, converged=True)
    rep.notes.append("no unlabeled vertices")
    return u, rep


def _stop(delta: float, prev: float, cfg: SolverConfig, scale: float = 1.0) -> bool:
    """Stopping test. ``'delta'``: update sup-norm at most ``tol``.

    ``'error'`` also asks the geometric tail ``delta * rho / (1 - rho)``,
    with ``rho`` the ratio of successive updates, to be at most ``tol``;
    this bounds the distance to the fixed point once the iteration
    contracts at a steady rate.
    """
    tol = cfg.tol * scale
    if delta > tol:
        return False
    if cfg.stop == "delta" or delta == 0.0:
        return True
    rho = delta / prev if prev > 0.0 else 1.0
    return rho < 1.0 and delta * rho / (1.0 - rho) <= tol


def _sup(r: np.ndarray, free: np.ndarray) -> float:
    fm = free.astype(bool)
    return float(np.max(np.abs(r[fm]))) if fm.any() else 0.0


def residual_AE(H: Hypergraph, u, p: float, L: Labeling) -> np.ndarray:
    """``L_p u`` at unlabeled vertices, 0 at labeled ones."""
    p = check_p(p)
    u = np.ascontiguousarray(u, dtype=np.float64)
    return kernels.ae_residual(u, p, H.edge_ptr, H.edge_idx, H.inc_ptr, H.inc_edge, H.inc_vertex, H.weights, L.free(H.n))


def _ae_res_sup(H, u, p, free):
    r = kernels.ae_residual(u, p, H.edge_ptr, H.edge_idx, H.inc_ptr, H.inc_edge, H.inc_vertex, H.weights, free)
    return _sup(r, free)


def _fce_res_sup(H, u, p, free):
    r = kernels.fce_residual(u, p, H.edge_ptr, H.edge_idx, H.inc_ptr, H.inc_edge, H.inc_vertex, H.weights, free)
    return _sup(r, free)


def _clamp(u_new: np.ndarray, u_old: np.ndarray, init: str) -> None:
    """Keep min/max-initialized Jacobi iterates monotone in floating point.

    The exact iterates are monotone; rounding in the weighted averages can
    undo that by an ulp, so the update is clamped against the previous iterate.
    """
    if init == "min":
        np.maximum(u_new, u_old, out=u_new)
    elif init == "max":
        np.minimum(u_new, u_old, out=u_new)


def solve_AE_p2(H: Hypergraph, L: Labeling, cfg: SolverConfig | None = None, callback: Callback | None = None):
    """Solve the p = 2 equation with the step-free Jacobi scheme.

    With ``init='min'`` (``'max'``) the iterates increase (decrease)
    monotonically toward the solution and stay within the label range.

    Returns
    -------
    u : ndarray
    report : SolverReport
    """
    cfg = cfg or SolverConfig()
    if cfg.p != 2.0:
        raise ValueError("solve_AE_p2 is the p = 2 scheme; use solve_AE for other p")
    u, free = _prepare(H, L, cfg)
    if not free.any():
        return _trivial("ae-p2", u)
    rep = SolverReport("ae-p2")
    out = np.empty_like(u)
    args = (H.edge_ptr, H.edge_idx, H.inc_ptr, H.inc_edge, H.inc_vertex, H.weights, free)
    t0 = time.perf_counter()
    it = 0
    delta = 0.0
    prev = np.inf
    while it < cfg.max_iter:
        delta = kernels.ae_p2_sweep(u, out, *args)
        _clamp(out, u, cfg.init)
        u, out = out, u
        it += 1
        if callback is not None:
            callback(it, u)
        if cfg.trace_every and it % cfg.trace_every == 0:
            rep.trace.append((it, delta, _ae_res_sup(H, u, 2.0, free)))
        if _stop(delta, prev, cfg):
            rep.converged = True
            break
        prev = delta
    rep.seconds = time.perf_counter() - t0
    rep.iterations, rep.delta = it, delta
    rep.residual = _ae_res_sup(H, u, 2.0, free)
    if not rep.converged:
        rep.notes.append(f"max_iter={cfg.max_iter} reached before delta <= tol")
    return u, rep


def default_tau(H: Hypergraph, u0: np.ndarray, p: float, tol: float, method: str = "ae") -> float:
    """Scale-aware explicit step size.

    For ``p >= 2`` the step keeps the update order preserving, given that
    all iterates stay within the range of ``u0``; for ``p < 2`` it is a
    conservative start that divergence control may shrink further.
    """
    spread = max(float(u0.max() - u0.min()), tol)
    if method == "fce":
        deg = np.bincount(H.inc_vertex, weights=(H.weights * (H.edge_sizes - 1))[H.inc_edge], minlength=H.n)
        dmax = max(float(deg.max()), 1e-300)
        if p >= 2.0:
            return 0.9 / ((p - 1.0) * dmax * spread ** (p - 2.0))
        return 0.1 * spread ** (2.0 - p) / dmax
    dmax = max(float(H.degree().max()), 1e-300)
    if p >= 2.0:
        return 0.9 / (2.0 * (p - 1.0) * dmax * (2.0 * spread) ** (p - 2.0))
    return 0.1 * spread ** (2.0 - p) / dmax


def _explicit(H, L, cfg, callback, method, step, res_sup):
    u, free = _prepare(H, L, cfg)
    if not free.any():
        return _trivial(method, u)
    p = float(cfg.p)
    tau = cfg.tau if cfg.tau is not None else default_tau(H, u, p, cfg.tol, method)
    tau0 = tau
    rep = SolverReport(method)
    out = np.empty_like(u)
    args = (H.edge_ptr, H.edge_idx, H.inc_ptr, H.inc_edge, H.inc_vertex, H.weights, free)
    best_delta, best_u, best_it = np.inf, u.copy(), 0
    t0 = time.perf_counter()
    it = 0
    delta = prev = np.inf
    while it < cfg.max_iter:
        delta = step(u, out, tau, p, *args)
        it += 1
        if not np.isfinite(delta) or delta > 10.0 * best_delta:
            tau *= 0.5
            u[:] = best_u
            rep.notes.append(f"iteration {it}: divergence detected, tau halved to {tau:.3e}")
            best_delta, best_it, prev = np.inf, it, np.inf
            continue
        u, out = out, u
        if delta < best_delta:
            best_delta, best_u[:], best_it = delta, u, it
        elif it - best_it > cfg.patience:
            tau *= 0.5
            rep.notes.append(f"iteration {it}: stagnation, tau halved to {tau:.3e}")
            best_delta, best_it, prev = delta, it, np.inf
        if callback is not None:
            callback(it, u)
        if cfg.trace_every and it % cfg.trace_every == 0:
            rep.trace.append((it, float(delta), res_sup(H, u, p, free)))
        # Halving tau shrinks every update; scale the threshold with it.
        if _stop(delta, prev, cfg, tau / tau0):
            # A rounded-away update can look small; confirm with the residual.
            if res_sup(H, u, p, free) * tau0 <= 2.0 * cfg.tol:
                rep.converged = True
                break
            if delta == 0.0:
                rep.notes.append(f"iteration {it}: update underflow at tau={tau:.3e}; stalled before tol")
                break
        prev = delta
    rep.seconds = time.perf_counter() - t0
    rep.iterations, rep.delta, rep.tau = it, float(delta), tau
    rep.residual = res_sup(H, u, p, free)
    if not rep.converged and it >= cfg.max_iter:
        rep.notes.append(f"max_iter={cfg.max_iter} reached before delta <= tol")
    return u, rep


def _nonlinear_jacobi(H, L, cfg, callback):
    u, free = _prepare(H, L, cfg)
    if not free.any():
        return _trivial("ae", u)
    p = float(cfg.p)
    rep = SolverReport("ae")
    rep.notes.append("scheme=jacobi")
    out = np.empty_like(u)
    args = (H.edge_ptr, H.edge_idx, H.inc_ptr, H.inc_edge, H.inc_vertex, H.weights, free)
    t0 = time.perf_counter()
    it = 0
    delta = 0.0
    prev = np.inf
    while it < cfg.max_iter:
        delta = kernels.ae_jacobi_sweep(u, out, p, *args)
        _clamp(out, u, cfg.init)
        u, out = out, u
        it += 1
        if callback is not None:
            callback(it, u)
        if cfg.trace_every and it % cfg.trace_every == 0:
            rep.trace.append((it, delta, _ae_res_sup(H, u, p, free)))
        if _stop(delta, prev, cfg):
            rep.converged = True
            break
        prev = delta
    rep.seconds = time.perf_counter() - t0
    rep.iterations, rep.delta = it, delta
    rep.residual = _ae_res_sup(H, u, p, free)
    if not rep.converged:
        rep.notes.append(f"max_iter={cfg.max_iter} reached before delta <= tol")
    return u, rep


def solve_AE(H: Hypergraph, L: Labeling, cfg: SolverConfig | None = None, callback: Callback | None = None):
    """Solve the general-p equation on the unlabeled vertices.

    ``cfg.scheme='explicit'`` runs the fixed-point iteration
    ``u <- u + tau L_p u``. ``'jacobi'`` instead solves every vertex's
    scalar equation exactly (bisection) with its neighbours frozen at the
    previous sweep; it needs no step size, is monotone from the min- or
    max-label start and needs far fewer sweeps than the explicit step for
    p > 2. For p < 2 vertices sharing a value pin one another, so plateaus
    move slowly under either scheme; check ``report.converged``.
    """
    cfg = cfg or SolverConfig()
    if cfg.scheme == "jacobi":
        return _nonlinear_jacobi(H, L, cfg, callback)
    return _explicit(H, L, cfg, callback, "ae", kernels.ae_step, _ae_res_sup)


def solve_FCE_gd(H: Hypergraph, L: Labeling, cfg: SolverConfig | None = None, callback: Callback | None = None):
    """Gradient descent for the clique-expansion functional under label constraints.

    The update is ``u_i += tau * sum_k w_k sum_{j in e_k} phi(u_j - u_i)``
    with ``phi(s) = |s|^(p-2) s``, i.e. a negative gradient step.
    """
    return _explicit(H, L, cfg or SolverConfig(), callback, "fce", kernels.fce_step, _fce_res_sup)


def tau_schedule(t) -> float:
    """Diminishing step ``1 / (t + 1)^min(0.16 t / 1e5, 1)``."""
    return kernels.tau_schedule(t)


def solve_FH_subgrad(
    H: Hypergraph,
    L: Labeling,
    cfg: SolverConfig | None = None,
    iters: int | None = None,
    callback: Callback | None = None,
    chunk: int | None = None,
):
    """Subgradient descent on F_H under label constraints.

    Each step moves the unlabeled values by ``tau(t) * spread`` along the
    normalized negative subgradient, where ``spread`` is the label range.
    The iteration does not settle in general, so the iterate with the
    smallest F_H value seen so far is returned.
    """
    cfg = cfg or SolverConfig()
    iters = cfg.max_iter if iters is None else int(iters)
    u, free = _prepare(H, L, cfg)
    p = float(cfg.p)
    rep = SolverReport("fh")
    scale = L.hi - L.lo
    w = H.weights
    best_f = float(kernels.fh_value(u, p, H.edge_ptr, H.edge_idx, w))
    best_u = u.copy()
    t0 = time.perf_counter()
    if scale == 0.0 or not free.any():
        u[free.astype(bool)] = L.lo
        best_u, best_f = u, float(kernels.fh_value(u, p, H.edge_ptr, H.edge_idx, w))
        rep.converged = True
        rep.delta = rep.residual = 0.0
    else:
        step = chunk or cfg.trace_every or (1000 if callback is not None else iters)
        t = 0
        while t < iters:
            t1 = min(iters, t + step)
            best_f, rep.delta, rep.residual = kernels.fh_subgrad_run(
                u, best_u, best_f, free, p, scale, t, t1, cfg.face_tol, H.edge_ptr, H.edge_idx, w
            )
            t = t1
            if cfg.trace_every:
                rep.trace.append((t, float(rep.delta), float(rep.residual)))
                rep.objective_trace.append((t, float(best_f)))
            if callback is not None:
                callback(t, best_u)
            if rep.delta == 0.0:
                rep.converged = True
                rep.notes.append(f"zero subgradient at iteration {t}")
                break
        rep.iterations = t
    rep.seconds = time.perf_counter() - t0
    rep.objective = float(best_f)
    return best_u, rep


SOLVERS = {
    "ae": solve_AE,
    "ae-p2": solve_AE_p2,
    "fce": solve_FCE_gd,
    "fh": solve_FH_subgrad,
}


def solve(method: str, H: Hypergraph, L: Labeling, cfg: SolverConfig | None = None, callback: Callback | None = None):
    try:
        fn = SOLVERS[method]
    except KeyError:
        raise ValueError(f"unknown method {method!r}; choose from {sorted(SOLVERS)}") from None
    return fn(H, L, cfg, callback=callback)


def relative_l2_error(u, u_star) -> float:
    u = np.asarray(u, dtype=np.float64)
    u_star = np.asarray(u_star, dtype=np.float64)
    if u.shape != u_star.shape:
        raise ValueError("vectors must have equal length")
    ref = float(np.linalg.norm(u_star))
    if ref == 0.0:
        raise ValueError("reference solution has zero norm")
    return float(np.linalg.norm(u - u_star)) / ref
