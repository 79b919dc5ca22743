"""Desk-scale ground truth for the constrained max-range functional.

Minimizers of F_H under label constraints are generally not unique. The
routines here approximate minimizers by long subgradient runs and then
probe which vertex values are pinned: a vertex is pinned when moving it by
``+eps`` or by ``-eps`` alone strictly increases F_H. The set of pinned
vertices, the per-hyperedge extrema and the pinned values should agree
between any two minimizers.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .functional import Labeling, ScaleError, check_p
from .hgraph import Hypergraph
from .solver import SolverConfig, solve_FH_subgrad

MAX_ORACLE_N = 50


@dataclass(frozen=True)
class DSet:
    """Pinned vertices of a minimizer.

    ``witnesses`` maps each unlabeled member to ``(k_max, k_min)``: a
    hyperedge on which it (nearly) attains the maximum and one on which it
    (nearly) attains the minimum. ``gaps`` holds the corresponding
    distances to the exact extremum.
    """

    members: frozenset[int]
    labeled: frozenset[int]
    witnesses: dict[int, tuple[int, int]] = field(default_factory=dict)
    gaps: dict[int, tuple[float, float]] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "D": sorted(self.members),
            "witnesses": {str(i): {"max_edge": a, "min_edge": b} for i, (a, b) in sorted(self.witnesses.items())},
        }


def _guard(H: Hypergraph, max_n: int) -> None:
    if H.n > max_n:
        raise ScaleError(f"oracle is desk-scale only (n={H.n} > {max_n})")


def minimize_FH_oracle(
    H: Hypergraph, L: Labeling, p: float = 2.0, iters: int = 1_000_000, seed: int = 0, max_n: int = MAX_ORACLE_N
) -> np.ndarray:
    """Approximate minimizer from a seeded random start in ``[min y, max y]``."""
    _guard(H, max_n)
    rng = np.random.default_rng(seed)
    u0 = rng.uniform(L.lo, L.hi, size=H.n)
    cfg = SolverConfig(p=p, init="given", u0=u0, max_iter=max(int(iters), 1))
    u, _ = solve_FH_subgrad(H, L, cfg)
    return u


def compute_D(H: Hypergraph, u, L: Labeling, p: float = 2.0, eps: float = 1e-3, noise: float = 1e-10) -> DSet:
    if not eps > 0:
        raise ValueError("eps must be positive")
    p = check_p(p)
    u = np.ascontiguousarray(u, dtype=np.float64)
    labeled = L.mask(H.n)

    def F(v):
        return kernels.fh_value(v, p, H.edge_ptr, H.edge_idx, H.weights)

    f0 = F(u)
    floor = noise * (1.0 + f0)
    emax, emin = kernels.edge_extrema(u, H.edge_ptr, H.edge_idx)
    members = set(int(i) for i in L.vertices)
    witnesses, gaps = {}, {}
    v = u.copy()
    for i in np.flatnonzero(~labeled):
        pinned = True
        for s in (eps, -eps):
            v[i] = u[i] + s
            if not F(v) - f0 > floor:
                pinned = False
        v[i] = u[i]
        if not pinned:
            continue
        members.add(int(i))
        inc = H.incident(i)
        if len(inc):
            gmax = emax[inc] - u[i]
            gmin = u[i] - emin[inc]
            a, b = int(np.argmin(gmax)), int(np.argmin(gmin))
            witnesses[int(i)] = (int(inc[a]), int(inc[b]))
            gaps[int(i)] = (float(gmax[a]), float(gmin[b]))
    return DSet(frozenset(members), frozenset(int(i) for i in L.vertices), witnesses, gaps)


def check_lemma_maxmin(H: Hypergraph, u1, u2, tol: float) -> bool:
    """Per-hyperedge maxima and minima of ``u1`` and ``u2`` agree within ``tol``."""
    a_max, a_min = kernels.edge_extrema(np.ascontiguousarray(u1, dtype=np.float64), H.edge_ptr, H.edge_idx)
    b_max, b_min = kernels.edge_extrema(np.ascontiguousarray(u2, dtype=np.float64), H.edge_ptr, H.edge_idx)
    return bool(np.all(np.abs(a_max - b_max) <= tol) and np.all(np.abs(a_min - b_min) <= tol))


def verify_instance(
    H: Hypergraph,
    L: Labeling,
    p: float = 2.0,
    seeds=(0, 1, 2),
    iters: int = 1_000_000,
    eps: float = 1e-3,
    tol: float = 1e-3,
    max_n: int = MAX_ORACLE_N,
) -> dict:
    """Run the oracle once per seed and compare the resulting minimizers."""
    _guard(H, max_n)
    seeds = list(seeds)
    if not seeds:
        raise ValueError("need at least one seed")
    runs = []
    for s in seeds:
        u = minimize_FH_oracle(H, L, p, iters, s, max_n)
        D = compute_D(H, u, L, p, eps)
        runs.append((s, u, D))
    _, u_ref, D_ref = runs[0]
    extrema_ok = all(check_lemma_maxmin(H, u_ref, u, tol) for _, u, _ in runs[1:])
    same_D = all(D.members == D_ref.members for _, _, D in runs[1:])
    idx = sorted(D_ref.members)
    values_ok = same_D and all(np.all(np.abs(u[idx] - u_ref[idx]) <= tol) for _, u, _ in runs[1:])
    witnesses_ok = all(
        set(D.witnesses) == set(D.members - D.labeled) and all(max(g) <= tol for g in D.gaps.values())
        for _, _, D in runs
    )
    return {
        "seeds": seeds,
        "objective": [float(kernels.fh_value(u, p, H.edge_ptr, H.edge_idx, H.weights)) for _, u, _ in runs],
        "minimizers": [u.tolist() for _, u, _ in runs],
        "D": [D.as_dict() for _, _, D in runs],
        "lemma_maxmin": bool(extrema_ok),
        "lemma_witnesses": bool(witnesses_ok),
        "proposition_D": bool(same_D and values_ok),
    }


def check_proposition_D(H: Hypergraph, L: Labeling, p: float = 2.0, seeds=(0, 1, 2), **kw) -> bool:
    """Pinned sets agree across oracle runs, and so do the pinned values."""
    return verify_instance(H, L, p, seeds, **kw)["proposition_D"]
