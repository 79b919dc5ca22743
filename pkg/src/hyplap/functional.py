"""Regularizers F_G, F_CE, F_H and subgradient certificates for F_H.

A certificate selects, for every hyperedge on which ``u`` is not constant, a
convex combination of the differences ``1_i - 1_j`` over pairs with ``i``
maximizing and ``j`` minimizing ``u`` on that hyperedge. Such a selection
produces a subgradient of F_H at ``u``; when that subgradient vanishes on
the unlabeled vertices, ``u`` minimizes F_H under the label constraints.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np
from scipy.optimize import nnls

from . import kernels
from .hgraph import Hypergraph, HypergraphError

FACE_TOL = 1e-9


class CertificateError(ValueError):
    """Certificate does not match the argmax/argmin faces of ``u``."""


class ScaleError(ValueError):
    """Problem exceeds the desk-scale guard of an exhaustive routine."""


def check_p(p: float) -> float:
    p = float(p)
    if not p > 1.0:
        raise ValueError(f"exponent p must be > 1, got {p}")
    return p


def _vec(H: Hypergraph, u) -> np.ndarray:
    u = np.ascontiguousarray(u, dtype=np.float64)
    if u.shape != (H.n,):
        raise ValueError(f"vertex function must have length {H.n}, got shape {u.shape}")
    if not np.all(np.isfinite(u)):
        raise ValueError("vertex function has non-finite entries")
    return u


@dataclass(frozen=True)
class Labeling:
    """Labeled vertex ids and their prescribed values."""

    vertices: np.ndarray
    values: np.ndarray

    def __init__(self, pairs: Mapping[int, float] | Iterable[tuple[int, float]]):
        items = list(pairs.items()) if isinstance(pairs, Mapping) else list(pairs)
        if not items:
            raise ValueError("a labeling needs at least one labeled vertex")
        vs = np.array([int(i) for i, _ in items], dtype=np.int64)
        ys = np.array([float(y) for _, y in items], dtype=np.float64)
        if len(np.unique(vs)) != len(vs):
            raise ValueError("labeled vertex ids must be distinct")
        if np.any(vs < 0):
            raise ValueError("labeled vertex ids must be nonnegative")
        if not np.all(np.isfinite(ys)):
            raise ValueError("label values must be finite")
        order = np.argsort(vs)
        object.__setattr__(self, "vertices", vs[order])
        object.__setattr__(self, "values", ys[order])

    def __len__(self) -> int:
        return len(self.vertices)

    def check(self, n: int) -> None:
        if self.vertices[-1] >= n:
            raise ValueError(f"labeled vertex id {self.vertices[-1]} out of range [0, {n})")

    def mask(self, n: int) -> np.ndarray:
        self.check(n)
        out = np.zeros(n, dtype=bool)
        out[self.vertices] = True
        return out

    def free(self, n: int) -> np.ndarray:
        """uint8 mask of unlabeled vertices, the layout the kernels expect."""
        return (~self.mask(n)).astype(np.uint8)

    def impose(self, u: np.ndarray) -> np.ndarray:
        u[self.vertices] = self.values
        return u

    @property
    def lo(self) -> float:
        return float(self.values.min())

    @property
    def hi(self) -> float:
        return float(self.values.max())

    def as_dict(self) -> dict[int, float]:
        return {int(i): float(y) for i, y in zip(self.vertices, self.values)}


@dataclass
class Certificate:
    """Per-hyperedge pair coefficients ``(max vertex, min vertex, coefficient)``.

    Hyperedges absent from ``pairs`` carry the zero selection, which is only
    admissible where ``u`` is constant on the hyperedge.
    """

    pairs: dict[int, list[tuple[int, int, float]]] = field(default_factory=dict)

    def beta(self, k: int, n: int) -> np.ndarray:
        b = np.zeros(n)
        for i, j, c in self.pairs.get(k, ()):
            b[i] += c
            b[j] -= c
        return b

    def to_json(self) -> str:
        return json.dumps(
            {str(k): [{"max": i, "min": j, "coefficient": c} for i, j, c in v] for k, v in sorted(self.pairs.items())},
            indent=1,
        )

    @classmethod
    def from_json(cls, text: str) -> "Certificate":
        raw = json.loads(text)
        return cls({int(k): [(int(d["max"]), int(d["min"]), float(d["coefficient"])) for d in v] for k, v in raw.items()})


def eval_FH(H: Hypergraph, u, p: float) -> float:
    """Sum over hyperedges of ``w_k (max_e u - min_e u)^p``."""
    p = check_p(p)
    return float(kernels.fh_value(_vec(H, u), p, H.edge_ptr, H.edge_idx, H.weights))


def eval_FCE(H: Hypergraph, u, p: float) -> float:
    """Sum over hyperedges of ``w_k`` times the p-th power differences of all
    unordered vertex pairs within the hyperedge (each pair counted once)."""
    p = check_p(p)
    u = _vec(H, u)
    total = 0.0
    for k in range(H.m):
        ue = u[H.edge(k)]
        a, b = np.triu_indices(len(ue), 1)
        total += H.weights[k] * float(np.sum(np.abs(ue[a] - ue[b]) ** p))
    return total


def eval_FG(G: Hypergraph, u, p: float) -> float:
    p = check_p(p)
    if not G.is_two_uniform():
        raise HypergraphError("F_G needs a 2-uniform hypergraph (a graph)")
    u = _vec(G, u)
    a = G.edge_idx[0::2]
    b = G.edge_idx[1::2]
    return float(np.sum(G.weights * np.abs(u[a] - u[b]) ** p))


def argmax_face(H: Hypergraph, u, k: int, tol: float = FACE_TOL) -> tuple[tuple[int, ...], tuple[int, ...], bool]:
    """Vertices of hyperedge ``k`` within ``tol`` of its max and of its min.

    The flag is set when the hyperedge range is at most ``tol``; every
    element of B_k then maximizes ``<b, u>`` to within ``tol``.
    """
    u = np.asarray(u, dtype=np.float64)
    e = H.edge(k)
    ue = u[e]
    hi, lo = ue.max(), ue.min()
    top = tuple(int(v) for v in e[ue >= hi - tol])
    bot = tuple(int(v) for v in e[ue <= lo + tol])
    return top, bot, bool(hi - lo <= tol)


def _edge_coefficients(H: Hypergraph, u: np.ndarray, p: float) -> np.ndarray:
    emax, emin = kernels.edge_extrema(u, H.edge_ptr, H.edge_idx)
    return p * H.weights * (emax - emin) ** (p - 1.0)


def subgradient_from_certificate(H: Hypergraph, u, p: float, C: Certificate, tol: float = FACE_TOL) -> np.ndarray:
    """Assemble ``q = p sum_k w_k range_k^(p-1) beta_k`` after checking ``C``."""
    p = check_p(p)
    u = _vec(H, u)
    for k in C.pairs:
        if not 0 <= k < H.m:
            raise CertificateError(f"certificate refers to unknown hyperedge {k}")
    coef = _edge_coefficients(H, u, p)
    q = np.zeros(H.n)
    for k in range(H.m):
        top, bot, degenerate = argmax_face(H, u, k, tol)
        entries = C.pairs.get(k, [])
        if degenerate:
            continue
        if not entries:
            raise CertificateError(f"hyperedge {k} is not constant on u but has no selection")
        total = 0.0
        for i, j, c in entries:
            if i not in top or j not in bot:
                raise CertificateError(f"hyperedge {k}: pair ({i}, {j}) is not an (argmax, argmin) pair")
            if c < -tol:
                raise CertificateError(f"hyperedge {k}: negative coefficient {c}")
            total += c
        if abs(total - 1.0) > max(tol, 1e-12):
            raise CertificateError(f"hyperedge {k}: coefficients sum to {total}, not 1")
        for i, j, c in entries:
            q[i] += coef[k] * c
            q[j] -= coef[k] * c
    return q


def _check_labels(u: np.ndarray, L: Labeling, tol: float) -> None:
    L.check(len(u))
    if np.max(np.abs(u[L.vertices] - L.values)) > tol:
        raise ValueError("u does not match the labeling on the labeled vertices")


def verify_stationarity(H: Hypergraph, u, p: float, L: Labeling, C: Certificate, tol: float = FACE_TOL) -> float:
    """Sup-norm of the certified subgradient over unlabeled vertices."""
    u = _vec(H, u)
    _check_labels(u, L, tol)
    q = subgradient_from_certificate(H, u, p, C, tol)
    free = ~L.mask(H.n)
    return float(np.max(np.abs(q[free]))) if free.any() else 0.0


def find_certificate(
    H: Hypergraph,
    u,
    p: float,
    L: Labeling,
    tol: float = FACE_TOL,
    face_tol: float | None = None,
    max_pairs: int = 2000,
) -> Certificate | None:
    """Search for a certificate that makes the subgradient vanish off the labels.

    Solves a nonnegative least-squares problem over the face pair
    coefficients, renormalizes each hyperedge's coefficients and returns the
    certificate if its residual is at most ``tol``; returns ``None`` otherwise.
    """
    p = check_p(p)
    u = _vec(H, u)
    face_tol = tol if face_tol is None else face_tol
    _check_labels(u, L, max(tol, face_tol))
    free = ~L.mask(H.n)
    coef = _edge_coefficients(H, u, p)

    cert = Certificate()
    columns: list[tuple[int, int, int]] = []
    for k in range(H.m):
        top, bot, degenerate = argmax_face(H, u, k, face_tol)
        if degenerate:
            continue
        pairs = [(i, j) for i in top for j in bot]
        if not any(free[i] or free[j] for i, j in pairs):
            cert.pairs[k] = [(i, j, 1.0 / len(pairs)) for i, j in pairs]
            continue
        columns.extend((k, i, j) for i, j in pairs)
        if len(columns) > max_pairs:
            raise ScaleError(f"more than {max_pairs} face pairs; certificate search is desk-scale only")

    if columns:
        edges = sorted({k for k, _, _ in columns})
        row_of_vertex = {v: r for r, v in enumerate(np.flatnonzero(free))}
        row_of_edge = {k: len(row_of_vertex) + r for r, k in enumerate(edges)}
        scale = max(float(coef[edges].max()), 1e-300)
        A = np.zeros((len(row_of_vertex) + len(edges), len(columns)))
        b = np.zeros(A.shape[0])
        for c, (k, i, j) in enumerate(columns):
            ck = coef[k] / scale
            if free[i]:
                A[row_of_vertex[i], c] += ck
            if free[j]:
                A[row_of_vertex[j], c] -= ck
            A[row_of_edge[k], c] = 1.0
        b[len(row_of_vertex):] = 1.0
        lam, _ = nnls(A, b, maxiter=50 * A.shape[1] + 100)
        for k in edges:
            idx = [c for c, col in enumerate(columns) if col[0] == k]
            s = lam[idx].sum()
            vals = lam[idx] / s if s > 0 else np.full(len(idx), 1.0 / len(idx))
            cert.pairs[k] = [(columns[c][1], columns[c][2], float(v)) for c, v in zip(idx, vals) if v > 0.0]

    residual = verify_stationarity(H, u, p, L, cert, tol=max(tol, face_tol))
    return cert if residual <= tol else None
