"""Sparse hypergraph model and the standard construction recipes.

A :class:`Hypergraph` stores its hyperedges in CSR form (``edge_ptr``,
``edge_idx``) together with the transposed incidence structure
(``inc_ptr``, ``inc_edge``), so that per-hyperedge reductions and per-vertex
accumulations are both contiguous scans.
"""
from __future__ import annotations

from collections import deque
from math import comb
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial import cKDTree


class HypergraphError(ValueError):
    """Raised when hypergraph input data violates a structural invariant."""


class Hypergraph:
    """Weighted hypergraph on vertices ``0..n-1``.

    Parameters
    ----------
    n : int
        Number of vertices.
    raw_edges : iterable of (weight, vertices)
        Each hyperedge is given as a positive weight and a collection of
        vertex ids. Repeated ids inside one hyperedge are collapsed.

    Notes
    -----
    Instances are immutable: all array attributes are marked read-only.
    """

    __slots__ = ("n", "weights", "edge_ptr", "edge_idx", "inc_ptr", "inc_edge", "inc_vertex")

    def __init__(self, n: int, raw_edges: Iterable[tuple[float, Iterable[int]]] = ()):
        n = int(n)
        if n < 1:
            raise HypergraphError(f"vertex count must be positive, got {n}")
        weights: list[float] = []
        members: list[np.ndarray] = []
        for k, (w, verts) in enumerate(raw_edges):
            w = float(w)
            if not np.isfinite(w) or w <= 0.0:
                raise HypergraphError(f"hyperedge {k}: weight must be positive, got {w}")
            vs = np.unique(np.asarray(list(verts), dtype=np.int64))
            if vs.size and (vs[0] < 0 or vs[-1] >= n):
                raise HypergraphError(f"hyperedge {k}: vertex id out of range [0, {n})")
            if vs.size < 2:
                raise HypergraphError(f"hyperedge {k}: needs at least 2 distinct vertices")
            weights.append(w)
            members.append(vs)
        self._build(n, np.asarray(weights, dtype=np.float64), members)

    @classmethod
    def from_csr(cls, n: int, weights: np.ndarray, edge_ptr: np.ndarray, edge_idx: np.ndarray) -> "Hypergraph":
        """Build from CSR arrays; each row must already be strictly sorted."""
        edge_ptr = np.asarray(edge_ptr, dtype=np.int64)
        edge_idx = np.asarray(edge_idx, dtype=np.int64)
        members = [edge_idx[edge_ptr[k]:edge_ptr[k + 1]] for k in range(len(edge_ptr) - 1)]
        return cls(n, zip(np.asarray(weights, dtype=np.float64), members))

    def _build(self, n: int, weights: np.ndarray, members: list[np.ndarray]) -> None:
        sizes = np.fromiter((len(e) for e in members), dtype=np.int64, count=len(members))
        edge_ptr = np.zeros(len(members) + 1, dtype=np.int64)
        np.cumsum(sizes, out=edge_ptr[1:])
        edge_idx = np.concatenate(members) if members else np.zeros(0, dtype=np.int64)

        # Transpose: stable sort by vertex keeps hyperedge ids ascending per vertex.
        edge_of_entry = np.repeat(np.arange(len(members), dtype=np.int64), sizes)
        order = np.argsort(edge_idx, kind="stable")
        inc_edge = edge_of_entry[order]
        inc_vertex = edge_idx[order]
        inc_ptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(edge_idx, minlength=n), out=inc_ptr[1:])

        for arr in (weights, edge_ptr, edge_idx, inc_ptr, inc_edge, inc_vertex):
            arr.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "edge_ptr", edge_ptr)
        object.__setattr__(self, "edge_idx", edge_idx)
        object.__setattr__(self, "inc_ptr", inc_ptr)
        object.__setattr__(self, "inc_edge", inc_edge)
        object.__setattr__(self, "inc_vertex", inc_vertex)

    def __setattr__(self, name, value):
        raise AttributeError("Hypergraph is immutable")

    @property
    def m(self) -> int:
        return len(self.weights)

    def edge(self, k: int) -> np.ndarray:
        return self.edge_idx[self.edge_ptr[k]:self.edge_ptr[k + 1]]

    def incident(self, i: int) -> np.ndarray:
        return self.inc_edge[self.inc_ptr[i]:self.inc_ptr[i + 1]]

    @property
    def edges(self) -> list[tuple[float, tuple[int, ...]]]:
        return [(float(self.weights[k]), tuple(int(v) for v in self.edge(k))) for k in range(self.m)]

    @property
    def edge_sizes(self) -> np.ndarray:
        return np.diff(self.edge_ptr)

    def degree(self) -> np.ndarray:
        """Weighted degree ``sum_k w_k chi_k(x_i)`` of every vertex."""
        return np.bincount(self.inc_vertex, weights=self.weights[self.inc_edge], minlength=self.n)

    def is_two_uniform(self) -> bool:
        return bool(np.all(self.edge_sizes == 2))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.weights, other.weights)
            and np.array_equal(self.edge_ptr, other.edge_ptr)
            and np.array_equal(self.edge_idx, other.edge_idx)
        )

    def __repr__(self) -> str:
        return f"Hypergraph(n={self.n}, m={self.m})"


def new_hypergraph(n: int, raw_edges: Iterable[tuple[float, Iterable[int]]]) -> Hypergraph:
    return Hypergraph(n, raw_edges)


def is_connected(H: Hypergraph) -> bool:
    """Breadth-first search over the vertex/hyperedge incidence structure."""
    seen_v = np.zeros(H.n, dtype=bool)
    seen_e = np.zeros(H.m, dtype=bool)
    seen_v[0] = True
    queue = deque([0])
    count = 1
    while queue:
        i = queue.popleft()
        for k in H.incident(i):
            if seen_e[k]:
                continue
            seen_e[k] = True
            for j in H.edge(k):
                if not seen_v[j]:
                    seen_v[j] = True
                    count += 1
                    queue.append(int(j))
    return count == H.n


def clique_expansion(H: Hypergraph) -> Hypergraph:
    """Replace each hyperedge by a clique with pair weight ``w_k / C(|e_k|, 2)``.

    Parallel pairs coming from different hyperedges are merged by summing.
    """
    acc: dict[tuple[int, int], float] = {}
    for k in range(H.m):
        e = H.edge(k)
        pw = H.weights[k] / comb(len(e), 2)
        for a in range(len(e)):
            for b in range(a + 1, len(e)):
                key = (int(e[a]), int(e[b]))
                acc[key] = acc.get(key, 0.0) + pw
    return Hypergraph(H.n, ((w, pair) for pair, w in sorted(acc.items())))


def _as_points(points) -> np.ndarray:
    P = np.asarray(points, dtype=np.float64)
    if P.ndim == 1:
        P = P[:, None]
    if P.ndim != 2 or P.shape[0] < 2:
        raise HypergraphError("need at least 2 points")
    if not np.all(np.isfinite(P)):
        raise HypergraphError("point coordinates must be finite")
    return P


def knn_indices(points, k: int) -> np.ndarray:
    """Indices of the ``k`` nearest neighbours of every point (self excluded).

    Distance ties are broken toward the smaller vertex id.
    """
    P = _as_points(points)
    n = P.shape[0]
    if not 1 <= k < n:
        raise HypergraphError(f"k must satisfy 1 <= k < n (k={k}, n={n})")
    tree = cKDTree(P)
    # Over-fetch so that ties at the k-th distance can be resolved by id.
    fetch = min(n, k + 1 + max(4, k // 4))
    while True:
        dist, idx = tree.query(P, k=fetch)
        dist = np.atleast_2d(dist)
        idx = np.atleast_2d(idx)
        out = np.empty((n, k), dtype=np.int64)
        complete = True
        for i in range(n):
            mask = idx[i] != i
            d, j = dist[i][mask], idx[i][mask]
            order = np.lexsort((j, d))
            d, j = d[order], j[order]
            # The candidate list is exhaustive unless its last distance
            # equals the k-th distance (more tied points may be unseen).
            if fetch < n and len(d) > k and d[k - 1] == d[-1]:
                complete = False
                break
            if len(j) < k:
                complete = False
                break
            out[i] = j[:k]
        if complete:
            return out
        fetch = min(n, 2 * fetch)


def knn_graph(points, k: int) -> Hypergraph:
    """Symmetric k-NN graph with unit weights, as a 2-uniform hypergraph."""
    nbrs = knn_indices(points, k)
    n = nbrs.shape[0]
    rows = np.repeat(np.arange(n, dtype=np.int64), k)
    cols = nbrs.ravel()
    lo, hi = np.minimum(rows, cols), np.maximum(rows, cols)
    pairs = np.unique(np.stack([lo, hi], axis=1), axis=0)
    return Hypergraph(n, ((1.0, (int(a), int(b))) for a, b in pairs))


def knn_hypergraph(points, k: int) -> Hypergraph:
    """One unit-weight hyperedge per vertex: the vertex plus its k nearest neighbours."""
    nbrs = knn_indices(points, k)
    n = nbrs.shape[0]
    return Hypergraph(n, ((1.0, [i, *nbrs[i].tolist()]) for i in range(n)))


MISSING_TOKENS = frozenset({"", "?", "NA", "NaN", "nan"})


def categorical_hypergraph(rows: Sequence[Sequence[str]], missing: frozenset[str] = MISSING_TOKENS) -> Hypergraph:
    """Hypergraph with one hyperedge per (feature, category) pair.

    Hyperedges with fewer than 2 members are dropped and exact duplicates
    are kept once. Cells holding a ``missing`` token join no hyperedge.
    """
    n = len(rows)
    if n == 0:
        raise HypergraphError("empty categorical table")
    width = len(rows[0])
    if width == 0 or any(len(r) != width for r in rows):
        raise HypergraphError("categorical table must be rectangular and nonempty")
    seen: set[tuple[int, ...]] = set()
    edges: list[tuple[float, tuple[int, ...]]] = []
    for col in range(width):
        groups: dict[str, list[int]] = {}
        for i, row in enumerate(rows):
            token = str(row[col]).strip()
            if token in missing:
                continue
            groups.setdefault(token, []).append(i)
        for members in groups.values():
            key = tuple(members)
            if len(key) < 2 or key in seen:
                continue
            seen.add(key)
            edges.append((1.0, key))
    return Hypergraph(n, edges)
