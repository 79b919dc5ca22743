"""Fixtures, random instance generators and independent oracles for the tests.

The oracles here deliberately avoid the package kernels: they use explicit
loops over hyperedges and dense linear algebra.
"""
from itertools import combinations

import numpy as np

from hyplap import Hypergraph, Labeling

H1_EDGES = [(1.0, (0, 1)), (1.0, (1, 2, 3)), (1.0, (3, 4)), (1.0, (3, 5))]
H2_EDGES = [(1.0, (0, 1)), (1.0, (1, 2, 3, 4)), (1.0, (3, 4, 5, 6))]


def h1():
    return Hypergraph(6, H1_EDGES)


def h2():
    return Hypergraph(7, H2_EDGES)


def h1_labels():
    return Labeling({0: 4.0, 2: 0.0, 4: 3.0, 5: 3.0})


def h2_labels():
    return Labeling({0: 0.0, 6: 3.0})


H1_MINIMIZER = np.array([4.0, 2.5, 0.0, 2.5, 3.0, 3.0])
H1_AE = np.array([4.0, 2.0, 0.0, 2.0, 3.0, 3.0])
H2_SOLUTION = np.array([0.0, 1.0, 1.5, 2.0, 2.0, 2.5, 3.0])


def random_connected(rng, n, m_extra=None, max_size=8, weighted=True):
    """Random connected hypergraph: a spanning chain of hyperedges plus extras."""
    order = rng.permutation(n)
    edges = []
    covered = [int(order[0])]
    pos = 1
    while pos < n:
        size = int(rng.integers(2, max_size + 1))
        fresh = [int(v) for v in order[pos:pos + size - 1]]
        pos += len(fresh)
        anchor = int(rng.choice(covered))
        edges.append((fresh, anchor))
        covered.extend(fresh)
    raw = []
    for fresh, anchor in edges:
        raw.append([anchor, *fresh])
    for _ in range(int(rng.integers(0, n + 1)) if m_extra is None else m_extra):
        size = int(rng.integers(2, min(max_size, n) + 1))
        raw.append(rng.choice(n, size=size, replace=False).tolist())
    w = rng.uniform(0.5, 2.0, len(raw)) if weighted else np.ones(len(raw))
    return Hypergraph(n, list(zip(w.tolist(), raw)))


def random_graph(rng, n, extra=None, weighted=True):
    """Random connected 2-uniform hypergraph (spanning tree plus extra edges)."""
    raw = [(int(rng.integers(0, i)), i) for i in range(1, n)]
    for _ in range(int(rng.integers(0, 2 * n)) if extra is None else extra):
        a, b = rng.choice(n, size=2, replace=False)
        raw.append((int(a), int(b)))
    w = rng.uniform(0.5, 2.0, len(raw)) if weighted else np.ones(len(raw))
    return Hypergraph(n, list(zip(w.tolist(), raw)))


def random_labels(rng, n, count=None, lo=-1.0, hi=1.0):
    count = int(rng.integers(1, max(2, n // 3) + 1)) if count is None else count
    idx = rng.choice(n, size=count, replace=False)
    return Labeling(zip(idx.tolist(), rng.uniform(lo, hi, count).tolist()))


def brute_FH(H, u, p):
    return sum(w * (max(u[i] for i in e) - min(u[i] for i in e)) ** p for w, e in H.edges)


def brute_FCE(H, u, p):
    return sum(w * sum(abs(u[i] - u[j]) ** p for i, j in combinations(e, 2)) for w, e in H.edges)


def brute_residual_p2(H, u, L):
    """Hypergraph Laplacian at p = 2, one vertex at a time."""
    r = np.zeros(H.n)
    labeled = set(L.vertices.tolist())
    for w, e in H.edges:
        hi = max(u[i] for i in e)
        lo = min(u[i] for i in e)
        for i in e:
            if i not in labeled:
                r[i] += w * (hi + lo - 2 * u[i])
    return r


def dense_dirichlet(n, pairs, L):
    """Solve the weighted graph-Laplacian Dirichlet problem directly.

    ``pairs`` is an iterable of ``(weight, i, j)``; parallel pairs add up.
    """
    A = np.zeros((n, n))
    for w, i, j in pairs:
        A[i, j] += w
        A[j, i] += w
    Lap = np.diag(A.sum(axis=1)) - A
    lab = L.vertices
    free = np.setdiff1d(np.arange(n), lab)
    u = np.zeros(n)
    u[lab] = L.values
    if len(free):
        u[free] = np.linalg.solve(Lap[np.ix_(free, free)], -Lap[np.ix_(free, lab)] @ L.values)
    return u


def graph_pairs(G):
    return [(w, e[0], e[1]) for w, e in G.edges]


def clique_pairs(H):
    """Pairs of the clique functional with unordered pairs counted once, weight w_k each."""
    return [(w, i, j) for w, e in H.edges for i, j in combinations(e, 2)]
