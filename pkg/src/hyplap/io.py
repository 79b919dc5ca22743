"""Plain-text file formats.

Hypergraph::

    # comment
    H <n> <m>
    E <weight> <v1> <v2> ...      (m lines, 0-based vertex ids)

Labels: one ``<vertex> <value>`` pair per line. Points: one whitespace
separated coordinate tuple per line. Solutions: CSV ``vertex,value``.
Traces: CSV ``iter,delta_sup,residual_sup``.
"""
from __future__ import annotations

import csv
from typing import Iterable

import numpy as np

from .functional import Labeling
from .hgraph import Hypergraph


class ParseError(ValueError):
    def __init__(self, path, lineno: int, msg: str):
        super().__init__(f"{path}:{lineno}: {msg}")
        self.path = path
        self.lineno = lineno


def _lines(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if line and not line.startswith("#"):
                yield lineno, line


def write_hypergraph(H: Hypergraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"H {H.n} {H.m}\n")
        for w, verts in H.edges:
            fh.write("E " + repr(w) + " " + " ".join(map(str, verts)) + "\n")


def load_hypergraph(path) -> Hypergraph:
    header = None
    edges = []
    for lineno, line in _lines(path):
        tok = line.split()
        if header is None:
            if tok[0] != "H" or len(tok) != 3:
                raise ParseError(path, lineno, "expected header 'H <n> <m>'")
            try:
                header = (int(tok[1]), int(tok[2]))
            except ValueError:
                raise ParseError(path, lineno, "header counts must be integers") from None
            continue
        if tok[0] != "E" or len(tok) < 3:
            raise ParseError(path, lineno, "expected 'E <weight> <v1> <v2> ...'")
        try:
            w, verts = float(tok[1]), [int(t) for t in tok[2:]]
        except ValueError:
            raise ParseError(path, lineno, "malformed number") from None
        if not w > 0 or not np.isfinite(w):
            raise ParseError(path, lineno, f"weight must be positive, got {w}")
        if min(verts) < 0 or max(verts) >= header[0]:
            raise ParseError(path, lineno, f"vertex id out of range [0, {header[0]})")
        if len(set(verts)) < 2:
            raise ParseError(path, lineno, "hyperedge needs at least 2 distinct vertices")
        edges.append((w, verts))
    if header is None:
        raise ParseError(path, 0, "missing 'H <n> <m>' header")
    if len(edges) != header[1]:
        raise ParseError(path, 0, f"header announces {header[1]} hyperedges, found {len(edges)}")
    return Hypergraph(header[0], edges)


def write_labels(L: Labeling | dict, path) -> None:
    items = L.as_dict() if isinstance(L, Labeling) else dict(L)
    with open(path, "w", encoding="utf-8") as fh:
        for i, y in sorted(items.items()):
            fh.write(f"{i} {y!r}\n")


def read_label_pairs(path) -> list[tuple[int, float]]:
    pairs, seen = [], set()
    for lineno, line in _lines(path):
        tok = line.replace(",", " ").split()
        if len(tok) != 2:
            raise ParseError(path, lineno, "expected '<vertex> <value>'")
        try:
            i, y = int(tok[0]), float(tok[1])
        except ValueError:
            raise ParseError(path, lineno, "malformed number") from None
        if i in seen:
            raise ParseError(path, lineno, f"duplicate vertex id {i}")
        seen.add(i)
        pairs.append((i, y))
    return pairs


def load_labels(path) -> Labeling:
    return Labeling(read_label_pairs(path))


def load_points(path) -> np.ndarray:
    rows = []
    for lineno, line in _lines(path):
        try:
            rows.append([float(t) for t in line.replace(",", " ").split()])
        except ValueError:
            raise ParseError(path, lineno, "malformed coordinate") from None
        if len(rows[-1]) != len(rows[0]):
            raise ParseError(path, lineno, "inconsistent point dimension")
    return np.asarray(rows, dtype=np.float64)


def write_points(P, path) -> None:
    P = np.asarray(P, dtype=np.float64)
    P = P[:, None] if P.ndim == 1 else P
    with open(path, "w", encoding="utf-8") as fh:
        for row in P:
            fh.write(" ".join(repr(float(x)) for x in row) + "\n")


def write_solution(u, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("vertex,value\n")
        for i, x in enumerate(np.asarray(u, dtype=np.float64)):
            fh.write(f"{i},{float(x)!r}\n")


def load_solution(path) -> np.ndarray:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    u = np.empty(len(rows))
    for r in rows:
        u[int(r["vertex"])] = float(r["value"])
    return u


def write_trace(trace: Iterable[tuple[int, float, float]], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("iter,delta_sup,residual_sup\n")
        for it, d, r in trace:
            fh.write(f"{it},{float(d)!r},{float(r)!r}\n")


def load_categorical_csv(path, label_column: str | None = None) -> tuple[list[list[str]], np.ndarray | None, list[str]]:
    """Read a CSV with a header row.

    Returns the feature rows (label column removed), the class labels
    mapped to ``1..l`` in sorted order of their tokens (or ``None`` when no
    label column is given), and the sorted class tokens.
    """
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ParseError(path, 1, "empty CSV file") from None
        rows = []
        for lineno, row in enumerate(reader, 2):
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(path, lineno, f"expected {len(header)} cells, got {len(row)}")
            rows.append([c.strip() for c in row])
    if not rows:
        raise ParseError(path, 2, "CSV has no data rows")
    if label_column is None:
        return rows, None, []
    if label_column not in header:
        raise KeyError(f"unknown label column {label_column!r}; columns are {header}")
    col = header.index(label_column)
    tokens = [r[col] for r in rows]
    classes = sorted(set(tokens))
    lookup = {c: i + 1 for i, c in enumerate(classes)}
    features = [r[:col] + r[col + 1:] for r in rows]
    return features, np.array([lookup[t] for t in tokens], dtype=np.int64), classes
