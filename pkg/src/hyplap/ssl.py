"""One-vs-rest semi-supervised classification on hypergraphs."""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .functional import Labeling
from .hgraph import Hypergraph
from .solver import SolverConfig, SolverReport, solve


@dataclass(frozen=True)
class TrainingSet:
    """Labeled vertices with class labels in ``1..n_classes``."""

    vertices: np.ndarray
    labels: np.ndarray
    n_classes: int

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=np.int64)
        y = np.asarray(self.labels, dtype=np.int64)
        if v.shape != y.shape or v.ndim != 1 or len(v) == 0:
            raise ValueError("training set needs matching, nonempty vertex and label arrays")
        if len(np.unique(v)) != len(v):
            raise ValueError("training vertices must be distinct")
        if self.n_classes < 1 or y.min() < 1 or y.max() > self.n_classes:
            raise ValueError(f"class labels must lie in 1..{self.n_classes}")
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "labels", y)

    def empty_classes(self) -> list[int]:
        present = set(self.labels.tolist())
        return [c for c in range(1, self.n_classes + 1) if c not in present]


@dataclass
class Prediction:
    labels: np.ndarray
    scores: np.ndarray
    reports: list[SolverReport] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return all(r.converged for r in self.reports)


def argmax_labels(scores: np.ndarray, tie_tol: float = 1e-9) -> np.ndarray:
    """Per-column argmax over classes, 1-based; near-ties go to the smaller class."""
    top = scores.max(axis=0)
    return np.argmax(scores >= top - tie_tol, axis=0) + 1


def train_one_vs_rest(
    H: Hypergraph,
    T: TrainingSet,
    method: str = "ae-p2",
    cfg: SolverConfig | None = None,
    tie_tol: float = 1e-9,
) -> Prediction:
    """Interpolate a 0/1 indicator per class and label each vertex by argmax."""
    cfg = cfg or SolverConfig()
    scores = np.zeros((T.n_classes, H.n))
    reports = []
    for c in range(1, T.n_classes + 1):
        L = Labeling(zip(T.vertices.tolist(), (T.labels == c).astype(float).tolist()))
        u, rep = solve(method, H, L, cfg)
        scores[c - 1] = u
        reports.append(rep)
    labels = argmax_labels(scores, tie_tol)
    labels[T.vertices] = T.labels
    return Prediction(labels, scores, reports)


def classification_error(pred, truth, mask=None) -> float:
    """Fraction of vertices in ``mask`` where ``pred`` differs from ``truth``."""
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    mask = np.ones(len(truth), dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
    if not mask.any():
        raise ValueError("evaluation mask is empty")
    return float(np.mean(pred[mask] != truth[mask]))


def sample_training_set(truth, size: int | None = None, rate: float | None = None, seed: int = 0, n_classes: int | None = None) -> TrainingSet:
    """Uniform random labeled subset, drawn without replacement."""
    truth = np.asarray(truth, dtype=np.int64)
    n = len(truth)
    if (size is None) == (rate is None):
        raise ValueError("give exactly one of size or rate")
    if rate is not None:
        if not 0.0 < rate <= 1.0:
            raise ValueError("rate must lie in (0, 1]")
        size = int(round(rate * n))
    if not 1 <= size <= n:
        raise ValueError(f"training set size must lie in [1, {n}], got {size}")
    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(n, size=size, replace=False))
    return TrainingSet(idx, truth[idx], n_classes or int(truth.max()))


def run_trials(
    H: Hypergraph,
    truth,
    size: int | None = None,
    rate: float | None = None,
    runs: int = 10,
    seed: int = 0,
    method: str = "ae-p2",
    cfg: SolverConfig | None = None,
    eval_all: bool = False,
) -> dict:
    """Repeat sample / train / evaluate; errors are measured on V \\ L unless ``eval_all``."""
    truth = np.asarray(truth, dtype=np.int64)
    n_classes = int(truth.max())
    errors, seconds, solve_seconds, converged = [], [], [], []
    for r in range(runs):
        T = sample_training_set(truth, size=size, rate=rate, seed=seed + r, n_classes=n_classes)
        t0 = time.perf_counter()
        pred = train_one_vs_rest(H, T, method, cfg)
        seconds.append(time.perf_counter() - t0)
        solve_seconds.extend(rep.seconds for rep in pred.reports)
        mask = np.ones(H.n, dtype=bool)
        if not eval_all:
            mask[T.vertices] = False
        errors.append(classification_error(pred.labels, truth, mask))
        converged.append(pred.converged)
    return {
        "method": method,
        "train_size": int(T.vertices.size),
        "runs": runs,
        "errors": errors,
        "mean": float(np.mean(errors)),
        "std": float(np.std(errors)),
        "seconds_per_run": seconds,
        "max_class_solve_seconds": float(max(solve_seconds)),
        "converged": converged,
    }
