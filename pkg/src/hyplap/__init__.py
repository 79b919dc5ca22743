"""Hypergraph p-Laplacian interpolation and semi-supervised learning."""
from .functional import (
    Certificate,
    Labeling,
    argmax_face,
    eval_FCE,
    eval_FG,
    eval_FH,
    find_certificate,
    subgradient_from_certificate,
    verify_stationarity,
)
from .hgraph import (
    Hypergraph,
    categorical_hypergraph,
    clique_expansion,
    is_connected,
    knn_graph,
    knn_hypergraph,
    new_hypergraph,
)
from .kernels import BACKEND
from .solver import (
    SolverConfig,
    SolverReport,
    monotone_init,
    relative_l2_error,
    residual_AE,
    solve,
    solve_AE,
    solve_AE_p2,
    solve_FCE_gd,
    solve_FH_subgrad,
    tau_schedule,
)

__version__ = "0.1.0"
