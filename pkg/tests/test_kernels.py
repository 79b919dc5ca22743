"""The compiled and numpy backends must agree kernel by kernel."""
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyplap import kernels
from helpers import random_connected, random_labels

BACKENDS = kernels.available_backends()
needs_both = pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled extension not built")


def instance(seed, grid=False):
    rng = np.random.default_rng(seed)
    H = random_connected(rng, int(rng.integers(2, 40)), max_size=6)
    L = random_labels(rng, H.n)
    u = L.impose(rng.uniform(-1, 1, H.n))
    if grid:
        u = np.round(u * 4) / 4  # ties inside hyperedges
    return H, L, np.ascontiguousarray(u), L.free(H.n)


def args(H, free):
    return (H.edge_ptr, H.edge_idx, H.inc_ptr, H.inc_edge, H.inc_vertex, H.weights, free)


def test_backend_selected():
    assert kernels.BACKEND in BACKENDS
    assert "python" in BACKENDS


@needs_both
@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000), st.sampled_from([1.3, 2.0, 3.0]), st.booleans())
def test_backends_agree(seed, p, grid):
    H, L, u, free = instance(seed, grid)
    c, py = BACKENDS["cython"], BACKENDS["python"]
    for name in ("edge_extrema",):
        for a, b in zip(getattr(c, name)(u, H.edge_ptr, H.edge_idx), getattr(py, name)(u, H.edge_ptr, H.edge_idx)):
            np.testing.assert_array_equal(a, b)
    oc, op = np.empty_like(u), np.empty_like(u)
    dc = c.ae_p2_sweep(u, oc, *args(H, free))
    dp = py.ae_p2_sweep(u, op, *args(H, free))
    np.testing.assert_allclose(oc, op, rtol=0, atol=1e-15)
    assert dc == pytest.approx(dp, abs=1e-15)
    np.testing.assert_allclose(c.ae_residual(u, p, *args(H, free)), py.ae_residual(u, p, *args(H, free)), rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(c.fce_residual(u, p, *args(H, free)), py.fce_residual(u, p, *args(H, free)), rtol=1e-12, atol=1e-12)
    for step in ("ae_step", "fce_step"):
        dc = getattr(c, step)(u, oc, 0.01, p, *args(H, free))
        dp = getattr(py, step)(u, op, 0.01, p, *args(H, free))
        np.testing.assert_allclose(oc, op, rtol=0, atol=1e-13)
        assert dc == pytest.approx(dp, rel=1e-10, abs=1e-15)
    dc = c.ae_jacobi_sweep(u, oc, p, *args(H, free))
    dp = py.ae_jacobi_sweep(u, op, p, *args(H, free))
    np.testing.assert_allclose(oc, op, rtol=0, atol=1e-13)
    assert c.fh_value(u, p, H.edge_ptr, H.edge_idx, H.weights) == pytest.approx(
        py.fh_value(u, p, H.edge_ptr, H.edge_idx, H.weights), rel=1e-12, abs=1e-14
    )
    np.testing.assert_allclose(
        c.fh_subgradient(u, p, 1e-12, H.edge_ptr, H.edge_idx, H.weights),
        py.fh_subgradient(u, p, 1e-12, H.edge_ptr, H.edge_idx, H.weights),
        rtol=1e-12,
        atol=1e-12,
    )


@needs_both
@settings(max_examples=20, deadline=None)
@given(st.integers(0, 100_000))
def test_subgradient_runs_agree(seed):
    H, L, u, free = instance(seed)
    scale = L.hi - L.lo or 1.0
    out = {}
    for name, mod in BACKENDS.items():
        v, best = u.copy(), u.copy()
        f0 = mod.fh_value(v, 2.0, H.edge_ptr, H.edge_idx, H.weights)
        f, _, _ = mod.fh_subgrad_run(v, best, f0, free, 2.0, scale, 0, 300, 1e-12, H.edge_ptr, H.edge_idx, H.weights)
        out[name] = (f, best)
    assert out["cython"][0] == pytest.approx(out["python"][0], rel=1e-9, abs=1e-12)
    np.testing.assert_allclose(out["cython"][1], out["python"][1], atol=1e-9)


def test_tau_schedule_backends():
    for mod in BACKENDS.values():
        assert mod.tau_schedule(0) == 1.0
        assert mod.tau_schedule(10**6) == pytest.approx(1e-6, rel=1e-5)


def test_jacobi_sweep_solves_vertex_equation():
    # After one sweep each free vertex balances its own equation against the old neighbours.
    H, L, u, free = instance(7)
    py = BACKENDS["python"]
    out = np.empty_like(u)
    py.ae_jacobi_sweep(u, out, 2.0, *args(H, free))
    for i in np.flatnonzero(free):
        g = 0.0
        for k in H.incident(i):
            others = [u[j] for j in H.edge(k) if j != i]
            t = out[i]
            g += H.weights[k] * (max(t, max(others)) + min(t, min(others)) - 2 * t)
        assert abs(g) <= 1e-9


def test_pure_python_switch():
    code = "import hyplap.kernels as k; print(k.BACKEND)"
    env = dict(os.environ, HYPLAP_PURE_PYTHON="1")
    res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert res.stdout.strip() == "python"
