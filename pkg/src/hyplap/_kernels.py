"""Pure numpy implementations of the hot kernels.

Signatures mirror ``hyplap._ckernels`` exactly; see :mod:`hyplap.kernels`
for backend selection. Per-vertex sums use ``np.bincount`` over the
incidence arrays, which accumulates in ascending hyperedge order.
"""
import numpy as np


def _phi(s, p):
    # |s|^(p-2) s with |0|^(p-2) 0 = 0
    if p == 2.0:
        return s
    out = np.zeros_like(s)
    nz = s != 0.0
    x = s[nz]
    if p == 3.0:
        out[nz] = np.abs(x) * x
    elif p == 4.0:
        out[nz] = x * x * x
    elif p == 2.5:
        out[nz] = np.sqrt(np.abs(x)) * x
    elif p == 1.5:
        out[nz] = x / np.sqrt(np.abs(x))
    else:
        out[nz] = np.abs(x) ** (p - 2.0) * x
    return out


def edge_extrema(u, edge_ptr, edge_idx):
    m = len(edge_ptr) - 1
    if m == 0:
        return np.zeros(0), np.zeros(0)
    vals = np.asarray(u)[edge_idx]
    starts = np.asarray(edge_ptr[:-1])
    return np.maximum.reduceat(vals, starts), np.minimum.reduceat(vals, starts)


def ae_p2_sweep(u, out, edge_ptr, edge_idx, inc_ptr, inc_edge, inc_vertex, w, free):
    n = len(u)
    emax, emin = edge_extrema(u, edge_ptr, edge_idx)
    ww = w[inc_edge]
    num = np.bincount(inc_vertex, weights=ww * (emax[inc_edge] + emin[inc_edge]), minlength=n)
    den = np.bincount(inc_vertex, weights=ww, minlength=n)
    upd = free.astype(bool) & (den > 0.0)
    out[:] = u
    out[upd] = num[upd] / (2.0 * den[upd])
    if not upd.any():
        return 0.0
    return float(np.max(np.abs(out[upd] - u[upd])))


def ae_residual(u, p, edge_ptr, edge_idx, inc_ptr, inc_edge, inc_vertex, w, free):
    n = len(u)
    emax, emin = edge_extrema(u, edge_ptr, edge_idx)
    s = emax[inc_edge] + emin[inc_edge] - 2.0 * np.asarray(u)[inc_vertex]
    r = np.bincount(inc_vertex, weights=w[inc_edge] * _phi(s, p), minlength=n)
    r[~free.astype(bool)] = 0.0
    return r


def ae_step(u, out, tau, p, edge_ptr, edge_idx, inc_ptr, inc_edge, inc_vertex, w, free):
    r = ae_residual(u, p, edge_ptr, edge_idx, inc_ptr, inc_edge, inc_vertex, w, free)
    out[:] = u + tau * r
    fm = free.astype(bool)
    if not fm.any():
        return 0.0
    return float(np.max(np.abs(out[fm] - u[fm])))


def _others_extrema(u, edge_ptr, edge_idx):
    """Per incidence position: max and min of ``u`` over the other members of its hyperedge."""
    vals = np.asarray(u)[edge_idx]
    sizes = np.diff(edge_ptr)
    starts = np.asarray(edge_ptr[:-1])
    owner = np.repeat(np.arange(len(sizes)), sizes)
    hi, lo = edge_extrema(u, edge_ptr, edge_idx)
    at_hi = vals == hi[owner]
    at_lo = vals == lo[owner]
    n_hi = np.add.reduceat(at_hi.astype(np.int64), starts)
    n_lo = np.add.reduceat(at_lo.astype(np.int64), starts)
    hi2 = np.maximum.reduceat(np.where(at_hi, -np.inf, vals), starts)
    lo2 = np.minimum.reduceat(np.where(at_lo, np.inf, vals), starts)
    a = np.where(at_hi & (n_hi[owner] == 1), hi2[owner], hi[owner])
    b = np.where(at_lo & (n_lo[owner] == 1), lo2[owner], lo[owner])
    return a, b


def ae_jacobi_sweep(u, out, p, edge_ptr, edge_idx, inc_ptr, inc_edge, inc_vertex, w, free):
    """Solve each free vertex's equation exactly (by bisection) with the others held at ``u``.

    With the rest fixed, ``t -> sum_k w_k phi(max(t, a_k) + min(t, b_k) - 2 t)``
    is strictly decreasing, positive at ``min_k b_k`` and negative at
    ``max_k a_k``; ``a_k, b_k`` are the max and min of the other members.
    """
    n = len(u)
    u = np.asarray(u)
    out[:] = u
    a, b = _others_extrema(u, edge_ptr, edge_idx)
    sizes = np.diff(edge_ptr)
    wpos = np.repeat(w, sizes)
    deg = np.bincount(edge_idx, minlength=n)
    act = free.astype(bool) & (deg > 0)
    lo = np.full(n, np.inf)
    hi = np.full(n, -np.inf)
    np.minimum.at(lo, edge_idx, b)
    np.maximum.at(hi, edge_idx, a)
    for _ in range(_BISECT_MAX):
        if not act.any():
            break
        mid = 0.5 * (lo + hi)
        stuck = act & ((mid <= lo) | (mid >= hi))
        act &= ~stuck
        t = mid[edge_idx]
        g = np.bincount(edge_idx, weights=wpos * _phi(np.maximum(t, a) + np.minimum(t, b) - 2.0 * t, p), minlength=n)
        up = act & (g > 0.0)
        down = act & (g < 0.0)
        hit = act & (g == 0.0)
        lo[up] = mid[up]
        hi[down] = mid[down]
        lo[hit] = hi[hit] = mid[hit]
        act &= ~hit
    upd = free.astype(bool) & (deg > 0)
    out[upd] = 0.5 * (lo[upd] + hi[upd])
    if not upd.any():
        return 0.0
    return float(np.max(np.abs(out[upd] - u[upd])))


_BISECT_MAX = 200


def fce_residual(u, p, edge_ptr, edge_idx, inc_ptr, inc_edge, inc_vertex, w, free):
    n = len(u)
    u = np.asarray(u)
    if p == 2.0:
        sizes = np.diff(edge_ptr)
        m = len(sizes)
        esum = np.add.reduceat(u[edge_idx], edge_ptr[:-1]) if m else np.zeros(0)
        vals = w[inc_edge] * (esum[inc_edge] - sizes[inc_edge] * u[inc_vertex])
        r = np.bincount(inc_vertex, weights=vals, minlength=n)
    else:
        r = np.zeros(n)
        for k in range(len(edge_ptr) - 1):
            e = edge_idx[edge_ptr[k]:edge_ptr[k + 1]]
            ue = u[e]
            d = ue[None, :] - ue[:, None]
            r[e] += w[k] * _phi(d, p).sum(axis=1)
    r[~free.astype(bool)] = 0.0
    return r


def fce_step(u, out, tau, p, edge_ptr, edge_idx, inc_ptr, inc_edge, inc_vertex, w, free):
    r = fce_residual(u, p, edge_ptr, edge_idx, inc_ptr, inc_edge, inc_vertex, w, free)
    out[:] = u + tau * r
    fm = free.astype(bool)
    if not fm.any():
        return 0.0
    return float(np.max(np.abs(out[fm] - u[fm])))


def fh_value(u, p, edge_ptr, edge_idx, w):
    emax, emin = edge_extrema(u, edge_ptr, edge_idx)
    return float(np.sum(w * (emax - emin) ** p))


def fh_subgradient(u, p, face_tol, edge_ptr, edge_idx, w):
    """Subgradient of F_H with uniform weights over tied extreme vertices."""
    u = np.asarray(u)
    q = np.zeros(len(u))
    emax, emin = edge_extrema(u, edge_ptr, edge_idx)
    for k in range(len(w)):
        rng = emax[k] - emin[k]
        if rng <= face_tol:
            continue
        e = edge_idx[edge_ptr[k]:edge_ptr[k + 1]]
        ue = u[e]
        top = e[ue >= emax[k] - face_tol]
        bot = e[ue <= emin[k] + face_tol]
        c = p * w[k] * rng ** (p - 1.0)
        q[top] += c / len(top)
        q[bot] -= c / len(bot)
    return q


def tau_schedule(t):
    return 1.0 / (t + 1.0) ** min(0.16 * t / 1e5, 1.0)


def fh_subgrad_run(u, best_u, best_f, free, p, scale, t0, t1, face_tol, edge_ptr, edge_idx, w):
    """Normalized subgradient steps for iterations ``t0 <= t < t1``.

    ``u`` and ``best_u`` are updated in place. Returns
    ``(best_f, last_step_sup, last_subgradient_sup)``.
    """
    fm = free.astype(bool)
    step_sup = 0.0
    g_sup = 0.0
    for t in range(t0, t1):
        q = fh_subgradient(u, p, face_tol, edge_ptr, edge_idx, w)
        q[~fm] = 0.0
        nrm = float(np.sqrt(np.dot(q, q)))
        g_sup = float(np.max(np.abs(q))) if len(q) else 0.0
        if nrm == 0.0:
            step_sup = 0.0
            break
        step = (tau_schedule(t) * scale / nrm) * q
        u -= step
        step_sup = float(np.max(np.abs(step)))
        f = fh_value(u, p, edge_ptr, edge_idx, w)
        if f < best_f:
            best_f = f
            best_u[:] = u
    return best_f, step_sup, g_sup
