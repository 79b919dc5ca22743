# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels. Signatures mirror ``hyplap._kernels``."""
import numpy as np

from libc.math cimport INFINITY, fabs, pow, sqrt

ctypedef long long idx_t


cdef inline double _phi(double s, double p) noexcept nogil:
    if p == 2.0:
        return s
    if s == 0.0:
        return 0.0
    # Common exponents avoid the scalar pow call.
    if p == 3.0:
        return fabs(s) * s
    if p == 4.0:
        return s * s * s
    if p == 2.5:
        return sqrt(fabs(s)) * s
    if p == 1.5:
        return s / sqrt(fabs(s))
    return pow(fabs(s), p - 2.0) * s


cdef void _extrema(const double[::1] u, const idx_t[::1] edge_ptr, const idx_t[::1] edge_idx,
                   double[::1] emax, double[::1] emin) noexcept nogil:
    cdef Py_ssize_t k, a
    cdef Py_ssize_t m = edge_ptr.shape[0] - 1
    cdef double hi, lo, x
    for k in range(m):
        a = edge_ptr[k]
        hi = u[edge_idx[a]]
        lo = hi
        for a in range(edge_ptr[k] + 1, edge_ptr[k + 1]):
            x = u[edge_idx[a]]
            if x > hi:
                hi = x
            elif x < lo:
                lo = x
        emax[k] = hi
        emin[k] = lo


def edge_extrema(const double[::1] u, const idx_t[::1] edge_ptr, const idx_t[::1] edge_idx):
    cdef Py_ssize_t m = edge_ptr.shape[0] - 1
    emax = np.empty(m)
    emin = np.empty(m)
    cdef double[::1] vmax = emax
    cdef double[::1] vmin = emin
    with nogil:
        _extrema(u, edge_ptr, edge_idx, vmax, vmin)
    return emax, emin


def ae_p2_sweep(const double[::1] u, double[::1] out, const idx_t[::1] edge_ptr, const idx_t[::1] edge_idx,
                const idx_t[::1] inc_ptr, const idx_t[::1] inc_edge, const idx_t[::1] inc_vertex,
                const double[::1] w, const unsigned char[::1] free):
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t m = edge_ptr.shape[0] - 1
    cdef double[::1] emax = np.empty(m)
    cdef double[::1] emin = np.empty(m)
    cdef Py_ssize_t i, a, k
    cdef double num, den, delta = 0.0, d
    with nogil:
        _extrema(u, edge_ptr, edge_idx, emax, emin)
        for i in range(n):
            out[i] = u[i]
            if not free[i]:
                continue
            num = 0.0
            den = 0.0
            for a in range(inc_ptr[i], inc_ptr[i + 1]):
                k = inc_edge[a]
                num = num + w[k] * (emax[k] + emin[k])
                den = den + w[k]
            if den > 0.0:
                out[i] = num / (2.0 * den)
                d = fabs(out[i] - u[i])
                if d > delta:
                    delta = d
    return delta


cdef void _ae_residual(const double[::1] u, double p, const idx_t[::1] inc_ptr, const idx_t[::1] inc_edge,
                       const double[::1] w, const unsigned char[::1] free,
                       const double[::1] emax, const double[::1] emin, double[::1] r) noexcept nogil:
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t i, a, k
    cdef double acc
    for i in range(n):
        acc = 0.0
        if free[i]:
            for a in range(inc_ptr[i], inc_ptr[i + 1]):
                k = inc_edge[a]
                acc = acc + w[k] * _phi(emax[k] + emin[k] - 2.0 * u[i], p)
        r[i] = acc


def ae_residual(const double[::1] u, double p, const idx_t[::1] edge_ptr, const idx_t[::1] edge_idx,
                const idx_t[::1] inc_ptr, const idx_t[::1] inc_edge, const idx_t[::1] inc_vertex,
                const double[::1] w, const unsigned char[::1] free):
    cdef Py_ssize_t m = edge_ptr.shape[0] - 1
    cdef double[::1] emax = np.empty(m)
    cdef double[::1] emin = np.empty(m)
    res = np.empty(u.shape[0])
    cdef double[::1] r = res
    with nogil:
        _extrema(u, edge_ptr, edge_idx, emax, emin)
        _ae_residual(u, p, inc_ptr, inc_edge, w, free, emax, emin, r)
    return res


def ae_step(const double[::1] u, double[::1] out, double tau, double p,
            const idx_t[::1] edge_ptr, const idx_t[::1] edge_idx,
            const idx_t[::1] inc_ptr, const idx_t[::1] inc_edge, const idx_t[::1] inc_vertex,
            const double[::1] w, const unsigned char[::1] free):
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t m = edge_ptr.shape[0] - 1
    cdef double[::1] emax = np.empty(m)
    cdef double[::1] emin = np.empty(m)
    cdef double[::1] r = np.empty(n)
    cdef Py_ssize_t i
    cdef double delta = 0.0, d
    with nogil:
        _extrema(u, edge_ptr, edge_idx, emax, emin)
        _ae_residual(u, p, inc_ptr, inc_edge, w, free, emax, emin, r)
        for i in range(n):
            out[i] = u[i] + tau * r[i]
            if free[i]:
                d = fabs(out[i] - u[i])
                if d > delta:
                    delta = d
    return delta


cdef enum:
    BISECT_MAX = 200


cdef void _top2(const double[::1] u, const idx_t[::1] edge_ptr, const idx_t[::1] edge_idx,
                double[::1] hi, double[::1] hi2, idx_t[::1] n_hi,
                double[::1] lo, double[::1] lo2, idx_t[::1] n_lo) noexcept nogil:
    # Per hyperedge: extreme values, their multiplicities and the runner-up values.
    cdef Py_ssize_t k, a
    cdef Py_ssize_t m = edge_ptr.shape[0] - 1
    cdef double x
    _extrema(u, edge_ptr, edge_idx, hi, lo)
    for k in range(m):
        n_hi[k] = 0
        n_lo[k] = 0
        hi2[k] = -INFINITY
        lo2[k] = INFINITY
        for a in range(edge_ptr[k], edge_ptr[k + 1]):
            x = u[edge_idx[a]]
            if x == hi[k]:
                n_hi[k] += 1
            elif x > hi2[k]:
                hi2[k] = x
            if x == lo[k]:
                n_lo[k] += 1
            elif x < lo2[k]:
                lo2[k] = x


def ae_jacobi_sweep(const double[::1] u, double[::1] out, double p,
                    const idx_t[::1] edge_ptr, const idx_t[::1] edge_idx,
                    const idx_t[::1] inc_ptr, const idx_t[::1] inc_edge, const idx_t[::1] inc_vertex,
                    const double[::1] w, const unsigned char[::1] free):
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t m = edge_ptr.shape[0] - 1
    cdef double[::1] hi = np.empty(m)
    cdef double[::1] hi2 = np.empty(m)
    cdef double[::1] lo = np.empty(m)
    cdef double[::1] lo2 = np.empty(m)
    cdef idx_t[::1] n_hi = np.empty(m, dtype=np.int64)
    cdef idx_t[::1] n_lo = np.empty(m, dtype=np.int64)
    cdef Py_ssize_t i, a, k, it
    cdef double left, right, mid, g, ak, bk, t, x, delta = 0.0, d
    with nogil:
        _top2(u, edge_ptr, edge_idx, hi, hi2, n_hi, lo, lo2, n_lo)
        for i in range(n):
            out[i] = u[i]
            if not free[i] or inc_ptr[i] == inc_ptr[i + 1]:
                continue
            x = u[i]
            left = INFINITY
            right = -INFINITY
            for a in range(inc_ptr[i], inc_ptr[i + 1]):
                k = inc_edge[a]
                bk = lo2[k] if (x == lo[k] and n_lo[k] == 1) else lo[k]
                ak = hi2[k] if (x == hi[k] and n_hi[k] == 1) else hi[k]
                if bk < left:
                    left = bk
                if ak > right:
                    right = ak
            for it in range(BISECT_MAX):
                mid = 0.5 * (left + right)
                if mid <= left or mid >= right:
                    break
                g = 0.0
                for a in range(inc_ptr[i], inc_ptr[i + 1]):
                    k = inc_edge[a]
                    bk = lo2[k] if (x == lo[k] and n_lo[k] == 1) else lo[k]
                    ak = hi2[k] if (x == hi[k] and n_hi[k] == 1) else hi[k]
                    t = (mid if mid > ak else ak) + (mid if mid < bk else bk) - 2.0 * mid
                    g += w[k] * _phi(t, p)
                if g > 0.0:
                    left = mid
                elif g < 0.0:
                    right = mid
                else:
                    left = mid
                    right = mid
                    break
            out[i] = 0.5 * (left + right)
            d = fabs(out[i] - x)
            if d > delta:
                delta = d
    return delta


cdef void _fce_residual(const double[::1] u, double p, const idx_t[::1] edge_ptr, const idx_t[::1] edge_idx,
                        const idx_t[::1] inc_ptr, const idx_t[::1] inc_edge,
                        const double[::1] w, const unsigned char[::1] free,
                        double[::1] esum, double[::1] r) noexcept nogil:
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t m = edge_ptr.shape[0] - 1
    cdef Py_ssize_t i, a, b, k
    cdef double acc, inner
    if p == 2.0:
        for k in range(m):
            acc = 0.0
            for a in range(edge_ptr[k], edge_ptr[k + 1]):
                acc = acc + u[edge_idx[a]]
            esum[k] = acc
        for i in range(n):
            acc = 0.0
            if free[i]:
                for a in range(inc_ptr[i], inc_ptr[i + 1]):
                    k = inc_edge[a]
                    acc = acc + w[k] * (esum[k] - (edge_ptr[k + 1] - edge_ptr[k]) * u[i])
            r[i] = acc
    else:
        for i in range(n):
            acc = 0.0
            if free[i]:
                for a in range(inc_ptr[i], inc_ptr[i + 1]):
                    k = inc_edge[a]
                    inner = 0.0
                    for b in range(edge_ptr[k], edge_ptr[k + 1]):
                        inner = inner + _phi(u[edge_idx[b]] - u[i], p)
                    acc = acc + w[k] * inner
            r[i] = acc


def fce_residual(const double[::1] u, double p, const idx_t[::1] edge_ptr, const idx_t[::1] edge_idx,
                 const idx_t[::1] inc_ptr, const idx_t[::1] inc_edge, const idx_t[::1] inc_vertex,
                 const double[::1] w, const unsigned char[::1] free):
    cdef Py_ssize_t m = edge_ptr.shape[0] - 1
    cdef double[::1] esum = np.empty(m)
    res = np.empty(u.shape[0])
    cdef double[::1] r = res
    with nogil:
        _fce_residual(u, p, edge_ptr, edge_idx, inc_ptr, inc_edge, w, free, esum, r)
    return res


def fce_step(const double[::1] u, double[::1] out, double tau, double p,
             const idx_t[::1] edge_ptr, const idx_t[::1] edge_idx,
             const idx_t[::1] inc_ptr, const idx_t[::1] inc_edge, const idx_t[::1] inc_vertex,
             const double[::1] w, const unsigned char[::1] free):
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t m = edge_ptr.shape[0] - 1
    cdef double[::1] esum = np.empty(m)
    cdef double[::1] r = np.empty(n)
    cdef Py_ssize_t i
    cdef double delta = 0.0, d
    with nogil:
        _fce_residual(u, p, edge_ptr, edge_idx, inc_ptr, inc_edge, w, free, esum, r)
        for i in range(n):
            out[i] = u[i] + tau * r[i]
            if free[i]:
                d = fabs(out[i] - u[i])
                if d > delta:
                    delta = d
    return delta


cdef double _fh_value(const double[::1] u, double p, const idx_t[::1] edge_ptr, const idx_t[::1] edge_idx,
                      const double[::1] w) noexcept nogil:
    cdef Py_ssize_t m = edge_ptr.shape[0] - 1
    cdef Py_ssize_t k, a
    cdef double hi, lo, x, total = 0.0
    for k in range(m):
        a = edge_ptr[k]
        hi = u[edge_idx[a]]
        lo = hi
        for a in range(edge_ptr[k] + 1, edge_ptr[k + 1]):
            x = u[edge_idx[a]]
            if x > hi:
                hi = x
            elif x < lo:
                lo = x
        if p == 2.0:
            total = total + w[k] * (hi - lo) * (hi - lo)
        else:
            total = total + w[k] * pow(hi - lo, p)
    return total


def fh_value(const double[::1] u, double p, const idx_t[::1] edge_ptr, const idx_t[::1] edge_idx,
             const double[::1] w):
    return _fh_value(u, p, edge_ptr, edge_idx, w)


cdef void _fh_subgradient(const double[::1] u, double p, double face_tol,
                          const idx_t[::1] edge_ptr, const idx_t[::1] edge_idx, const double[::1] w,
                          double[::1] q) noexcept nogil:
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t m = edge_ptr.shape[0] - 1
    cdef Py_ssize_t i, k, a, ntop, nbot
    cdef double hi, lo, x, rng, c
    for i in range(n):
        q[i] = 0.0
    for k in range(m):
        a = edge_ptr[k]
        hi = u[edge_idx[a]]
        lo = hi
        for a in range(edge_ptr[k] + 1, edge_ptr[k + 1]):
            x = u[edge_idx[a]]
            if x > hi:
                hi = x
            elif x < lo:
                lo = x
        rng = hi - lo
        if rng <= face_tol:
            continue
        ntop = 0
        nbot = 0
        for a in range(edge_ptr[k], edge_ptr[k + 1]):
            x = u[edge_idx[a]]
            if x >= hi - face_tol:
                ntop += 1
            if x <= lo + face_tol:
                nbot += 1
        if p == 2.0:
            c = 2.0 * w[k] * rng
        else:
            c = p * w[k] * pow(rng, p - 1.0)
        for a in range(edge_ptr[k], edge_ptr[k + 1]):
            x = u[edge_idx[a]]
            if x >= hi - face_tol:
                q[edge_idx[a]] += c / ntop
            if x <= lo + face_tol:
                q[edge_idx[a]] -= c / nbot


def fh_subgradient(const double[::1] u, double p, double face_tol,
                   const idx_t[::1] edge_ptr, const idx_t[::1] edge_idx, const double[::1] w):
    res = np.empty(u.shape[0])
    cdef double[::1] q = res
    with nogil:
        _fh_subgradient(u, p, face_tol, edge_ptr, edge_idx, w, q)
    return res


cdef inline double _tau(double t) noexcept nogil:
    cdef double e = 0.16 * t / 1e5
    if e > 1.0:
        e = 1.0
    return 1.0 / pow(t + 1.0, e)


def tau_schedule(double t):
    return _tau(t)


def fh_subgrad_run(double[::1] u, double[::1] best_u, double best_f, const unsigned char[::1] free,
                   double p, double scale, long long t0, long long t1, double face_tol,
                   const idx_t[::1] edge_ptr, const idx_t[::1] edge_idx, const double[::1] w):
    cdef Py_ssize_t n = u.shape[0]
    cdef double[::1] q = np.empty(n)
    cdef long long t
    cdef Py_ssize_t i
    cdef double nrm, g_sup = 0.0, step_sup = 0.0, coef, s, f
    with nogil:
        for t in range(t0, t1):
            _fh_subgradient(u, p, face_tol, edge_ptr, edge_idx, w, q)
            nrm = 0.0
            g_sup = 0.0
            for i in range(n):
                if not free[i]:
                    q[i] = 0.0
                nrm = nrm + q[i] * q[i]
                if fabs(q[i]) > g_sup:
                    g_sup = fabs(q[i])
            if nrm == 0.0:
                step_sup = 0.0
                break
            coef = _tau(<double>t) * scale / sqrt(nrm)
            step_sup = 0.0
            for i in range(n):
                s = coef * q[i]
                u[i] = u[i] - s
                if fabs(s) > step_sup:
                    step_sup = fabs(s)
            f = _fh_value(u, p, edge_ptr, edge_idx, w)
            if f < best_f:
                best_f = f
                for i in range(n):
                    best_u[i] = u[i]
    return best_f, step_sup, g_sup
