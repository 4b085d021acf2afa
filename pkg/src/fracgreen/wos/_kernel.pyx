# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3, cpow=True
"""Compiled walk kernel: scalar per-walk loops over encoded domains/fields.

Random draws replicate the splitmix64 streams of the NumPy backend draw for
draw, so each backend reproduces its own runs deterministically.
"""

from libc.math cimport cos, exp, fabs, floor, log, sin, sqrt

import numpy as np

cimport numpy as cnp

cnp.import_array()

DEF PI = 3.141592653589793238462643383279503

cdef extern from *:
    """
    typedef unsigned long long u64;
    static inline u64 fg_mix64(u64 z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    """
    ctypedef unsigned long long u64
    u64 fg_mix64(u64 z) nogil

cdef u64 GOLDEN = 0x9E3779B97F4A7C15ULL


cdef inline double next_uniform(u64 *state) nogil:
    state[0] = state[0] + GOLDEN
    return <double>((fg_mix64(state[0]) >> 11) + 1) * (1.0 / 9007199254740992.0)


cdef inline double beta_johnk(u64 *state, double s) nogil:
    cdef double lu, lv, m, tot
    while True:
        lu = log(next_uniform(state)) / s
        lv = log(next_uniform(state)) / (1.0 - s)
        m = lu if lu > lv else lv
        tot = m + log(exp(lu - m) + exp(lv - m))
        if tot <= 0.0:
            return 1.0 / (1.0 + exp(lv - lu))


cdef inline void direction(u64 *state, int ndim, double *out) nogil:
    cdef double th, z, r
    if ndim == 2:
        th = 2.0 * PI * next_uniform(state)
        out[0] = cos(th)
        out[1] = sin(th)
    else:
        z = 2.0 * next_uniform(state) - 1.0
        th = 2.0 * PI * next_uniform(state)
        r = sqrt(1.0 - z * z if z * z < 1.0 else 0.0)
        out[0] = r * cos(th)
        out[1] = r * sin(th)
        out[2] = z


# ---------------------------------------------------------------- domains

cdef double dom_distance(int kind, const double[::1] df, const long long[::1] di,
                         const unsigned char[::1] du8, int ndim,
                         const double *p) nogil:
    cdef double acc = 0.0, lo, hi, t, best, d
    cdef int a, k, nb, inside
    cdef long long i0, i1, i2, idx, n0, n1, n2
    if kind == 1:  # ball: [c..., r]
        for a in range(ndim):
            t = p[a] - df[a]
            acc += t * t
        return fabs(df[ndim] - sqrt(acc))
    if kind == 2:  # box: [lo..., hi...]
        best = 1e300
        acc = 0.0
        inside = 1
        for a in range(ndim):
            lo = df[a] - p[a]
            hi = p[a] - df[ndim + a]
            t = lo if lo > hi else hi
            if t > 0.0:
                inside = 0
                acc += t * t
            else:
                if -t < best:
                    best = -t
        if inside:
            return best
        return sqrt(acc)
    if kind == 3:  # union of balls: di=[k], df=[c...,r]*k
        nb = <int>di[0]
        best = -1e300
        for k in range(nb):
            acc = 0.0
            for a in range(ndim):
                t = p[a] - df[k * (ndim + 1) + a]
                acc += t * t
            d = df[k * (ndim + 1) + ndim] - sqrt(acc)
            if d > best:
                best = d
        return fabs(best)
    # voxel mask: df=[origin..., h, dist_in..., dist_out...], di=dims, du8=occ
    cdef double h = df[ndim]
    cdef long long total = 1
    for a in range(ndim):
        total *= di[a]
    n0 = di[0]
    n1 = di[1] if ndim > 1 else 1
    n2 = di[2] if ndim > 2 else 1
    i0 = <long long>floor((p[0] - df[0]) / h)
    i1 = <long long>floor((p[1] - df[1]) / h)
    i2 = <long long>floor((p[2] - df[2]) / h) if ndim > 2 else 0
    cdef int ok = 1
    if i0 < 0: i0 = 0; ok = 0
    if i0 >= n0: i0 = n0 - 1; ok = 0
    if i1 < 0: i1 = 0; ok = 0
    if i1 >= n1: i1 = n1 - 1; ok = 0
    if ndim > 2:
        if i2 < 0: i2 = 0; ok = 0
        if i2 >= n2: i2 = n2 - 1; ok = 0
    if ndim == 2:
        idx = i0 * n1 + i1
    else:
        idx = (i0 * n1 + i1) * n2 + i2
    cdef double din = (df[ndim + 1 + idx] - 0.5) * h
    cdef double dout = (df[ndim + 1 + total + idx] - 0.5) * h
    cdef double val
    if ok and du8[idx]:
        val = din
    else:
        val = dout
        if not ok:
            # outside the grid: add the offset back to the clamped cell
            acc = 0.0
            for a in range(ndim):
                lo = df[a]
                hi = df[a] + di[a] * h
                t = p[a]
                if t < lo:
                    acc += (lo - t) * (lo - t)
                elif t > hi:
                    acc += (t - hi) * (t - hi)
            val = dout + sqrt(acc)
    return val if val > 0.0 else 0.0


cdef int dom_contains(int kind, const double[::1] df, const long long[::1] di,
                      const unsigned char[::1] du8, int ndim,
                      const double *p) nogil:
    cdef double acc, t
    cdef int a, k, nb
    cdef long long i0, i1, i2, idx, n0, n1, n2
    if kind == 1:
        acc = 0.0
        for a in range(ndim):
            t = p[a] - df[a]
            acc += t * t
        return sqrt(acc) < df[ndim]
    if kind == 2:
        for a in range(ndim):
            if p[a] <= df[a] or p[a] >= df[ndim + a]:
                return 0
        return 1
    if kind == 3:
        nb = <int>di[0]
        for k in range(nb):
            acc = 0.0
            for a in range(ndim):
                t = p[a] - df[k * (ndim + 1) + a]
                acc += t * t
            if sqrt(acc) < df[k * (ndim + 1) + ndim]:
                return 1
        return 0
    cdef double h = df[ndim]
    n0 = di[0]
    n1 = di[1] if ndim > 1 else 1
    n2 = di[2] if ndim > 2 else 1
    i0 = <long long>floor((p[0] - df[0]) / h)
    i1 = <long long>floor((p[1] - df[1]) / h)
    if i0 < 0 or i0 >= n0 or i1 < 0 or i1 >= n1:
        return 0
    if ndim == 2:
        return du8[i0 * n1 + i1]
    i2 = <long long>floor((p[2] - df[2]) / h)
    if i2 < 0 or i2 >= n2:
        return 0
    return du8[(i0 * n1 + i1) * n2 + i2]


# ---------------------------------------------------------------- fields

cdef double field_eval(int kind, const double[::1] ff, const long long[::1] fi,
                       int ndim, const double *p) nogil:
    cdef double acc, term, q, t, w
    cdef int k, a, nterms, m, e
    cdef long long i0, i1, i2, n0, n1, n2
    if kind == 1:  # const
        return ff[0]
    if kind == 2:  # poly: [coef, e_1..e_ndim] * nterms, integer exponents
        nterms = <int>fi[0]
        acc = 0.0
        for k in range(nterms):
            term = ff[k * (ndim + 1)]
            for a in range(ndim):
                e = <int>ff[k * (ndim + 1) + 1 + a]
                while e > 0:
                    term *= p[a]
                    e -= 1
            acc += term
        return acc
    if kind == 3:  # bump: [c..., R, amp]
        acc = 0.0
        for a in range(ndim):
            t = p[a] - ff[a]
            acc += t * t
        q = acc / (ff[ndim] * ff[ndim])
        if q >= 1.0:
            return 0.0
        return ff[ndim + 1] * exp(1.0 - 1.0 / (1.0 - q))
    if kind == 4:  # radial table: [c..., r_0..r_{m-1}, v_0..v_{m-1}]
        m = <int>fi[0]
        acc = 0.0
        for a in range(ndim):
            t = p[a] - ff[a]
            acc += t * t
        t = sqrt(acc)
        if t <= ff[ndim]:
            return ff[ndim + m]
        if t >= ff[ndim + m - 1]:
            return ff[ndim + 2 * m - 1]
        for k in range(1, m):
            if t <= ff[ndim + k]:
                w = (t - ff[ndim + k - 1]) / (ff[ndim + k] - ff[ndim + k - 1])
                return ff[ndim + m + k - 1] * (1.0 - w) + ff[ndim + m + k] * w
        return ff[ndim + 2 * m - 1]
    # grid table: ff=[origin..., h, values...], fi=dims; multilinear, clamped
    cdef double h = ff[ndim]
    n0 = fi[0]
    n1 = fi[1] if ndim > 1 else 1
    n2 = fi[2] if ndim > 2 else 1
    cdef double u0 = (p[0] - ff[0]) / h - 0.5
    cdef double u1 = (p[1] - ff[1]) / h - 0.5
    cdef double u2 = (p[2] - ff[2]) / h - 0.5 if ndim > 2 else 0.0
    if u0 < 0.0: u0 = 0.0
    if u1 < 0.0: u1 = 0.0
    if u2 < 0.0: u2 = 0.0
    if u0 > n0 - 1.000001: u0 = n0 - 1.000001
    if u1 > n1 - 1.000001: u1 = n1 - 1.000001
    if ndim > 2 and u2 > n2 - 1.000001: u2 = n2 - 1.000001
    i0 = <long long>floor(u0)
    i1 = <long long>floor(u1)
    i2 = <long long>floor(u2)
    cdef double w0 = u0 - i0, w1 = u1 - i1, w2 = u2 - i2
    cdef const double *v = &ff[ndim + 1]
    cdef long long j00, j01, j10, j11
    if ndim == 2:
        j00 = i0 * n1 + i1
        return ((1 - w0) * ((1 - w1) * v[j00] + w1 * v[j00 + 1])
                + w0 * ((1 - w1) * v[j00 + n1] + w1 * v[j00 + n1 + 1]))
    j00 = (i0 * n1 + i1) * n2 + i2
    j01 = (i0 * n1 + i1 + 1) * n2 + i2
    j10 = ((i0 + 1) * n1 + i1) * n2 + i2
    j11 = ((i0 + 1) * n1 + i1 + 1) * n2 + i2
    return ((1 - w0) * ((1 - w1) * ((1 - w2) * v[j00] + w2 * v[j00 + 1])
                        + w1 * ((1 - w2) * v[j01] + w2 * v[j01 + 1]))
            + w0 * ((1 - w1) * ((1 - w2) * v[j10] + w2 * v[j10 + 1])
                    + w1 * ((1 - w2) * v[j11] + w2 * v[j11 + 1])))


# ---------------------------------------------------------------- walks

def run_walks(int n, unsigned long long seed, unsigned long long start_index,
              double[::1] x0, double s, double coeff, double eps_abs,
              double shrink, int max_steps, int ndim,
              int dkind, double[::1] df, long long[::1] di, unsigned char[::1] du8,
              int fkind, double[::1] ff, long long[::1] fi,
              double[::1] src_quant,
              double[::1] out):
    """Fill out[:n] with per-walk accumulated values; return truncated count.

    src_quant (empty for constant fields) is the radius quantile table of the
    step ball's Green mass; sources are then evaluated at a Green-distributed
    point, which keeps the estimator unbiased for varying fields.
    """
    cdef int truncated = 0
    cdef int i, a, step
    cdef u64 state
    cdef double pos[3]
    cdef double cand[3]
    cdef double dvec[3]
    cdef double acc, d, rho, radius, b, src, u, fr, r_src
    cdef double two_s = 2.0 * s
    cdef int nquant = src_quant.shape[0]
    cdef long long qi
    with nogil:
        for i in range(n):
            state = fg_mix64(fg_mix64(seed) ^ ((start_index + i + 1) * GOLDEN))
            for a in range(ndim):
                pos[a] = x0[a]
            acc = 0.0
            for step in range(max_steps):
                d = dom_distance(dkind, df, di, du8, ndim, pos)
                if d <= eps_abs:
                    break
                rho = shrink * d
                if nquant == 0:
                    src = field_eval(fkind, ff, fi, ndim, pos)
                else:
                    u = next_uniform(&state) * (nquant - 1)
                    qi = <long long>floor(u)
                    if qi >= nquant - 1:
                        qi = nquant - 2
                    fr = u - qi
                    r_src = src_quant[qi] * (1.0 - fr) + src_quant[qi + 1] * fr
                    direction(&state, ndim, dvec)
                    for a in range(ndim):
                        cand[a] = pos[a] + rho * r_src * dvec[a]
                    src = field_eval(fkind, ff, fi, ndim, cand)
                acc += src * coeff * rho ** two_s
                b = beta_johnk(&state, s)
                radius = rho / sqrt(b)
                direction(&state, ndim, dvec)
                for a in range(ndim):
                    cand[a] = pos[a] + radius * dvec[a]
                if not dom_contains(dkind, df, di, du8, ndim, cand):
                    break
                for a in range(ndim):
                    pos[a] = cand[a]
            else:
                truncated += 1
            out[i] = acc
    return truncated
