# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled search kernel for the per-packet phase-distortion fit.

Mirrors the control flow of ``_profile_py.minimize_profile``; see that
module for the definition of the profiled objective.
"""

from libc.math cimport atan2, ceil, cos, fabs, fmod, sin, sqrt

cdef double TWO_PI = 6.283185307179586476925286766559
cdef double PI = 3.1415926535897932384626433832795
cdef double TINY = 1e-300


cdef struct ProfilePoint:
    double f
    double fp
    double fpp
    double off


cdef ProfilePoint _eval(double x, double s0,
                        double[::1] s_re, double[::1] s_im,
                        double[::1] q, double[::1] t_re, double[::1] t_im,
                        double b, double off_lo, double off_hi) noexcept nogil:
    cdef ProfilePoint out
    cdef Py_ssize_t nd = s_re.shape[0]
    cdef Py_ssize_t nq = q.shape[0]
    cdef Py_ssize_t k
    cdef double a = s0, ap = 0.0, app = 0.0
    cdef double cr = 0.0, ci = 0.0, c1r = 0.0, c1i = 0.0, c2r = 0.0, c2i = 0.0
    cdef double d, cd, sd, er, ei, qa
    cdef double amp, phase, n0, off_cand, dv, d2v
    cdef double v_lo, v_hi, v, w

    for k in range(nd):
        d = <double>(k + 1)
        cd = cos(x * d)
        sd = sin(x * d)
        a += 2.0 * (s_re[k] * cd - s_im[k] * sd)
        ap += -2.0 * d * (s_re[k] * sd + s_im[k] * cd)
        app += -2.0 * d * d * (s_re[k] * cd - s_im[k] * sd)

    for k in range(nq):
        qa = q[k]
        cd = cos(x * qa)
        sd = sin(x * qa)
        er = t_re[k] * cd - t_im[k] * sd
        ei = t_re[k] * sd + t_im[k] * cd
        cr += er
        ci += ei
        c1r += -qa * ei
        c1i += qa * er
        c2r += -qa * qa * er
        c2i += -qa * qa * ei

    amp = sqrt(cr * cr + ci * ci)
    phase = atan2(ci, cr)
    n0 = ceil((off_lo + phase) / TWO_PI)
    off_cand = -phase + TWO_PI * n0

    if off_cand <= off_hi + 1e-15 and amp > TINY:
        dv = (cr * c1r + ci * c1i) / amp
        d2v = (c1r * c1r + c1i * c1i + cr * c2r + ci * c2i) / amp - dv * dv / amp
        out.f = a + b - 2.0 * amp
        out.fp = ap - 2.0 * dv
        out.fpp = app - 2.0 * d2v
        out.off = off_cand
    elif amp <= TINY:
        out.f = a + b
        out.fp = ap
        out.fpp = app
        w = 0.0
        if w < off_lo:
            w = off_lo
        if w > off_hi:
            w = off_hi
        out.off = w
    else:
        v_lo = cos(off_lo) * cr - sin(off_lo) * ci
        v_hi = cos(off_hi) * cr - sin(off_hi) * ci
        if v_hi > v_lo:
            w = off_hi
            v = v_hi
        else:
            w = off_lo
            v = v_lo
        dv = cos(w) * c1r - sin(w) * c1i
        d2v = cos(w) * c2r - sin(w) * c2i
        out.f = a + b - 2.0 * v
        out.fp = ap - 2.0 * dv
        out.fpp = app - 2.0 * d2v
        out.off = w
    return out


def minimize_profile(double s0,
                     double[::1] s_re, double[::1] s_im,
                     double[::1] q, double[::1] t_re, double[::1] t_im,
                     double b,
                     double slope_lo, double slope_hi,
                     double off_lo, double off_hi,
                     int n_intervals, int max_iters, double tol):
    """Globally minimize the profiled objective over the slope support.

    Returns (slope, offset, value, interval_index, iterations).
    """
    cdef ProfilePoint el, er, e
    cdef double best_f, best_x, int_f, int_x
    cdef double xl, xr, lo, hi, x, xn, width
    cdef int i, it, iters, best_interval, best_iters
    cdef bint have_best = False

    if slope_hi <= slope_lo:
        e = _eval(slope_lo, s0, s_re, s_im, q, t_re, t_im, b, off_lo, off_hi)
        return slope_lo, e.off, e.f, 0, 0

    width = (slope_hi - slope_lo) / n_intervals
    best_f = 0.0
    best_x = slope_lo
    best_interval = 0
    best_iters = 0

    for i in range(n_intervals):
        xl = slope_lo + width * i
        xr = slope_hi if i == n_intervals - 1 else slope_lo + width * (i + 1)
        el = _eval(xl, s0, s_re, s_im, q, t_re, t_im, b, off_lo, off_hi)
        er = _eval(xr, s0, s_re, s_im, q, t_re, t_im, b, off_lo, off_hi)
        if el.f <= er.f:
            int_f = el.f
            int_x = xl
        else:
            int_f = er.f
            int_x = xr
        iters = 0

        if el.fp < 0.0 and er.fp > 0.0:
            lo = xl
            hi = xr
            x = 0.5 * (xl + xr)
            for it in range(max_iters):
                e = _eval(x, s0, s_re, s_im, q, t_re, t_im, b, off_lo, off_hi)
                iters += 1
                if e.f < int_f:
                    int_f = e.f
                    int_x = x
                if e.fp < 0.0:
                    lo = x
                else:
                    hi = x
                if e.fpp > 0.0:
                    xn = x - e.fp / e.fpp
                    if not (lo < xn < hi):
                        xn = 0.5 * (lo + hi)
                else:
                    xn = 0.5 * (lo + hi)
                if fabs(xn - x) < tol:
                    x = xn
                    e = _eval(x, s0, s_re, s_im, q, t_re, t_im, b, off_lo, off_hi)
                    iters += 1
                    if e.f < int_f:
                        int_f = e.f
                        int_x = x
                    break
                x = xn

        if not have_best or int_f < best_f:
            have_best = True
            best_f = int_f
            best_x = int_x
            best_interval = i
            best_iters = iters

    e = _eval(best_x, s0, s_re, s_im, q, t_re, t_im, b, off_lo, off_hi)
    best_interval = <int>((best_x - slope_lo) / width)
    if best_interval < 0:
        best_interval = 0
    if best_interval > n_intervals - 1:
        best_interval = n_intervals - 1
    return best_x, e.off, e.f, best_interval, best_iters
