"""Pure-NumPy search kernel for the per-packet phase-distortion fit.

The per-packet negative log-likelihood, profiled over the phase offset,
reduces to

    f(x) = a(x) + b - 2 * V(x)

where ``a`` is a real trigonometric polynomial in the slope ``x`` with
(Hermitian) coefficients ``s``, ``c(x) = sum_m t_m exp(j x q_m)`` and
``V(x)`` is the largest feasible value of Re(exp(j w) c(x)) over the offset
support.  The search partitions the slope support into quarter-period
intervals and runs a bracketed, safeguarded Newton iteration in each.

This module is the fallback twin of the compiled kernel in
``_profile_kernel.pyx``; both implement the same control flow.
"""

from __future__ import annotations

import numpy as np

_TINY = 1e-300


def _wrap(x):
    w = np.mod(np.asarray(x, dtype=float) + np.pi, 2.0 * np.pi)
    w = np.where(w <= 0.0, w + 2.0 * np.pi, w) - np.pi
    return w


def evaluate_profile(x, s0, s_re, s_im, q, t_re, t_im, b, off_lo, off_hi):
    """Vectorized profile evaluation.

    Returns (f, fp, fpp, off) for an array of slope values ``x``: the
    profiled objective, its first two slope derivatives, and the minimizing
    feasible offset at each point.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    d = np.arange(1, s_re.shape[0] + 1, dtype=float)

    e1 = x[:, None] * d[None, :]
    cos1, sin1 = np.cos(e1), np.sin(e1)
    a = s0 + 2.0 * (cos1 @ s_re - sin1 @ s_im)
    ap = -2.0 * (sin1 @ (d * s_re) + cos1 @ (d * s_im))
    app = -2.0 * (cos1 @ (d * d * s_re) - sin1 @ (d * d * s_im))

    e2 = x[:, None] * q[None, :]
    cos2, sin2 = np.cos(e2), np.sin(e2)
    cr = cos2 @ t_re - sin2 @ t_im
    ci = sin2 @ t_re + cos2 @ t_im
    c1r = -(sin2 @ (q * t_re) + cos2 @ (q * t_im))
    c1i = cos2 @ (q * t_re) - sin2 @ (q * t_im)
    c2r = -(cos2 @ (q * q * t_re) - sin2 @ (q * q * t_im))
    c2i = -(sin2 @ (q * q * t_re) + cos2 @ (q * q * t_im))

    amp = np.hypot(cr, ci)
    phase = np.arctan2(ci, cr)

    # Smallest integer n with -phase + 2*pi*n >= off_lo.
    n0 = np.ceil((off_lo + phase) / (2.0 * np.pi))
    off_cand = -phase + 2.0 * np.pi * n0
    interior = (off_cand <= off_hi + 1e-15) & (amp > _TINY)

    f = np.empty_like(a)
    fp = np.empty_like(a)
    fpp = np.empty_like(a)
    off = np.empty_like(a)

    ii = interior
    if np.any(ii):
        dv = (cr[ii] * c1r[ii] + ci[ii] * c1i[ii]) / amp[ii]
        d2v = ((c1r[ii] ** 2 + c1i[ii] ** 2 + cr[ii] * c2r[ii] + ci[ii] * c2i[ii])
               / amp[ii] - dv * dv / amp[ii])
        f[ii] = a[ii] + b - 2.0 * amp[ii]
        fp[ii] = ap[ii] - 2.0 * dv
        fpp[ii] = app[ii] - 2.0 * d2v
        off[ii] = off_cand[ii]

    ee = ~interior
    if np.any(ee):
        degen = ee & (amp <= _TINY)
        if np.any(degen):
            f[degen] = a[degen] + b
            fp[degen] = ap[degen]
            fpp[degen] = app[degen]
            off[degen] = min(max(0.0, off_lo), off_hi)
        edge = ee & ~degen
        if np.any(edge):
            v_lo = np.cos(off_lo) * cr[edge] - np.sin(off_lo) * ci[edge]
            v_hi = np.cos(off_hi) * cr[edge] - np.sin(off_hi) * ci[edge]
            use_hi = v_hi > v_lo
            w = np.where(use_hi, off_hi, off_lo)
            v = np.where(use_hi, v_hi, v_lo)
            dv = np.cos(w) * c1r[edge] - np.sin(w) * c1i[edge]
            d2v = np.cos(w) * c2r[edge] - np.sin(w) * c2i[edge]
            f[edge] = a[edge] + b - 2.0 * v
            fp[edge] = ap[edge] - 2.0 * dv
            fpp[edge] = app[edge] - 2.0 * d2v
            off[edge] = w
    return f, fp, fpp, off


def minimize_profile(s0, s_re, s_im, q, t_re, t_im, b,
                     slope_lo, slope_hi, off_lo, off_hi,
                     n_intervals, max_iters, tol):
    """Globally minimize the profiled objective over the slope support.

    Returns (slope, offset, value, interval_index, iterations).
    """
    args = (s0, s_re, s_im, q, t_re, t_im, b, off_lo, off_hi)

    if slope_hi <= slope_lo:
        f, _, _, off = evaluate_profile(slope_lo, *args)
        return float(slope_lo), float(off[0]), float(f[0]), 0, 0

    k = int(n_intervals)
    edges = np.linspace(slope_lo, slope_hi, k + 1)
    ef, efp, _, _ = evaluate_profile(edges, *args)

    # Endpoint candidates (left edge preferred on ties).
    left_better = ef[:-1] <= ef[1:]
    best_f = np.where(left_better, ef[:-1], ef[1:])
    best_x = np.where(left_better, edges[:-1], edges[1:])

    iters = np.zeros(k, dtype=np.int64)
    active = (efp[:-1] < 0.0) & (efp[1:] > 0.0)
    lo = edges[:-1].copy()
    hi = edges[1:].copy()
    x = 0.5 * (edges[:-1] + edges[1:])
    finishing = np.zeros(k, dtype=bool)

    for _ in range(max_iters + 1):
        if not np.any(active):
            break
        idx = np.nonzero(active)[0]
        f, fp, fpp, _ = evaluate_profile(x[idx], *args)
        iters[idx] += 1

        better = f < best_f[idx]
        best_f[idx[better]] = f[better]
        best_x[idx[better]] = x[idx[better]]

        done = finishing[idx]
        active[idx[done]] = False
        go = ~done
        gi = idx[go]
        if gi.size == 0:
            continue

        neg = fp[go] < 0.0
        lo[gi[neg]] = x[gi[neg]]
        hi[gi[~neg]] = x[gi[~neg]]

        xn = np.where(fpp[go] > 0.0, x[gi] - fp[go] / np.where(fpp[go] > 0.0, fpp[go], 1.0),
                      0.5 * (lo[gi] + hi[gi]))
        inside = (lo[gi] < xn) & (xn < hi[gi])
        xn = np.where(inside, xn, 0.5 * (lo[gi] + hi[gi]))

        conv = np.abs(xn - x[gi]) < tol
        x[gi] = xn
        finishing[gi] = conv
        exhausted = (iters[gi] >= max_iters) & ~conv
        active[gi[exhausted]] = False

    best = int(np.argmin(best_f))
    bx = float(best_x[best])
    f, _, _, off = evaluate_profile(bx, *args)
    width = (slope_hi - slope_lo) / k
    interval_index = int(min(max(int((bx - slope_lo) / width), 0), k - 1))
    return bx, float(off[0]), float(f[0]), interval_index, int(iters[best])
