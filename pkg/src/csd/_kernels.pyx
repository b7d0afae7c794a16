# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled per-period fusion statistics over a block of trials."""

import numpy as np

from libc.math cimport NAN, fabs, sqrt

cdef enum:
    MAX_NODES = 256


def filtered_statistics(const double[:, :, ::1] llr, const double[::1] mu,
                        double z_thr, bint apply_filter=True,
                        double degenerate_spread=1e-12):
    """Fused LLR after Z-score filtering for every (trial, period).

    ``llr[b, t, i]`` is node ``i``'s cumulative LLR after ``t + 1`` periods
    of trial ``b``. Returns a ``(trials, periods)`` array; NaN marks periods
    where every report was removed.
    """
    cdef Py_ssize_t n_trials = llr.shape[0]
    cdef Py_ssize_t n_periods = llr.shape[1]
    cdef Py_ssize_t n = llr.shape[2]
    if mu.shape[0] != n:
        raise ValueError("mu length does not match the node axis")
    if n > MAX_NODES:
        raise ValueError("too many nodes for the compiled kernel")
    out = np.empty((n_trials, n_periods), dtype=np.float64)
    cdef double[:, ::1] res = out
    cdef double xs[MAX_NODES]
    cdef double total, acc, mean, std, d, scale, stat, per
    cdef Py_ssize_t b, t, i, kept

    total = 0.0
    for i in range(n):
        total += mu[i]

    with nogil:
        for b in range(n_trials):
            for t in range(n_periods):
                if not apply_filter:
                    stat = 0.0
                    for i in range(n):
                        stat += llr[b, t, i]
                    res[b, t] = stat
                    continue
                per = <double>(t + 1)
                acc = 0.0
                scale = 0.0
                for i in range(n):
                    xs[i] = llr[b, t, i] / (mu[i] * per)
                    acc += mu[i] * xs[i]
                    if fabs(xs[i]) > scale:
                        scale = fabs(xs[i])
                mean = acc / total
                acc = 0.0
                for i in range(n):
                    d = xs[i] - mean
                    acc += mu[i] * d * d
                std = sqrt(acc / total)
                stat = 0.0
                kept = 0
                if std <= degenerate_spread * scale:
                    for i in range(n):
                        stat += llr[b, t, i]
                    kept = n
                else:
                    for i in range(n):
                        if fabs((xs[i] - mean) / std) <= z_thr:
                            stat += llr[b, t, i]
                            kept += 1
                res[b, t] = stat if kept > 0 else NAN
    return out
