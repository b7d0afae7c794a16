"""Numpy implementation of the fusion kernel, used when the extension is absent.

Node-axis reductions are written as explicit left-to-right loops so results
match the compiled kernel bit for bit.
"""

import numpy as np


def filtered_statistics(llr, mu, z_thr, apply_filter=True, degenerate_spread=1e-12):
    llr = np.ascontiguousarray(llr, dtype=np.float64)
    mu = np.ascontiguousarray(mu, dtype=np.float64)
    n_trials, n_periods, n = llr.shape
    if mu.shape[0] != n:
        raise ValueError("mu length does not match the node axis")

    if not apply_filter:
        stat = np.zeros((n_trials, n_periods))
        for i in range(n):
            stat += llr[:, :, i]
        return stat

    per = np.arange(1, n_periods + 1, dtype=np.float64)
    xs = [llr[:, :, i] / (mu[i] * per) for i in range(n)]
    total = 0.0
    for i in range(n):
        total += mu[i]
    acc = np.zeros((n_trials, n_periods))
    scale = np.zeros((n_trials, n_periods))
    for i in range(n):
        acc += mu[i] * xs[i]
        np.maximum(scale, np.abs(xs[i]), out=scale)
    mean = acc / total
    acc = np.zeros((n_trials, n_periods))
    for i in range(n):
        d = xs[i] - mean
        acc += mu[i] * d * d
    std = np.sqrt(acc / total)

    degenerate = std <= degenerate_spread * scale
    safe_std = np.where(degenerate, 1.0, std)
    stat = np.zeros((n_trials, n_periods))
    kept = np.zeros((n_trials, n_periods), dtype=np.int64)
    for i in range(n):
        keep = degenerate | (np.abs((xs[i] - mean) / safe_std) <= z_thr)
        stat += np.where(keep, llr[:, :, i], 0.0)
        kept += keep
    stat[kept == 0] = np.nan
    return stat
