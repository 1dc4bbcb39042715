"""Numpy implementations of the kernel core.

Same contracts as the compiled twin; chunked over the first sequence axis to
bound peak memory while staying vectorized.
"""

from __future__ import annotations

import numpy as np

_CHUNK_TARGET = 4_000_000  # floats materialized per chunk


def joint_wfz(p1, p2, w1, f1, w2, f2, W1, W2, F1, F2, d1, d2, letters, zsizes):
    """Exact joint over (W1, W2, F1, F2, Z), flat with Z fastest.

    Parameters mirror the compiled kernel: per-sequence probabilities ``p1``,
    ``p2``; bin maps ``w1``, ``f1``, ``w2``, ``f2``; bin counts; per-position
    symbol digits ``d1``, ``d2`` of shape (M, n); packed observation tensors
    ``letters`` of shape (n, A1, A2, zmax) with per-position supports
    ``zsizes``.
    """
    p1 = np.asarray(p1, dtype=np.float64)
    p2 = np.asarray(p2, dtype=np.float64)
    m1, m2 = p1.size, p2.size
    n = len(zsizes)
    zsize = int(np.prod(zsizes, dtype=np.int64))
    total = int(W1) * int(W2) * int(F1) * int(F2) * zsize
    out = np.zeros(total, dtype=np.float64)

    w1 = np.asarray(w1, dtype=np.int64)
    f1 = np.asarray(f1, dtype=np.int64)
    w2 = np.asarray(w2, dtype=np.int64)
    f2 = np.asarray(f2, dtype=np.int64)

    chunk = max(1, int(_CHUNK_TARGET // max(1, m2 * zsize)))
    zoff = np.arange(zsize, dtype=np.int64)
    for lo in range(0, m1, chunk):
        hi = min(m1, lo + chunk)
        rows = hi - lo
        zd = np.ones((rows, m2, 1), dtype=np.float64)
        for i in range(n):
            zi = int(zsizes[i])
            step = letters[i, d1[lo:hi, i][:, None], d2[:, i][None, :], :zi]
            zd = (zd[:, :, :, None] * step[:, :, None, :]).reshape(rows, m2, -1)
        weights = (p1[lo:hi, None] * p2[None, :])[:, :, None] * zd
        cell = ((w1[lo:hi, None] * W2 + w2[None, :]) * F1 + f1[lo:hi, None]) * F2 + f2[None, :]
        idx = cell[:, :, None] * zsize + zoff[None, None, :]
        out += np.bincount(idx.ravel(), weights=weights.ravel(), minlength=total)
    return out


def pair_loglik(d1, d2, ylog):
    """Sum over positions of ylog[i, d1[m1, i], d2[m2, i]], shape (M1, M2)."""
    m1, n = d1.shape
    m2 = d2.shape[0]
    out = np.zeros((m1, m2), dtype=np.float64)
    for i in range(n):
        out += ylog[i][d1[:, i][:, None], d2[:, i][None, :]]
    return out
