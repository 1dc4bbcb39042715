"""Array helpers for sequence-indexed probability tables.

Length-n sequences over an alphabet of size k are indexed big-endian:
sequence (d_1, ..., d_n) maps to m = sum_i d_i * k**(n-i), so position 1 is
the most significant digit and index 0 is the all-zero sequence.
"""

from __future__ import annotations

import numpy as np


def digit_table(n: int, base: int) -> np.ndarray:
    """(base**n, n) uint8 array of per-position symbols, big-endian."""
    m = base**n
    idx = np.arange(m)
    out = np.empty((m, n), dtype=np.uint8)
    for i in range(n - 1, -1, -1):
        out[:, i] = idx % base
        idx = idx // base
    return out


def sequence_probs(p: np.ndarray, n: int) -> np.ndarray:
    """i.i.d. product probability of every length-n sequence over pmf ``p``."""
    p = np.asarray(p, dtype=np.float64)
    digits = digit_table(n, p.size)
    return np.prod(p[digits], axis=1)


def marginal(table: np.ndarray, keep: tuple[int, ...]) -> np.ndarray:
    """Sum out every axis not in ``keep``; result axes follow ``keep`` order."""
    keep = tuple(keep)
    drop = tuple(ax for ax in range(table.ndim) if ax not in keep)
    out = table.sum(axis=drop) if drop else table
    kept_sorted = sorted(keep)
    perm = tuple(kept_sorted.index(ax) for ax in keep)
    return np.transpose(out, perm) if perm != tuple(range(len(keep))) else out
