"""Exact Shannon quantities on finite tables, in bits (log base 2).

The 0 log 0 = 0 convention applies throughout.  Joint-table operations take a
``split`` of axis groups identifying the variables; axes not mentioned are
marginalized out first.
"""

from __future__ import annotations

import math

import numpy as np

from ._tables import marginal
from .channels import Pmf
from .errors import ValidationError

Bits = float

#: divergence reported when absolute continuity fails (p > 0 where q = 0)
INFINITE_DIVERGENCE = math.inf


def _as_table(p) -> np.ndarray:
    if isinstance(p, Pmf):
        return p.probs
    return np.asarray(p, dtype=np.float64)


def _check_split(ndim: int, groups: tuple[tuple[int, ...], ...]) -> None:
    seen: set[int] = set()
    for g in groups:
        for ax in g:
            if not 0 <= ax < ndim:
                raise ValidationError(f"axis {ax} outside table of {ndim} axes")
            if ax in seen:
                raise ValidationError(f"axis {ax} appears in two groups")
            seen.add(ax)


def entropy(p) -> Bits:
    """H(p) of the whole table."""
    a = _as_table(p).ravel()
    logs = np.zeros_like(a)
    np.log2(a, out=logs, where=a > 0)
    return float(-np.dot(a, logs)) + 0.0


def cond_entropy(joint, split: tuple[tuple[int, ...], tuple[int, ...]]) -> Bits:
    """H(A | B) for axis groups ``split = (a_axes, b_axes)``."""
    a_axes, b_axes = tuple(split[0]), tuple(split[1])
    t = _as_table(joint)
    _check_split(t.ndim, (a_axes, b_axes))
    hab = entropy(marginal(t, a_axes + b_axes))
    hb = entropy(marginal(t, b_axes)) if b_axes else 0.0
    return hab - hb


def mutual_info(joint, split: tuple[tuple[int, ...], tuple[int, ...]]) -> Bits:
    """I(A ; B) for axis groups ``split = (a_axes, b_axes)``."""
    a_axes, b_axes = tuple(split[0]), tuple(split[1])
    t = _as_table(joint)
    _check_split(t.ndim, (a_axes, b_axes))
    ha = entropy(marginal(t, a_axes))
    hb = entropy(marginal(t, b_axes))
    hab = entropy(marginal(t, a_axes + b_axes))
    return ha + hb - hab


def cond_mutual_info(
    joint, split: tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]
) -> Bits:
    """I(A ; B | C) for axis groups ``split = (a_axes, b_axes, c_axes)``."""
    a_axes, b_axes, c_axes = tuple(split[0]), tuple(split[1]), tuple(split[2])
    t = _as_table(joint)
    _check_split(t.ndim, (a_axes, b_axes, c_axes))
    hac = entropy(marginal(t, a_axes + c_axes))
    hbc = entropy(marginal(t, b_axes + c_axes))
    habc = entropy(marginal(t, a_axes + b_axes + c_axes))
    hc = entropy(marginal(t, c_axes)) if c_axes else 0.0
    return hac + hbc - habc - hc


def binary_entropy(x: float) -> Bits:
    """H_b(x) = -x log2 x - (1-x) log2(1-x), with H_b(0) = H_b(1) = 0."""
    if not 0.0 <= x <= 1.0:
        raise ValidationError(f"binary_entropy argument {x} outside [0, 1]")
    if x == 0.0 or x == 1.0:
        return 0.0
    return float(-x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x))


def kl_divergence(p, q) -> Bits:
    """D(p || q) in bits; INFINITE_DIVERGENCE if p puts mass where q has none."""
    a, b = _as_table(p), _as_table(q)
    if a.shape != b.shape:
        raise ValidationError(f"support mismatch {a.shape} vs {b.shape}")
    mask = a > 0
    if np.any(b[mask] == 0):
        return INFINITE_DIVERGENCE
    an, bn = a[mask], b[mask]
    return float((an * (np.log2(an) - np.log2(bn))).sum())


def total_variation(p, q) -> float:
    """Total variation distance, one half the L1 difference."""
    a, b = _as_table(p), _as_table(q)
    if a.shape != b.shape:
        raise ValidationError(f"support mismatch {a.shape} vs {b.shape}")
    return float(0.5 * np.abs(a - b).sum())
