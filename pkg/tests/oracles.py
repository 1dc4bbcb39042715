"""Independent reference implementations used only as test oracles.

Everything here is written the slow, obvious way (explicit loops, symbol-level
enumeration) so library results can be checked against code that shares no
vectorized path with them.
"""

from itertools import product

import numpy as np

from macwtap.adversary import observe, zspace_for
from macwtap.channels import Model


def product_joint(p1, k1, p2, k2, main, wtap=None):
    """Element-by-element product build of the full joint table."""
    n_u1, n_x1 = k1.shape
    n_u2, n_x2 = k2.shape
    n_y = main.shape[-1]
    if wtap is None:
        out = np.zeros((n_u1, n_u2, n_x1, n_x2, n_y))
        for u1, u2, x1, x2, y in product(
            range(n_u1), range(n_u2), range(n_x1), range(n_x2), range(n_y)
        ):
            out[u1, u2, x1, x2, y] = p1[u1] * p2[u2] * k1[u1, x1] * k2[u2, x2] * main[x1, x2, y]
        return out
    n_v = wtap.shape[-1]
    out = np.zeros((n_u1, n_u2, n_x1, n_x2, n_y, n_v))
    for u1, u2, x1, x2, y, v in product(
        range(n_u1), range(n_u2), range(n_x1), range(n_x2), range(n_y), range(n_v)
    ):
        out[u1, u2, x1, x2, y, v] = (
            p1[u1] * p2[u2] * k1[u1, x1] * k2[u2, x2] * main[x1, x2, y] * wtap[x1, x2, v]
        )
    return out


def sequences(k, n):
    return list(product(range(k), repeat=n))


def obs_dist(strat, aux, spec):
    """Per-(u1seq, u2seq) observation distribution by full enumeration.

    Sums over codeword sequences (and noisy-observation sequences for the
    generalized model) using the symbol-level ``observe`` map; returns a dict
    (m1, m2) -> {observation code: probability}.
    """
    n = strat.n
    k1, k2 = aux.k_x1_u1.table, aux.k_x2_u2.table
    zs = zspace_for(strat, spec)
    u1s = sequences(aux.sizes[0], n)
    u2s = sequences(aux.sizes[1], n)
    x1s = sequences(spec.alph_x1, n)
    x2s = sequences(spec.alph_x2, n)
    vs = sequences(spec.alph_v, n) if spec.model is Model.GENERALIZED else [None]
    out = {}
    for m1, u1 in enumerate(u1s):
        for m2, u2 in enumerate(u2s):
            dist = {}
            for x1 in x1s:
                px1 = np.prod([k1[u1[i], x1[i]] for i in range(n)])
                if px1 == 0:
                    continue
                for x2 in x2s:
                    px2 = np.prod([k2[u2[i], x2[i]] for i in range(n)])
                    if px2 == 0:
                        continue
                    for v in vs:
                        pv = 1.0
                        if v is not None:
                            pv = np.prod(
                                [spec.wtap.table[x1[i], x2[i], v[i]] for i in range(n)]
                            )
                            if pv == 0:
                                continue
                        z = zs.encode(observe(x1, x2, v, strat).symbols)
                        dist[z] = dist.get(z, 0.0) + px1 * px2 * pv
            out[(m1, m2)] = dist
    return out


def convolve_self_info(letter_dists, gamma, decimals=9):
    """P(sum of per-position self-informations > gamma), by convolution.

    ``letter_dists`` is a list of (value, prob) iterables, one per position;
    values merge on a rounded grid.
    """
    acc = {0.0: 1.0}
    for dist in letter_dists:
        nxt = {}
        for v0, p0 in acc.items():
            for v, p in dist:
                key = round(v0 + v, decimals)
                nxt[key] = nxt.get(key, 0.0) + p0 * p
        acc = nxt
    return sum(p for v, p in acc.items() if v > gamma)


def self_info_letters(probs):
    """(self-information, probability) pairs of one discrete distribution."""
    return [(-np.log2(p), p) for p in probs if p > 0]


def pentagon_inside(a, b, c, r1, r2):
    return r1 >= 0 and r2 >= 0 and r1 <= a and r2 <= b and r1 + r2 <= c


def polygon_violation(corners, point):
    """Signed distance of ``point`` outside the ccw polygon ``corners``."""
    pts = [(p.r1, p.r2) for p in corners]
    if len(pts) == 1:
        return max(abs(point[0] - pts[0][0]), abs(point[1] - pts[0][1]))
    worst = -np.inf
    m = len(pts)
    for i in range(m):
        x0, y0 = pts[i]
        x1, y1 = pts[(i + 1) % m]
        ex, ey = x1 - x0, y1 - y0
        norm = np.hypot(ex, ey)
        if norm == 0:
            continue
        worst = max(worst, -(ex * (point[1] - y0) - ey * (point[0] - x0)) / norm)
    return worst
