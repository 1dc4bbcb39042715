"""Achievable-rate pentagons per auxiliary input, hulls across inputs.

Each auxiliary distribution yields a pentagon {0 <= R1 <= a, 0 <= R2 <= b,
R1 + R2 <= c}; the achievable region for a channel is the convex hull of the
pentagons over all auxiliary inputs, realized here as the 2-D hull of the
evaluated pentagon corners (time sharing between evaluated points).

Per-user bounds subtract a tapping penalty proportional to alpha:

* model1 / model3:  a = I(U1;Y|U2) - alpha I(U1;X1), symmetrically for b,
  c = I(U1,U2;Y) - alpha I(U1,U2;X1,X2).
* model2: the penalties are against the superposition X1+X2.
* generalized: a = I(U1;Y|U2) - I(U1;V) - alpha I(U1;X1|V), etc.

Negative bounds clamp to 0 (only the zero rate remains for that direction),
so the origin is always a member.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import (
    AuxInput,
    CondKernel,
    MacWiretapSpec,
    Model,
    Pmf,
    concat_aux,
    sum_kernel,
)
from .errors import ValidationError
from .info_measures import Bits, cond_mutual_info, mutual_info
from .seeds import DOMAIN_AUX, stream

_DEDUP_TOL = 1e-12


@dataclass(frozen=True)
class RatePair:
    r1: Bits
    r2: Bits

    def __post_init__(self):
        if self.r1 < 0 or self.r2 < 0:
            raise ValidationError(f"negative rate pair ({self.r1}, {self.r2})")


@dataclass(frozen=True)
class RegionPoly:
    """One pentagon: {(R1, R2): 0 <= R1 <= a, 0 <= R2 <= b, R1 + R2 <= c}."""

    r1_max: Bits
    r2_max: Bits
    sum_max: Bits

    def __post_init__(self):
        if min(self.r1_max, self.r2_max, self.sum_max) < 0:
            raise ValidationError("pentagon bounds must be clamped at 0")

    def corners(self) -> list[RatePair]:
        """Vertices, counterclockwise from the origin, no duplicates."""
        a, b, c = self.r1_max, self.r2_max, self.sum_max
        a_eff = min(a, c)
        b_eff = min(b, c)
        raw = [
            (0.0, 0.0),
            (a_eff, 0.0),
            (a_eff, min(b, c - a_eff)),
            (min(a, c - b_eff), b_eff),
            (0.0, b_eff),
        ]
        out: list[RatePair] = []
        for x, y in raw:
            if not any(abs(x - p.r1) <= _DEDUP_TOL and abs(y - p.r2) <= _DEDUP_TOL for p in out):
                out.append(RatePair(x, y))
        return out

    def violation(self, point: RatePair) -> float:
        """Largest constraint excess of ``point``; <= 0 means inside."""
        return max(
            point.r1 - self.r1_max,
            point.r2 - self.r2_max,
            point.r1 + point.r2 - self.sum_max,
            -point.r1,
            -point.r2,
        )

    def contains(self, point: RatePair, tol: float = 1e-9) -> bool:
        return self.violation(point) <= tol

    def bounds(self) -> tuple[Bits, Bits, Bits]:
        return (self.r1_max, self.r2_max, self.sum_max)


@dataclass(frozen=True)
class RegionHull:
    """Convex hull of evaluated rate pairs with per-vertex provenance.

    ``provenance[i]`` is the index of the auxiliary input that produced
    ``vertices[i]`` (-1 for the origin), and ``aux_by_id`` maps those indices
    to the inputs themselves.
    """

    vertices: tuple[RatePair, ...]
    provenance: tuple[int, ...]
    aux_by_id: dict[int, AuxInput]

    def violation(self, point: RatePair) -> float:
        """Signed distance outside the hull polygon (<= 0 means inside)."""
        pts = [(v.r1, v.r2) for v in self.vertices]
        if len(pts) == 1:
            return max(abs(point.r1 - pts[0][0]), abs(point.r2 - pts[0][1]))
        if len(pts) == 2:
            return _segment_distance(pts[0], pts[1], (point.r1, point.r2))
        worst = -np.inf
        m = len(pts)
        for i in range(m):
            x0, y0 = pts[i]
            x1, y1 = pts[(i + 1) % m]
            ex, ey = x1 - x0, y1 - y0
            norm = float(np.hypot(ex, ey))
            if norm <= _DEDUP_TOL:
                continue
            # ccw polygon: inside points have nonnegative cross product
            cross = ex * (point.r2 - y0) - ey * (point.r1 - x0)
            worst = max(worst, -cross / norm)
        return float(worst)

    def contains(self, point: RatePair, tol: float = 1e-9) -> bool:
        return self.violation(point) <= tol

    def max_sum_rate(self) -> Bits:
        return max(v.r1 + v.r2 for v in self.vertices)


def _segment_distance(a: tuple[float, float], b: tuple[float, float], p: tuple[float, float]) -> float:
    ax, ay = a
    bx, by = b
    px, py = p
    ex, ey = bx - ax, by - ay
    denom = ex * ex + ey * ey
    t = 0.0 if denom == 0.0 else max(0.0, min(1.0, ((px - ax) * ex + (py - ay) * ey) / denom))
    cx, cy = ax + t * ex, ay + t * ey
    return float(np.hypot(px - cx, py - cy))


@dataclass(frozen=True)
class InclusionResult:
    included: bool
    max_violation: float


def _clamp(x: float) -> float:
    return x if x > 0.0 else 0.0


def _y_joint(aux: AuxInput, spec: MacWiretapSpec) -> np.ndarray:
    ky = concat_aux(aux, spec, "main").table
    return aux.p_u1.probs[:, None, None] * aux.p_u2.probs[None, :, None] * ky


def _main_bounds(aux: AuxInput, spec: MacWiretapSpec) -> tuple[Bits, Bits, Bits]:
    juv = _y_joint(aux, spec)  # axes (u1, u2, y)
    i1 = cond_mutual_info(juv, ((0,), (2,), (1,)))
    i2 = cond_mutual_info(juv, ((1,), (2,), (0,)))
    i12 = mutual_info(juv, ((0, 1), (2,)))
    return i1, i2, i12


def region_model1(aux: AuxInput, spec: MacWiretapSpec) -> RegionPoly:
    """Pentagon with per-user penalties against the user's own codeword."""
    i1, i2, i12 = _main_bounds(aux, spec)
    jx1 = aux.p_u1.probs[:, None] * aux.k_x1_u1.table
    jx2 = aux.p_u2.probs[:, None] * aux.k_x2_u2.table
    p1 = mutual_info(jx1, ((0,), (1,)))
    p2 = mutual_info(jx2, ((0,), (1,)))
    jx12 = np.einsum("ua,vb->uvab", jx1, jx2)
    p12 = mutual_info(jx12, ((0, 1), (2, 3)))
    alpha = spec.alpha
    return RegionPoly(
        _clamp(i1 - alpha * p1), _clamp(i2 - alpha * p2), _clamp(i12 - alpha * p12)
    )


def region_model2(aux: AuxInput, spec: MacWiretapSpec) -> RegionPoly:
    """Pentagon with penalties against the superposition of the codewords."""
    i1, i2, i12 = _main_bounds(aux, spec)
    ksum = sum_kernel(spec.alph_x1, spec.alph_x2)
    jt = np.einsum(
        "u,v,ua,vb,abt->uvt",
        aux.p_u1.probs,
        aux.p_u2.probs,
        aux.k_x1_u1.table,
        aux.k_x2_u2.table,
        ksum,
    )
    p1 = mutual_info(jt, ((0,), (2,)))
    p2 = mutual_info(jt, ((1,), (2,)))
    p12 = mutual_info(jt, ((0, 1), (2,)))
    alpha = spec.alpha
    return RegionPoly(
        _clamp(i1 - alpha * p1), _clamp(i2 - alpha * p2), _clamp(i12 - alpha * p12)
    )


def region_generalized(aux: AuxInput, spec: MacWiretapSpec) -> RegionPoly:
    """Pentagon for the noisy-observation wiretapper."""
    if spec.wtap is None:
        raise ValidationError("generalized region needs a wiretap kernel")
    i1, i2, i12 = _main_bounds(aux, spec)
    jv = np.einsum(
        "u,v,ua,vb,abw->uvabw",
        aux.p_u1.probs,
        aux.p_u2.probs,
        aux.k_x1_u1.table,
        aux.k_x2_u2.table,
        spec.wtap.table,
    )  # axes (u1, u2, x1, x2, v)
    iv1 = mutual_info(jv, ((0,), (4,)))
    iv2 = mutual_info(jv, ((1,), (4,)))
    iv12 = mutual_info(jv, ((0, 1), (4,)))
    px1 = cond_mutual_info(jv, ((0,), (2,), (4,)))
    px2 = cond_mutual_info(jv, ((1,), (3,), (4,)))
    px12 = cond_mutual_info(jv, ((0, 1), (2, 3), (4,)))
    alpha = spec.alpha
    return RegionPoly(
        _clamp(i1 - iv1 - alpha * px1),
        _clamp(i2 - iv2 - alpha * px2),
        _clamp(i12 - iv12 - alpha * px12),
    )


def _const_v_spec(spec: MacWiretapSpec) -> MacWiretapSpec:
    return MacWiretapSpec(
        spec.alph_x1,
        spec.alph_x2,
        spec.alph_y,
        1,
        spec.main,
        CondKernel.constant(spec.alph_x1, spec.alph_x2),
        Model.GENERALIZED,
        spec.alpha,
    )


def region_model3(aux: AuxInput, spec: MacWiretapSpec) -> RegionPoly:
    """Pentagon for the both-symbols wiretapper.

    Evaluated through the generalized region with a constant (single-letter)
    noisy observation, the degeneration that recovers this attack model.
    """
    return region_generalized(aux, _const_v_spec(spec))


_REGION_FN = {
    Model.MODEL1: region_model1,
    Model.MODEL2: region_model2,
    Model.MODEL3: region_model3,
    Model.GENERALIZED: region_generalized,
}


def region_for(aux: AuxInput, spec: MacWiretapSpec) -> RegionPoly:
    return _REGION_FN[spec.model](aux, spec)


# ---------------------------------------------------------------------------
# search over auxiliary inputs


def _sample_aux(spec: MacWiretapSpec, seed: int, idx: int, n_u1: int, n_u2: int) -> AuxInput:
    """Deterministic auxiliary input #idx for a master seed.

    Index 0 is the identity input and index 1 the uninformative one; higher
    indices draw every simplex from a flat Dirichlet.  The stream depends only
    on (seed, idx), so budget prefixes are shared between runs.
    """
    if idx == 0:
        return AuxInput.identity(spec)
    if idx == 1:
        return AuxInput.uniform_outputs(spec)
    rng = stream(seed, DOMAIN_AUX, idx)
    p1 = rng.dirichlet(np.ones(n_u1))
    k1 = rng.dirichlet(np.ones(spec.alph_x1), size=n_u1)
    p2 = rng.dirichlet(np.ones(n_u2))
    k2 = rng.dirichlet(np.ones(spec.alph_x2), size=n_u2)
    return AuxInput(Pmf(p1), CondKernel(k1), Pmf(p2), CondKernel(k2))


def _monotone_chain(points: list[tuple[float, float, int]]) -> list[tuple[float, float, int]]:
    """2-D convex hull, counterclockwise; input sorted before hulling.

    Coincident points keep the smallest provenance index.
    """
    best: dict[tuple[float, float], int] = {}
    for x, y, i in points:
        key = (x, y)
        best[key] = min(best.get(key, i), i)
    pts = sorted((x, y, i) for (x, y), i in best.items())
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def optimize_hull(
    spec: MacWiretapSpec,
    budget: int,
    seed: int,
    n_u1: int | None = None,
    n_u2: int | None = None,
    jobs: int = 1,
) -> RegionHull:
    """Hull of pentagon corners over ``budget`` auxiliary evaluations.

    Evaluation ``i`` uses the deterministic auxiliary stream keyed by
    ``(seed, i)``, so a run with a larger budget evaluates a superset of any
    smaller run with the same seed and its hull contains the smaller hull.
    Evaluations are independent; the hull is reduced in index order, so the
    result does not depend on ``jobs``.  Auxiliary alphabet sizes default to
    the channel input alphabets.
    """
    if budget < 1:
        raise ValidationError("budget must be >= 1")
    n_u1 = spec.alph_x1 if n_u1 is None else n_u1
    n_u2 = spec.alph_x2 if n_u2 is None else n_u2

    def evaluate(idx: int) -> tuple[AuxInput, list[RatePair]]:
        aux = _sample_aux(spec, seed, idx, n_u1, n_u2)
        return aux, region_for(aux, spec).corners()

    if jobs <= 1:
        evaluated = [evaluate(i) for i in range(budget)]
    else:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            evaluated = list(pool.map(evaluate, range(budget)))
    points: list[tuple[float, float, int]] = [(0.0, 0.0, -1)]
    aux_by_id: dict[int, AuxInput] = {}
    for idx, (aux, corners) in enumerate(evaluated):
        aux_by_id[idx] = aux
        for corner in corners:
            points.append((corner.r1, corner.r2, idx))
    hull = _monotone_chain(points)
    vertices = tuple(RatePair(x, y) for x, y, _ in hull)
    provenance = tuple(i for _, _, i in hull)
    used = {i for i in provenance if i >= 0}
    return RegionHull(vertices, provenance, {i: aux_by_id[i] for i in sorted(used)})


def check_inclusion(inner, outer, tol: float = 1e-9) -> InclusionResult:
    """Whether every vertex of ``inner`` lies in ``outer`` within ``tol``."""
    if isinstance(inner, RegionPoly):
        pts = inner.corners()
    else:
        pts = list(inner.vertices)
    worst = 0.0
    for p in pts:
        worst = max(worst, outer.violation(p))
    return InclusionResult(worst <= tol, worst)


# ---------------------------------------------------------------------------
# export

HULL_CSV_COLUMNS = ("alpha", "model", "R1", "R2", "aux_id")


def hull_csv_rows(hull: RegionHull, spec: MacWiretapSpec) -> list[tuple]:
    return [
        (spec.alpha, spec.model.value, v.r1, v.r2, prov)
        for v, prov in zip(hull.vertices, hull.provenance)
    ]


def hull_to_jsonable(hull: RegionHull, spec: MacWiretapSpec) -> dict:
    return {
        "alpha": spec.alpha,
        "model": spec.model.value,
        "vertices": [
            {"R1": v.r1, "R2": v.r2, "aux_id": prov}
            for v, prov in zip(hull.vertices, hull.provenance)
        ],
        "aux_inputs": {str(i): aux.to_jsonable() for i, aux in hull.aux_by_id.items()},
    }
