import numpy as np
import pytest

from conftest import random_aux, random_spec
from oracles import pentagon_inside, polygon_violation

from macwtap.channels import AuxInput, CondKernel, Model, Pmf
from macwtap.rate_regions import (
    RatePair,
    RegionPoly,
    check_inclusion,
    optimize_hull,
    region_generalized,
    region_model1,
    region_model2,
    region_model3,
)


def test_model1_noiseless_identity(noiseless_spec):
    aux = AuxInput.identity(noiseless_spec)
    poly = region_model1(aux, noiseless_spec)
    assert poly.bounds() == pytest.approx((0.5, 0.5, 1.0), abs=1e-12)


def test_alpha_zero_drops_penalty(noiseless_spec, rng):
    aux = random_aux(rng, noiseless_spec)
    spec0 = noiseless_spec.with_alpha(0.0)
    p1 = region_model1(aux, spec0)
    p2 = region_model2(aux, spec0.with_model(Model.MODEL2))
    assert p1.bounds() == pytest.approx(p2.bounds(), abs=1e-12)


def test_alpha_one_noiseless_identity_kills_rates(noiseless_spec):
    aux = AuxInput.identity(noiseless_spec)
    poly = region_model1(aux, noiseless_spec.with_alpha(1.0))
    assert poly.bounds() == pytest.approx((0.0, 0.0, 0.0), abs=1e-12)


def test_model2_noiseless_identity(noiseless_spec):
    spec = noiseless_spec.with_model(Model.MODEL2)
    aux = AuxInput.identity(spec)
    poly = region_model2(aux, spec)
    assert poly.r1_max == pytest.approx(0.75, abs=1e-12)
    assert poly.r2_max == pytest.approx(0.75, abs=1e-12)


def test_model2_degenerate_second_user_matches_model1(noiseless_spec, rng):
    # X2 a point mass makes the superposition invertible for user 1
    aux = AuxInput(
        Pmf(rng.dirichlet(np.ones(2))),
        CondKernel(rng.dirichlet(np.ones(2), size=2)),
        Pmf(np.array([1.0])),
        CondKernel(np.array([[1.0, 0.0]])),
    )
    spec2 = noiseless_spec.with_model(Model.MODEL2)
    a_m2 = region_model2(aux, spec2).r1_max
    a_m1 = region_model1(aux, noiseless_spec).r1_max
    assert a_m2 == pytest.approx(a_m1, abs=1e-12)


def test_model3_equals_model1_random(rng):
    for _ in range(25):
        spec = random_spec(rng, Model.MODEL1, alpha=float(rng.uniform(0, 1)))
        aux = random_aux(rng, spec)
        b1 = region_model1(aux, spec).bounds()
        b3 = region_model3(aux, spec.with_model(Model.MODEL3)).bounds()
        assert b1 == pytest.approx(b3, abs=1e-12)


def test_generalized_constant_v_equals_model3(rng, gen_spec):
    for _ in range(10):
        aux = random_aux(rng, gen_spec)
        const_v = gen_spec.with_model(Model.MODEL3)
        b3 = region_model3(aux, const_v).bounds()
        wtap_const = CondKernel(np.ones((2, 2, 1)))
        from macwtap.channels import MacWiretapSpec

        spec_cv = MacWiretapSpec(2, 2, 4, 1, gen_spec.main, wtap_const,
                                 Model.GENERALIZED, gen_spec.alpha)
        bg = region_generalized(aux, spec_cv).bounds()
        assert b3 == pytest.approx(bg, abs=1e-12)


def test_generalized_alpha_zero_reduces_to_untapped_region(rng, gen_spec):
    from macwtap.channels import concat_aux
    from macwtap.info_measures import cond_mutual_info, mutual_info

    spec0 = gen_spec.with_alpha(0.0)
    for _ in range(10):
        aux = random_aux(rng, spec0)
        got = region_generalized(aux, spec0)
        jy = aux.p_u1.probs[:, None, None] * aux.p_u2.probs[None, :, None] * concat_aux(
            aux, spec0, "main"
        ).table
        jv = aux.p_u1.probs[:, None, None] * aux.p_u2.probs[None, :, None] * concat_aux(
            aux, spec0, "wtap"
        ).table
        a = cond_mutual_info(jy, ((0,), (2,), (1,))) - mutual_info(jv, ((0,), (2,)))
        b = cond_mutual_info(jy, ((1,), (2,), (0,))) - mutual_info(jv, ((1,), (2,)))
        c = mutual_info(jy, ((0, 1), (2,))) - mutual_info(jv, ((0, 1), (2,)))
        want = (max(0.0, a), max(0.0, b), max(0.0, c))
        assert got.bounds() == pytest.approx(want, abs=1e-12)


def test_generalized_noiseless_wiretap_kills_rates(noiseless_spec):
    # wiretapper sees the pair losslessly everywhere
    from macwtap.channels import MacWiretapSpec

    wtap = CondKernel(np.eye(4).reshape(2, 2, 4))
    spec = MacWiretapSpec(2, 2, 4, 4, noiseless_spec.main, wtap, Model.GENERALIZED, 0.5)
    aux = AuxInput.identity(spec)
    assert region_generalized(aux, spec).bounds() == pytest.approx((0, 0, 0), abs=1e-12)


def test_bound_monotone_in_alpha(rng):
    spec = random_spec(rng, Model.MODEL1)
    aux = random_aux(rng, spec)
    alphas = np.linspace(0, 1, 6)
    prev = None
    for a in alphas:
        b = region_model1(aux, spec.with_alpha(float(a))).bounds()
        if prev is not None:
            assert all(x <= y + 1e-12 for x, y in zip(b, prev))
        prev = b


def test_pentagon_corners_match_grid(rng):
    for _ in range(40):
        a, b, c = rng.uniform(0, 1.2, size=3)
        poly = RegionPoly(a, b, c)
        corners = poly.corners()
        xmax = max(a, b, 1e-9)
        cell = xmax / 200
        xs = np.linspace(0, xmax, 201)
        for x in xs[::20]:
            for y in xs[::20]:
                inside = pentagon_inside(a, b, c, x, y)
                viol = polygon_violation(corners, (x, y))
                if inside:
                    assert viol <= cell * 1.5
                elif viol <= -cell * 1.5:
                    pytest.fail(f"polygon claims deep interior point {x, y} outside grid region")
        # every corner satisfies the constraints exactly
        for pt in corners:
            assert poly.violation(pt) <= 1e-12


def test_corner_enumeration_shapes():
    assert len(RegionPoly(0, 0, 0).corners()) == 1
    assert len(RegionPoly(1, 1, 3).corners()) == 4  # sum constraint slack
    assert len(RegionPoly(1, 1, 1.5).corners()) == 5
    assert len(RegionPoly(1, 1, 0.5).corners()) == 3


def test_optimize_hull_budget_one_is_identity_pentagon(noiseless_spec):
    hull = optimize_hull(noiseless_spec, budget=1, seed=0)
    poly = region_model3(AuxInput.identity(noiseless_spec), noiseless_spec)
    got = sorted((v.r1, v.r2) for v in hull.vertices)
    want = sorted((p.r1, p.r2) for p in poly.corners())
    assert got == pytest.approx(want, abs=1e-12)


def test_optimize_hull_contains_identity_sum_rate(noiseless_spec):
    hull = optimize_hull(noiseless_spec, budget=200, seed=1)
    assert hull.max_sum_rate() >= 1.0 - 1e-9
    assert hull.contains(RatePair(0.5, 0.5), tol=1e-9)


def test_optimize_hull_monotone_in_budget(noiseless_spec):
    small = optimize_hull(noiseless_spec, budget=20, seed=7)
    big = optimize_hull(noiseless_spec, budget=60, seed=7)
    res = check_inclusion(small, big)
    assert res.included, res.max_violation


def test_hull_monotone_in_alpha(noiseless_spec):
    h_high = optimize_hull(noiseless_spec.with_alpha(0.6), budget=40, seed=3)
    h_low = optimize_hull(noiseless_spec.with_alpha(0.4), budget=40, seed=3)
    res = check_inclusion(h_high, h_low)
    assert res.included, res.max_violation


def test_check_inclusion_basics(rng):
    spec = random_spec(rng, Model.MODEL1)
    aux = random_aux(rng, spec)
    poly = region_model1(aux, spec)
    assert check_inclusion(poly, poly).included
    shrunk = RegionPoly(0.9 * poly.r1_max, 0.9 * poly.r2_max, 0.9 * poly.sum_max)
    assert check_inclusion(shrunk, poly).included
    if poly.sum_max > 0.01:
        grown = RegionPoly(poly.r1_max + 0.1, poly.r2_max + 0.1, poly.sum_max + 0.2)
        res = check_inclusion(grown, poly)
        assert not res.included
        assert res.max_violation > 0.05


def test_model1_included_in_model2(rng):
    for _ in range(100):
        spec = random_spec(rng, Model.MODEL1, alpha=float(rng.uniform(0, 1)))
        aux = random_aux(rng, spec)
        p1 = region_model1(aux, spec)
        p2 = region_model2(aux, spec.with_model(Model.MODEL2))
        assert all(
            x <= y + 1e-9 for x, y in zip(p1.bounds(), p2.bounds())
        ), (p1.bounds(), p2.bounds())
        assert check_inclusion(p1, p2).included
