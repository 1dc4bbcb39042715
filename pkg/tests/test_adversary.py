import math
from itertools import islice

import numpy as np
import pytest

from conftest import bsc_aux, random_aux

from macwtap.adversary import (
    Strategy,
    enumerate_strategies,
    letter_code,
    observation_kernel,
    observe,
    strategy_count,
    zspace_for,
)
from macwtap.channels import AuxInput, Model
from macwtap.errors import CapExceeded, DimensionMismatch, ValidationError
from macwtap.limits import Caps
from oracles import obs_dist


def test_counts_small():
    assert strategy_count(Model.MODEL1, 4, 2) == 24
    assert strategy_count(Model.MODEL2, 4, 2) == 6
    assert strategy_count(Model.MODEL3, 5, 0) == 1
    assert len(list(enumerate_strategies(Model.MODEL1, 4, 2))) == 24
    assert len(list(enumerate_strategies(Model.MODEL2, 4, 2))) == 6
    only = list(enumerate_strategies(Model.MODEL3, 5, 0))
    assert only == [Strategy(Model.MODEL3, 5, ())]


def test_enumeration_order_and_uniqueness():
    strategies = list(enumerate_strategies(Model.MODEL1, 3, 2))
    assert len(set(strategies)) == len(strategies)
    keys = [(s.positions, s.decisions) for s in strategies]
    assert keys == sorted(keys)
    head = list(islice(enumerate_strategies(Model.MODEL1, 3, 2), 2))
    assert head[0] == Strategy(Model.MODEL1, 3, (1, 2), (1, 1))
    assert head[1] == Strategy(Model.MODEL1, 3, (1, 2), (1, 2))


def test_cap_refusal_names_requirement():
    tight = Caps(max_strategies=10)
    with pytest.raises(CapExceeded) as err:
        list(enumerate_strategies(Model.MODEL1, 4, 2, caps=tight))
    assert err.value.required == 24
    assert err.value.cap == 10


def test_strategy_validation():
    with pytest.raises(ValidationError):
        Strategy(Model.MODEL3, 3, (2, 1))
    with pytest.raises(ValidationError):
        Strategy(Model.MODEL1, 3, (1,))
    with pytest.raises(ValidationError):
        Strategy(Model.MODEL2, 3, (1,), (1,))
    with pytest.raises(ValidationError):
        Strategy(Model.MODEL1, 3, (1,), (3,))


def test_strategy_json_roundtrip():
    s = Strategy(Model.MODEL1, 5, (2, 4), (1, 2))
    assert Strategy.from_jsonable(s.to_jsonable()) == s


def test_observe_model3():
    s = Strategy(Model.MODEL3, 3, (1, 3))
    obs = observe((0, 1, 0), (1, 1, 0), None, s)
    assert obs.symbols == (("pair", 0, 1), ("erased",), ("pair", 0, 0))


def test_observe_model2():
    s = Strategy(Model.MODEL2, 2, (2,))
    obs = observe((1, 1), (0, 1), None, s)
    assert obs.symbols == (("erased",), ("sum", 2))


def test_observe_model1():
    s = Strategy(Model.MODEL1, 2, (1,), (2,))
    obs = observe((0, 0), (1, 0), None, s)
    assert obs.symbols == (("user", 2, 1), ("erased",))


def test_observe_validation():
    s = Strategy(Model.MODEL3, 3, (1,))
    with pytest.raises(DimensionMismatch):
        observe((0, 1), (0, 1, 0), None, s)
    g = Strategy(Model.GENERALIZED, 2, (1,))
    with pytest.raises(ValidationError):
        observe((0, 1), (0, 1), None, g)


def test_erasure_positions_follow_strategy(noiseless_spec):
    s = Strategy(Model.MODEL3, 4, (2, 3))
    obs = observe((0, 1, 0, 1), (1, 0, 1, 0), None, s)
    for i, sym in enumerate(obs.symbols, start=1):
        assert (sym == ("erased",)) == (i not in s.positions)


def test_letter_codes(gen_spec):
    assert letter_code(("pair", 1, 0), gen_spec) == 2
    assert letter_code(("v", 1), gen_spec) == 5
    m1 = gen_spec.with_model(Model.MODEL1)
    assert letter_code(("user", 1, 1), m1) == 1
    assert letter_code(("user", 2, 0), m1) == 2
    assert letter_code(("erased",), m1) == 4


def test_zspace_roundtrip(gen_spec):
    s = Strategy(Model.GENERALIZED, 3, (2,))
    zs = zspace_for(s, gen_spec)
    assert zs.size == 2 * 4 * 2
    for idx in range(zs.size):
        assert zs.encode(zs.decode(idx)) == idx


def test_kernel_mu_zero_all_erasure(noiseless_spec, rng):
    aux = random_aux(rng, noiseless_spec)
    s = Strategy(Model.MODEL3, 3, ())
    k = observation_kernel(s, aux, noiseless_spec, 3)
    assert k.output_size == 1
    assert np.allclose(k.table, 1.0)


def test_kernel_full_tap_identity_aux(noiseless_spec):
    aux = AuxInput.identity(noiseless_spec)
    n = 2
    s = Strategy(Model.MODEL3, n, (1, 2))
    k = observation_kernel(s, aux, noiseless_spec, n)
    zs = zspace_for(s, noiseless_spec)
    table = k.table.reshape(4, 4, zs.size)
    # deterministic tap of everything: one observation per (u1seq, u2seq)
    assert np.array_equal(np.sort(table, axis=None), np.sort(np.eye(16).ravel(), axis=None))
    for m1 in range(4):
        for m2 in range(4):
            assert np.isclose(table[m1, m2].max(), 1.0)


@pytest.mark.parametrize("model", [Model.MODEL1, Model.MODEL2, Model.MODEL3, Model.GENERALIZED])
def test_kernel_matches_symbol_oracle(model, rng, noiseless_spec, gen_spec):
    spec = gen_spec if model is Model.GENERALIZED else noiseless_spec.with_model(model)
    aux = bsc_aux(0.2)
    n = 2
    strategies = list(enumerate_strategies(model, n, 1))
    for s in strategies:
        k = observation_kernel(s, aux, spec, n).table
        want = obs_dist(s, aux, spec)
        for (m1, m2), dist in want.items():
            row = np.zeros(k.shape[-1])
            for z, p in dist.items():
                row[z] = p
            assert np.abs(k[m1, m2] - row).max() < 1e-12


def test_kernel_marginals_match_single_letter(gen_spec, rng):
    aux = random_aux(rng, gen_spec)
    n = 3
    s = Strategy(Model.GENERALIZED, n, (2,))
    k = observation_kernel(s, aux, gen_spec, n).table
    zs = zspace_for(s, gen_spec)
    m1, m2 = aux.sizes
    table = k.reshape(m1, m1, m1, m2, m2, m2, *zs.radices)
    from macwtap.channels import concat_aux

    pair = np.einsum("ua,vb->uvab", aux.k_x1_u1.table, aux.k_x2_u2.table).reshape(m1, m2, 4)
    v_t = concat_aux(aux, gen_spec, "wtap").table
    # tapped position 2 pushes the pair image
    got_tap = table.sum(axis=(6, 8))  # marginalize the v letters
    for u1 in range(m1):
        for u2 in range(m2):
            assert np.allclose(got_tap[0, u1, 0, 0, u2, 0], pair[u1, u2], atol=1e-12)
    # untapped position 1 pushes the noisy-observation image
    got_v1 = table.sum(axis=(7, 8))
    for u1 in range(m1):
        for u2 in range(m2):
            assert np.allclose(got_v1[u1, 0, 0, u2, 0, 0], v_t[u1, u2], atol=1e-12)


def test_counts_closed_form_all_n():
    for n in range(0, 13):
        for mu in range(0, n + 1):
            assert strategy_count(Model.MODEL1, n, mu) == math.comb(n, mu) * 2**mu
            assert strategy_count(Model.MODEL2, n, mu) == math.comb(n, mu)
    # model1 count stays below the strategy-budget bound
    for n in range(1, 13):
        for mu in range(0, n + 1):
            alpha = mu / n
            assert strategy_count(Model.MODEL1, n, mu) < 2 ** ((1 + alpha) * n)