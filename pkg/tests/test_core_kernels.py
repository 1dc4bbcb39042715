import numpy as np
import pytest

from macwtap import _core
from macwtap._core import _pykernels, available_backends, pack_letters
from macwtap._tables import digit_table


def _random_workload(rng, m1=8, m2=8, n=3, zsizes=(2, 1, 3), dims=(2, 2, 2, 2)):
    p1 = rng.dirichlet(np.ones(m1))
    p2 = rng.dirichlet(np.ones(m2))
    W1, W2, F1, F2 = dims
    w1 = rng.integers(0, W1, m1)
    f1 = rng.integers(0, F1, m1)
    w2 = rng.integers(0, W2, m2)
    f2 = rng.integers(0, F2, m2)
    d1 = rng.integers(0, 2, (m1, n)).astype(np.uint8)
    d2 = rng.integers(0, 2, (m2, n)).astype(np.uint8)
    tensors = []
    for zi in zsizes:
        t = rng.random((2, 2, zi))
        t /= t.sum(axis=-1, keepdims=True)
        tensors.append(t)
    letters, zarr = pack_letters(tensors)
    return (p1, p2, w1, f1, w2, f2, W1, W2, F1, F2, d1, d2, letters, zarr)


def _loop_oracle(args):
    p1, p2, w1, f1, w2, f2, W1, W2, F1, F2, d1, d2, letters, zsizes = args
    zsize = int(np.prod(zsizes))
    out = np.zeros(W1 * W2 * F1 * F2 * zsize)
    m1, n = d1.shape
    m2 = d2.shape[0]
    for a in range(m1):
        for b in range(m2):
            cell = ((w1[a] * W2 + w2[b]) * F1 + f1[a]) * F2 + f2[b]
            dist = np.ones(1)
            for i in range(n):
                zi = int(zsizes[i])
                dist = np.outer(dist, letters[i, d1[a, i], d2[b, i], :zi]).ravel()
            out[cell * zsize : (cell + 1) * zsize] += p1[a] * p2[b] * dist
    return out


def test_python_kernel_matches_loop_oracle(rng):
    args = _random_workload(rng)
    got = _pykernels.joint_wfz(*args)
    want = _loop_oracle(args)
    assert got.shape == want.shape
    assert np.abs(got - want).max() < 1e-14
    assert got.sum() == pytest.approx(1.0, abs=1e-12)


@pytest.mark.skipif("compiled" not in available_backends(), reason="extension not built")
def test_backends_agree(rng):
    compiled = available_backends()["compiled"]
    for trial in range(5):
        args = _random_workload(rng, m1=16, m2=8, n=4, zsizes=(2, 1, 4, 1), dims=(2, 4, 2, 1))
        a = _pykernels.joint_wfz(*args)
        b = compiled.joint_wfz(*args)
        assert np.abs(a - b).max() < 1e-13


def test_pair_loglik_matches_loop(rng):
    d1 = rng.integers(0, 2, (6, 4)).astype(np.uint8)
    d2 = rng.integers(0, 2, (5, 4)).astype(np.uint8)
    ylog = rng.standard_normal((4, 2, 2))
    got = _pykernels.pair_loglik(d1, d2, ylog)
    for a in range(6):
        for b in range(5):
            want = sum(ylog[i, d1[a, i], d2[b, i]] for i in range(4))
            assert got[a, b] == pytest.approx(want, abs=1e-12)


@pytest.mark.skipif("compiled" not in available_backends(), reason="extension not built")
def test_pair_loglik_backends_agree(rng):
    compiled = available_backends()["compiled"]
    d1 = rng.integers(0, 3, (7, 5)).astype(np.uint8)
    d2 = rng.integers(0, 3, (9, 5)).astype(np.uint8)
    ylog = np.log(rng.random((5, 3, 3)))
    assert np.allclose(_pykernels.pair_loglik(d1, d2, ylog),
                       compiled.pair_loglik(d1, d2, ylog), atol=1e-13)


def test_backend_name_is_reported():
    assert _core.BACKEND in ("compiled", "python")
    assert _core.BACKEND in available_backends()


def test_digit_table_big_endian():
    d = digit_table(3, 2)
    assert d.shape == (8, 3)
    assert list(d[1]) == [0, 0, 1]
    assert list(d[4]) == [1, 0, 0]
