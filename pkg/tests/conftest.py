import numpy as np
import pytest

from macwtap.channels import AuxInput, CondKernel, MacWiretapSpec, Model, Pmf, bundled_spec


def random_aux(rng, spec, n_u1=None, n_u2=None):
    n_u1 = spec.alph_x1 if n_u1 is None else n_u1
    n_u2 = spec.alph_x2 if n_u2 is None else n_u2
    return AuxInput(
        Pmf(rng.dirichlet(np.ones(n_u1))),
        CondKernel(rng.dirichlet(np.ones(spec.alph_x1), size=n_u1)),
        Pmf(rng.dirichlet(np.ones(n_u2))),
        CondKernel(rng.dirichlet(np.ones(spec.alph_x2), size=n_u2)),
    )


def random_spec(rng, model=Model.MODEL1, kx1=2, kx2=2, ky=3, kv=2, alpha=0.5):
    main = CondKernel(rng.dirichlet(np.ones(ky), size=(kx1, kx2)))
    wtap = None
    if model is Model.GENERALIZED:
        wtap = CondKernel(rng.dirichlet(np.ones(kv), size=(kx1, kx2)))
    return MacWiretapSpec(kx1, kx2, ky, kv if wtap else 0, main, wtap, model, alpha)


def bsc_aux(q, k=2):
    flip = CondKernel(np.array([[1 - q, q], [q, 1 - q]]))
    return AuxInput(Pmf.uniform(k), flip, Pmf.uniform(k), flip)


@pytest.fixture(scope="session")
def noiseless_spec():
    return bundled_spec("noiseless_pair")


@pytest.fixture(scope="session")
def bsc_pair_spec():
    return bundled_spec("bsc_pair")


@pytest.fixture(scope="session")
def adder_spec():
    return bundled_spec("adder_superposition")


@pytest.fixture(scope="session")
def gen_spec():
    return bundled_spec("generalized_v")


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
