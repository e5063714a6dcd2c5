import numpy as np
import pytest

import diracgs as dg


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def grid8():
    return dg.Grid(n=8, L=6.0)


@pytest.fixture(scope="session")
def model8():
    return dg.default_model(n=8, L=6.0)


@pytest.fixture(scope="session")
def model16():
    return dg.default_model()


@pytest.fixture(scope="session")
def solved8(model8):
    """One quick converged ground state shared by the slower unit tests."""
    opts = dg.SolveOptions(tol_outer=1e-6, starts=2, max_outer=400, seed=0)
    return dg.minimize_ground_state(model8, opts)
