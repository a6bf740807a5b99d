import math
import os

import numpy as np
import pytest

from fiberqed.constants import C_LIGHT
from fiberqed.dispersion import FiberDispersion, FiberSpec, SellmeierMaterial
from fiberqed.pv import TableCache

LAMBDA_A = 852e-9
R_F = 250e-9


@pytest.fixture(scope="session")
def omega_a():
    return 2.0 * math.pi * C_LIGHT / LAMBDA_A


@pytest.fixture(scope="session")
def lam_a():
    return LAMBDA_A


@pytest.fixture(scope="session")
def fiber():
    return FiberSpec(r_f=R_F)


@pytest.fixture(scope="session")
def vacuum_fiber():
    return FiberSpec(r_f=R_F, material=SellmeierMaterial.vacuum())


@pytest.fixture(scope="session")
def solver(fiber):
    return FiberDispersion(fiber)


@pytest.fixture(scope="session")
def disp(solver, omega_a):
    return solver.solve_beta(omega_a)


@pytest.fixture(scope="session")
def table_cache(tmp_path_factory):
    """Shared spectral-table cache for the whole session.

    Set FIBERQED_TEST_CACHE to a directory to persist tables across runs
    (the acceptance sweeps take ~1 h cold, minutes warm).
    """
    env = os.environ.get("FIBERQED_TEST_CACHE")
    if env:
        return TableCache(env)
    return TableCache(tmp_path_factory.mktemp("tables"))


@pytest.fixture
def rng():
    return np.random.default_rng(20260823)
