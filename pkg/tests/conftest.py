import numpy as np
import pytest

import compclass as cc


@pytest.fixture(scope="session")
def case_i_model():
    # N=64, L=11, r=14: designed transition at 10, random at 15.
    return cc.synthetic_model(64, 11, 14, np.random.default_rng(11))


@pytest.fixture(scope="session")
def case_ii_model():
    # N=64, L=12, r=9: both transitions at 10.
    return cc.synthetic_model(64, 12, 9, np.random.default_rng(12))


@pytest.fixture(scope="session")
def two_class_model():
    return cc.synthetic_model(64, 2, 14, np.random.default_rng(42))
