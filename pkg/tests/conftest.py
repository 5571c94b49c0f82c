import pytest

from fraudgame import ModelParams, build_mixed, build_pure

R = 0.05
M_PURE = 3.0
M_MIXED = 5.0


@pytest.fixture(scope="session")
def pure_eq():
    return build_pure(R, M_PURE)


@pytest.fixture(scope="session")
def mixed_eq():
    return build_mixed(R, M_MIXED)


@pytest.fixture(scope="session")
def pure_params():
    return ModelParams(r=R, M=M_PURE, p=0.3)


@pytest.fixture(scope="session")
def mixed_params():
    return ModelParams(r=R, M=M_MIXED, p=0.3)
