import pytest

from dendron import nerves as NV
from dendron import operads as OP


@pytest.fixture(scope="session")
def omega_site_22():
    return NV.build_omega_site(2, 2, mode="full")


@pytest.fixture(scope="session")
def omega_site_32():
    return NV.build_omega_site(3, 2, mode="full")


@pytest.fixture(scope="session")
def forest_site_3():
    return NV.build_forest_site(3, 3, max_edges=3, mode="full")


@pytest.fixture(scope="session")
def ass4():
    return OP.ass_operad(4)


@pytest.fixture(scope="session")
def comm4():
    return OP.comm_operad(4)
