import numpy as np
import pytest

from goldens import golden_compositions as _golden_compositions


@pytest.fixture(scope="session")
def golden_compositions():
    return _golden_compositions()


@pytest.fixture(scope="session")
def planar_2dof(golden_compositions):
    return golden_compositions["planar"]


@pytest.fixture(scope="session")
def spatial_3dof(golden_compositions):
    return golden_compositions["spatial"]


@pytest.fixture(scope="session")
def twisted_3dof(golden_compositions):
    return golden_compositions["twisted"]


@pytest.fixture(scope="session")
def wrist_3dof(golden_compositions):
    return golden_compositions["wrist"]


@pytest.fixture(scope="session")
def intersecting_3dof(golden_compositions):
    return golden_compositions["intersecting"]


@pytest.fixture(scope="session")
def vertical_farm_3dof(golden_compositions):
    return golden_compositions["vertical_farm"]


def random_q(comp, rng):
    limits = comp.joint_limits_rad()
    return rng.uniform(limits[:, 0], limits[:, 1])


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
