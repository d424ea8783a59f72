import numpy as np
import pytest

from hillproj import BoundaryCondition, make_example, zero_potential


@pytest.fixture(scope="session")
def mathieu():
    return make_example("mathieu", [1.0])


@pytest.fixture(scope="session")
def delta_comb_pi():
    return make_example("delta_comb", [np.pi, 100])


@pytest.fixture(scope="session")
def delta_comb_small():
    return make_example("delta_comb", [1.0, 8])


@pytest.fixture(scope="session")
def zero_spec():
    return zero_potential()


@pytest.fixture(params=list(BoundaryCondition), ids=lambda bc: bc.value)
def any_bc(request):
    return request.param
