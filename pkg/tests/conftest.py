import pytest

from covario.geometry import Disk, Polygon, SupportBody, convex_hull


@pytest.fixture
def unit_square():
    return Polygon([(0, 0), (1, 0), (1, 1), (0, 1)])


@pytest.fixture
def centered_square():
    return Polygon([(-0.5, -0.5), (0.5, -0.5), (0.5, 0.5), (-0.5, 0.5)])


@pytest.fixture
def unit_disk():
    return Disk((0.0, 0.0), 1.0)


@pytest.fixture
def cw3():
    # constant-width test body: h = 1 + 0.05 cos(3 theta)
    return SupportBody(1.0, ((0.0, 0.0), (0.0, 0.0), (0.05, 0.0)))


@pytest.fixture
def make_polygon():
    def make(rng, n_points=8, box=1.0):
        return Polygon(convex_hull(rng.uniform(-box, box, size=(n_points, 2))))

    return make
