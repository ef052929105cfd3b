"""Pytest configuration and shared fixtures."""
import pytest

from src.lab.gallery import gallery_domain
from src.lab.meshing import triangulate
from src.settings import settings


@pytest.fixture(autouse=True)
def _restore_settings():
    """Let tests lower grid sizes freely; every setting is restored afterwards."""
    saved = settings.model_dump()
    yield
    for key, value in saved.items():
        setattr(settings, key, value)


@pytest.fixture
def fast_settings():
    """Coarser radial and rearrangement grids so suite-level tests stay quick."""
    settings.LAB_N_LEVELS = 256
    settings.LAB_RADIAL_GRID = 1024
    settings.LAB_EIGEN_GRID = 1024
    settings.LAB_N_RADII = 64
    settings.LAB_HL_SUBSETS = 20
    settings.LAB_SOURCE_H = 0.2
    settings.LAB_DISK_SIDES = 64
    return settings


@pytest.fixture
def square():
    return gallery_domain("square")


@pytest.fixture
def square_weighted():
    return gallery_domain("square", l=-1.0, beta=0.5)


@pytest.fixture
def lshape():
    return gallery_domain("lshape", l=-0.5, beta=2.0)


@pytest.fixture
def disk64():
    return gallery_domain("ngon:64:1")


@pytest.fixture
def square_mesh(square):
    return triangulate(square, 0.25)


@pytest.fixture
def weighted_mesh(square_weighted):
    return triangulate(square_weighted, 0.25)
