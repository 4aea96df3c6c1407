import pytest

from focus360.geom import RasterDims


@pytest.fixture
def small_dims() -> RasterDims:
    return RasterDims(64, 32)
