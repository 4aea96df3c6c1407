import pytest
from fastapi.testclient import TestClient

from focus360_sidecar import SidecarConfig, create_app


@pytest.fixture
def client():
    config = SidecarConfig(
        mode="mock", disc_lon=0.0, disc_lat=0.0, disc_radius=0.3, track_step=0.12
    )
    with TestClient(create_app(config)) as c:
        yield c


@pytest.fixture
def model_client():
    with TestClient(create_app(SidecarConfig(mode="model"))) as c:
        yield c
