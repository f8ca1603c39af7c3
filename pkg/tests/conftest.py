import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "petrel",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("petrel")


@pytest.fixture(autouse=True)
def _no_ambient_seed(monkeypatch):
    monkeypatch.delenv("PETREL_SEED", raising=False)
