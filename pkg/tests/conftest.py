"""
Shared Fixtures
"""
import pytest
from fastapi.testclient import TestClient

from app.main import app
from core.testfn import canonical_u, canonical_v

MELLIN_WIDTH = 0.25


@pytest.fixture(scope="session")
def plain_pair():
    """Canonical bumps: v on (1, 2^(3/2)), u even on (-1, 1)"""
    return canonical_v(), canonical_u()


@pytest.fixture(scope="session")
def flat_pair():
    """Flattened family with the default width"""
    return canonical_v(flattened=True), canonical_u(flattened=True)


@pytest.fixture(scope="session")
def mellin_pair():
    """Flattened family narrow enough for Mellin-route checks"""
    return canonical_v(True, MELLIN_WIDTH), canonical_u(True, MELLIN_WIDTH)


@pytest.fixture
def client():
    with TestClient(app) as test_client:
        yield test_client
