from __future__ import annotations

import warnings

import pytest

from captool.api import create_app
from captool.fixtures import case_a_portfolio, volte_portfolio
from captool.service import PortfolioService


def _client(service: PortfolioService):
    # Imported lazily: fastapi.testclient warns about the httpx shim at import
    # time in this environment.
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient
    return TestClient(create_app(service))


@pytest.fixture
def volte_service() -> PortfolioService:
    return PortfolioService(volte_portfolio())


@pytest.fixture
def volte_client(volte_service):
    return _client(volte_service)


@pytest.fixture
def case_a_client():
    return _client(PortfolioService(case_a_portfolio()))
