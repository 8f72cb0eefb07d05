"""
Shared fixtures: services wired with default tolerances.
"""

import pytest

from src.services.birkhoff_service import BirkhoffService
from src.services.flow_service import FlowService
from src.services.illposedness_service import IllposednessService
from src.services.inverse_service import InverseService
from src.services.lax_service import LaxService
from src.services.probe_service import ProbeService
from src.utils.logging_config import setup_logging


@pytest.fixture(scope="session", autouse=True)
def quiet_logging():
    setup_logging("WARNING")


@pytest.fixture
def lax_service() -> LaxService:
    return LaxService(config={})


@pytest.fixture
def birkhoff_service(lax_service) -> BirkhoffService:
    return BirkhoffService(lax_service=lax_service, config={})


@pytest.fixture
def inverse_service() -> InverseService:
    return InverseService(config={})


@pytest.fixture
def flow_service(lax_service, birkhoff_service, inverse_service) -> FlowService:
    return FlowService(
        lax_service=lax_service,
        birkhoff_service=birkhoff_service,
        inverse_service=inverse_service,
        config={},
    )


@pytest.fixture
def illposedness_service(lax_service, birkhoff_service, inverse_service) -> IllposednessService:
    return IllposednessService(
        lax_service=lax_service,
        birkhoff_service=birkhoff_service,
        inverse_service=inverse_service,
        config={"modes": 64},
    )


@pytest.fixture
def probe_service(birkhoff_service, inverse_service, flow_service) -> ProbeService:
    return ProbeService(
        birkhoff_service=birkhoff_service,
        inverse_service=inverse_service,
        flow_service=flow_service,
        config={"modes": 64, "flow_dt": 1e-4},
    )
