import os

import pytest
import pytest_asyncio

os.environ["EDGEMATCH_ENVIRONMENT"] = "test"


@pytest.fixture
def get_service():
    from edgematch.service import Service

    def _get_service(service_name):
        return Service.get(service_name)

    return _get_service


@pytest.fixture(scope="session")
def edgematch_config():
    from edgematch.config import init_config
    os.environ["EDGEMATCH_ENVIRONMENT"] = "test"
    return init_config()


@pytest_asyncio.fixture
async def services(edgematch_config):
    from edgematch import setup_service_manager
    await setup_service_manager(edgematch_config)
    yield edgematch_config
