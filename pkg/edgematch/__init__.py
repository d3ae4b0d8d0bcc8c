from edgematch.config import init_config
from edgematch.service import Service


def get_edgematch_config():
    return init_config(service_name="edgematch")


async def setup_service_manager(config):
    # registers the solver services before configuring them
    import edgematch.lp.service  # noqa: F401
    import edgematch.oracle.service  # noqa: F401
    import edgematch.sdp.service  # noqa: F401

    await Service.init(config)
