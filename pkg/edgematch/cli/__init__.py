import asyncio
import sys
import typing as t

from pydantic import ValidationError

from edgematch.cli.model import RunConfig
from edgematch.cli.routes import create_parser, create_routers
from edgematch.exceptions import BaseCustomException
from edgematch.log import configure_logging, get_logger
from edgematch.status import ExitCode

logger = get_logger(__name__)


async def run(config: RunConfig, settings=None) -> int:
    from edgematch import get_edgematch_config, setup_service_manager

    try:
        settings = settings if settings is not None else get_edgematch_config()
        configure_logging(settings)
        await setup_service_manager(settings)
        command = create_routers().get(config.command.value)
        return int(await command.handler(config, settings))
    except BaseCustomException as e:
        logger.error("%s %s", e, e.info)
        return int(e.exit_code)


def main(argv: t.Optional[t.Sequence[str]] = None) -> int:
    parser = create_parser(create_routers())
    args = parser.parse_args(argv)
    try:
        config = RunConfig.from_namespace(args)
    except ValidationError as e:
        for error in e.errors():
            sys.stderr.write(f"edgematch: {error['msg']}\n")
        return int(ExitCode.CONTRACT_VIOLATION)
    return asyncio.run(run(config))
