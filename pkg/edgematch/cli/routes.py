import argparse

from edgematch.cli.bench import router as bench_router
from edgematch.cli.generate import router as generate_router
from edgematch.cli.model import Method
from edgematch.cli.render import router as render_router
from edgematch.cli.router import CommandRouter
from edgematch.cli.solve import router as solve_router

SHARED_ARGUMENTS = [
    (("--method",), dict(choices=[method.value for method in Method])),
    (("--max-iter",), dict(type=int, dest="max_iter")),
    (("--tol",), dict(type=float)),
    (("--degree-cap",), dict(type=int, dest="degree_cap")),
    (("--seed",), dict(type=int)),
    (("--rotations",), dict(type=int)),
    (("--out",), dict()),
]


def create_routers() -> CommandRouter:
    cli = CommandRouter()

    router_configs = [
        (cli, generate_router),
        (cli, solve_router),
        (cli, render_router),
        (cli, bench_router),
    ]

    for p, c in router_configs:
        p.include_router(c)

    return cli


def create_parser(router: CommandRouter) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="edgematch", description="Polynomial relaxations for edge-matching puzzles")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, command in router.commands.items():
        sub = subparsers.add_parser(name, help=command.help)
        for flags, kwargs in SHARED_ARGUMENTS + list(command.arguments):
            sub.add_argument(*flags, **kwargs)
        sub.set_defaults(command=name)
    return parser
