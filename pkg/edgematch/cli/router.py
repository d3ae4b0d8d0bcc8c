import typing as t

Handler = t.Callable[..., t.Awaitable[int]]
Argument = t.Tuple[t.Tuple[str, ...], t.Dict[str, t.Any]]


def argument(*flags: str, **kwargs) -> Argument:
    return flags, kwargs


class Command(t.NamedTuple):
    name: str
    handler: Handler
    help: str
    arguments: t.Tuple[Argument, ...]


class CommandRouter:
    """Collects sub-commands the way an HTTP router collects endpoints."""

    def __init__(self):
        self.commands: t.Dict[str, Command] = {}

    def command(self, name: str, help: str = "", arguments: t.Sequence[Argument] = ()):
        def decorator(handler: Handler) -> Handler:
            self.commands[name] = Command(name, handler, help, tuple(arguments))
            return handler

        return decorator

    def include_router(self, other: "CommandRouter"):
        for name, command in other.commands.items():
            if name in self.commands:
                raise ValueError(f"command '{name}' registered twice")
            self.commands[name] = command

    def get(self, name: str) -> Command:
        try:
            return self.commands[name]
        except KeyError:
            raise ValueError(f"Command '{name}' not found.")
