import os
import pathlib

import dynaconf

from edgematch.exceptions import ConfigurationError

get_env = os.environ.get


def init_config(
        service_name: str = "edgematch",
        default_file_name: str = "default.toml"
):
    """
    Loads `config/<service_name>/`: `default.toml` holds every solver constant under
    `[default.*]`, and the other TOML files there overlay per-environment sections
    (`dev`, `test`, `prod`) picked by EDGEMATCH_ENVIRONMENT. Single keys can be
    overridden from the shell with the EDGEMATCH_ prefix, e.g. EDGEMATCH_LP__MAX_ITER=50.

    # Usage
    ```
    settings = init_config()
    settings.LP.MAX_ITER # Use uppercase
    ```
    """

    source_dir = pathlib.Path(os.path.dirname(__file__)).parent.absolute()
    file_path = os.path.join(source_dir, "config", service_name)
    env = get_env("EDGEMATCH_ENVIRONMENT", "dev")

    try:
        conf = dynaconf.Dynaconf(
            preload=[os.path.join(file_path, default_file_name)],
            settings_files=[os.path.join(file_path, file) for file in sorted(os.listdir(file_path))],
            environments=["dev", "prod", "test"],
            env=env,
            envvar_prefix="EDGEMATCH",
            load_dotenv=False,
            merge_enabled=True,
        )
    except Exception as e:
        raise ConfigurationError(
            "Failed to load configuration",
            {"path": file_path, "env": env, "error": str(e)}
        )
    return conf


def worker_count(config) -> int:
    threads = get_env("EDGEMATCH_THREADS")
    if threads:
        try:
            return max(1, int(threads))
        except ValueError:
            raise ConfigurationError(
                "EDGEMATCH_THREADS must be an integer",
                {"EDGEMATCH_THREADS": threads}
            )
    return max(1, int(config.BENCH.THREADS))
