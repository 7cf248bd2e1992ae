"""Shared CLI guards: run-config assembly, error mapping and payload output.

Functions here turn flags, environment and config files into a validated
RunConfig, and convert library exceptions into clean exits so the individual
commands stay thin.
"""

import json
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Any

import numpy as np
import typer
import yaml
from pydantic import ValidationError

from entlab.config import (
    ConfigFile,
    RunConfig,
    SeesawConfig,
    Subcommand,
    load_config_file,
    resolve_seed,
    resolve_threads,
)
from entlab.errors import EntlabError, handle_cli_error

# --json value that writes the payload to standard output
STDOUT_PATH = Path("-")


@contextmanager
def domain_errors() -> Iterator[None]:
    """Map library, configuration and I/O errors to a clean exit.

    Raises:
        typer.Exit: With the exit code chosen by handle_cli_error.
    """
    try:
        yield
    except (EntlabError, ValidationError, OSError, ValueError, yaml.YAMLError) as e:
        raise typer.Exit(handle_cli_error(e)) from e


def build_run_config(
    subcommand: Subcommand,
    d: int | None = None,
    seed: int | None = None,
    restarts: int | None = None,
    threads: int | None = None,
    config: Path | None = None,
    json_path: Path | None = None,
    csv_path: Path | None = None,
    svg_path: Path | None = None,
) -> RunConfig:
    """Merge flags, ENTLAB_* variables, .env and an optional YAML file.

    Flags win over the config file; the config file wins over defaults.

    Raises:
        ValidationError: If d is outside the subcommand's range.
        ValueError: If the config file or an environment value is invalid.
    """
    file = load_config_file(config) if config else ConfigFile()
    return RunConfig(
        subcommand=subcommand,
        d=d,
        seed=resolve_seed(seed if seed is not None else _file_seed(file, config)),
        restarts=restarts if restarts is not None else file.seesaw.restarts,
        threads=resolve_threads(threads if threads is not None else file.threads),
        tolerances=file.tolerances,
        json_path=json_path,
        csv_path=csv_path,
        svg_path=svg_path,
    )


def _file_seed(file: ConfigFile, config: Path | None) -> int | None:
    # only a seed written in the config file overrides ENTLAB_SEED
    if config and "seed" in file.seesaw.model_fields_set:
        return file.seesaw.seed
    return None


def seesaw_for(run: RunConfig, config: Path | None = None) -> SeesawConfig:
    """See-saw settings for a run, keeping max_iter and rel_tol from the config file."""
    file = load_config_file(config) if config else ConfigFile()
    return file.seesaw.model_copy(update={"restarts": run.restarts, "seed": run.seed})


def jsonable(value: Any) -> Any:
    """Plain JSON types from numpy scalars, arrays, tuples and complex numbers."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, list | tuple):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, complex | np.complexfloating):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def write_payload(payload: dict[str, Any], path: Path) -> None:
    """Write a JSON payload to a file, or to standard output for "-"."""
    text = json.dumps(jsonable(payload), indent=2) + "\n"
    if path == STDOUT_PATH:
        typer.echo(text, nl=False)
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def quiet(json_path: Path | None) -> bool:
    """True when the payload goes to standard output and the summary must stay off it."""
    return json_path == STDOUT_PATH
