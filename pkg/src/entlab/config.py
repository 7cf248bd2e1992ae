"""Run configuration: optimizer settings, solver tolerances, threads and seeds.

Settings resolve in this order:
1. Explicit CLI flags
2. ENTLAB_* environment variables
3. A `.env` file in the working directory
4. Defaults below
"""

import hashlib
import os
from enum import Enum
from pathlib import Path
from typing import Any

import yaml
from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from entlab.errors import format_validation_errors

# Environment variables
THREADS_ENV_VAR = "ENTLAB_THREADS"
SEED_ENV_VAR = "ENTLAB_SEED"

DEFAULT_SEED = 20240607
DEFAULT_ENV_FILE = Path(".env")


class StrictModel(BaseModel):
    """Base model that rejects unknown fields."""

    model_config = ConfigDict(extra="forbid")


class SeesawConfig(StrictModel):
    """Multistart see-saw settings."""

    restarts: int = Field(default=64, gt=0, description="Independent random starts")
    max_iter: int = Field(default=500, gt=0, description="Sweeps per start")
    rel_tol: float = Field(default=1e-12, gt=0, description="Relative objective change to stop")
    seed: int = Field(default=DEFAULT_SEED, ge=0, description="Base seed for all starts")


class SolverTolerances(StrictModel):
    """Tolerances of the SDP engine and the decisions built on it."""

    gap: float = Field(default=1e-8, gt=0, description="Duality-gap target")
    psd_slack: float = Field(default=1e-9, gt=0, description="Allowed negative eigenvalue")
    gme: float = Field(default=1e-7, gt=0, description="Witness value below -gme means GME")


class Subcommand(str, Enum):
    """CLI subcommands that accept a RunConfig."""

    PROJECTORS = "projectors"
    WITNESS = "witness"
    GM = "gm"
    SDP = "sdp"
    STATESPACE = "statespace"
    PPTGME = "pptgme"
    POVM = "povm"
    VERIFY = "verify"


# Inclusive local-dimension ranges per subcommand
DIMENSION_RANGES: dict[Subcommand, tuple[int, int]] = {
    Subcommand.PROJECTORS: (2, 8),
    Subcommand.WITNESS: (2, 6),
    Subcommand.GM: (2, 12),
    Subcommand.SDP: (2, 8),
    Subcommand.STATESPACE: (3, 4),
    Subcommand.PPTGME: (2, 4),
    Subcommand.POVM: (2, 4),
    Subcommand.VERIFY: (2, 12),
}


class RunConfig(StrictModel):
    """Validated settings for one CLI invocation."""

    subcommand: Subcommand
    d: int | None = Field(default=None, description="Local dimension")
    seed: int = Field(default=DEFAULT_SEED, ge=0)
    restarts: int = Field(default=64, gt=0)
    threads: int = Field(default_factory=lambda: os.cpu_count() or 1, gt=0)
    tolerances: SolverTolerances = Field(default_factory=SolverTolerances)
    json_path: Path | None = None
    csv_path: Path | None = None
    svg_path: Path | None = None

    @model_validator(mode="after")
    def validate_dimension(self) -> "RunConfig":
        """Ensure d lies in the range the subcommand supports."""
        if self.d is None:
            return self
        low, high = DIMENSION_RANGES[self.subcommand]
        if not low <= self.d <= high:
            raise ValueError(f"{self.subcommand.value} supports {low} <= d <= {high}, got d = {self.d}")
        return self

    def seesaw(self, max_iter: int = 500) -> SeesawConfig:
        """See-saw settings derived from this run."""
        return SeesawConfig(restarts=self.restarts, max_iter=max_iter, seed=self.seed)


class ConfigFile(StrictModel):
    """Schema of an optional YAML configuration file."""

    seesaw: SeesawConfig = Field(default_factory=SeesawConfig)
    tolerances: SolverTolerances = Field(default_factory=SolverTolerances)
    threads: int | None = Field(default=None, gt=0)

    @field_validator("threads")
    @classmethod
    def validate_threads(cls, v: int | None) -> int | None:
        """Cap threads at a sane upper bound."""
        if v is not None and v > 1024:
            raise ValueError("threads must be <= 1024")
        return v


def load_config_file(path: Path) -> ConfigFile:
    """Load and validate a YAML configuration file.

    Args:
        path: Path to the YAML file.

    Returns:
        Validated ConfigFile.

    Raises:
        FileNotFoundError: If the file does not exist.
        ValueError: If the content fails validation.
    """
    if not path.exists():
        raise FileNotFoundError(f"Config file not found: {path}")
    data: Any = yaml.safe_load(path.read_text()) or {}
    try:
        return ConfigFile.model_validate(data)
    except ValidationError as e:
        raise ValueError(f"Invalid config file {path}: {format_validation_errors(e)}") from None


def _env_value(name: str, env_file: Path) -> str | None:
    value = os.environ.get(name)
    if value:
        return value
    if env_file.exists():
        file_value = dotenv_values(env_file).get(name)
        if file_value:
            return file_value
    return None


def resolve_threads(cli_value: int | None, env_file: Path = DEFAULT_ENV_FILE) -> int:
    """Worker count: --threads, then ENTLAB_THREADS, then machine parallelism.

    Raises:
        ValueError: If the environment value is not a positive integer.
    """
    if cli_value is not None:
        return cli_value
    raw = _env_value(THREADS_ENV_VAR, env_file)
    if raw is None:
        return os.cpu_count() or 1
    try:
        threads = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV_VAR} must be a positive integer, got {raw!r}") from None
    if threads < 1:
        raise ValueError(f"{THREADS_ENV_VAR} must be a positive integer, got {raw!r}")
    return threads


def resolve_seed(cli_value: int | None, env_file: Path = DEFAULT_ENV_FILE) -> int:
    """Seed: --seed, then ENTLAB_SEED, then the package default."""
    if cli_value is not None:
        return cli_value
    raw = _env_value(SEED_ENV_VAR, env_file)
    if raw is None:
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}") from None


def derive_seed(seed: int, module: str, index: int) -> int:
    """Stable 64-bit sub-seed for (seed, module, task index)."""
    digest = hashlib.blake2b(f"{seed}:{module}:{index}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")
