"""Shared test fixtures for entlab tests."""

from collections.abc import Callable
from pathlib import Path

import numpy as np
import pytest
from typer.testing import CliRunner

from entlab.config import SeesawConfig
from entlab.linalg import StateVector, random_state

# Type alias for the random-state factory fixture
StateFactory = Callable[..., StateVector]


@pytest.fixture
def cli_runner() -> CliRunner:
    """Provide a Typer CLI test runner."""
    return CliRunner()


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator so every test draws the same numbers."""
    return np.random.default_rng(1234)


@pytest.fixture
def small_seesaw() -> SeesawConfig:
    """Cheap see-saw settings for tests that only need a reasonable optimum."""
    return SeesawConfig(restarts=8, max_iter=300, seed=7)


@pytest.fixture
def seesaw() -> SeesawConfig:
    """See-saw settings used where a global optimum is asserted."""
    return SeesawConfig(restarts=32, max_iter=500, seed=11)


@pytest.fixture
def make_state(rng: np.random.Generator) -> StateFactory:
    """Factory for Haar-random pure states drawn from the shared generator."""

    def _make(parties: int = 3, local_dim: int = 3) -> StateVector:
        return random_state(parties, local_dim, rng)

    return _make


@pytest.fixture
def isolated_env(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Path:
    """Run in an empty directory with no ENTLAB_* variables set."""
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("ENTLAB_THREADS", raising=False)
    monkeypatch.delenv("ENTLAB_SEED", raising=False)
    return tmp_path
