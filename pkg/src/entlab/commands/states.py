"""Named state presets and JSON state files for the `gm` and `povm` commands."""

import json
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from entlab.config import derive_seed
from entlab.errors import UnsupportedCombinationError
from entlab.linalg import StateVector, random_state
from entlab.subspaces import (
    SPECIAL_STATES,
    SubspaceBasis,
    antichiral_basis,
    chiral_basis,
    flip_conjugate_basis,
    j2_basis,
    special_state,
)

# Random superpositions drawn from a subspace basis
SUBSPACE_PRESETS = ("chiral", "antichiral", "j2", "flipconj")
# Prefix that marks a state file path
FILE_PREFIX = "file:"
STATE_PRESETS = (*SPECIAL_STATES, *SUBSPACE_PRESETS, "random")


class StatePayload(BaseModel):
    """JSON state file: amplitudes as [re, im] pairs, normalized on load."""

    model_config = ConfigDict(extra="forbid")

    parties: int = Field(gt=0)
    local_dim: int = Field(gt=1)
    amplitudes: list[tuple[float, float]]


def _subspace(name: str, d: int) -> SubspaceBasis:
    if name == "chiral":
        return chiral_basis(d)
    if name == "antichiral":
        return antichiral_basis(d)
    if name == "j2":
        if d != 3:
            raise UnsupportedCombinationError("dimension for the j2 preset", d, [3])
        return j2_basis()
    return flip_conjugate_basis(d)


def random_superposition(basis: SubspaceBasis, seed: int) -> StateVector:
    """Gaussian-random normalized combination of the basis vectors."""
    rng = np.random.default_rng(seed)
    weights = rng.normal(size=basis.rank) + 1j * rng.normal(size=basis.rank)
    stack = np.column_stack([v.amplitudes for v in basis.vectors])
    first = basis.vectors[0]
    return StateVector.from_amplitudes(stack @ weights, first.parties, first.local_dim)


def load_state(spec: str, d: int, seed: int, index: int = 0) -> StateVector:
    """Resolve a preset name or a path to a JSON state file.

    Args:
        spec: Preset name (see STATE_PRESETS), "file:PATH" or a bare PATH.json
            pointing at a StatePayload file.
        d: Local dimension for presets that take one.
        seed: Base seed for random presets.
        index: Task index mixed into the derived seed.

    Raises:
        UnsupportedCombinationError: For an unknown preset.
        FileNotFoundError: If a path does not exist.
    """
    if spec in SPECIAL_STATES:
        return special_state(spec, d)
    if spec in SUBSPACE_PRESETS:
        return random_superposition(_subspace(spec, d), derive_seed(seed, "state", index))
    if spec == "random":
        return random_state(3, d, derive_seed(seed, "state", index))
    if spec.startswith(FILE_PREFIX):
        path = Path(spec.removeprefix(FILE_PREFIX))
    elif spec.endswith(".json"):
        path = Path(spec)
    else:
        raise UnsupportedCombinationError("state", spec, [*STATE_PRESETS, f"{FILE_PREFIX}PATH", "PATH.json"])
    if not path.exists():
        raise FileNotFoundError(f"State file not found: {path}")
    payload = StatePayload.model_validate(json.loads(path.read_text()))
    data = np.array(payload.amplitudes, dtype=np.float64).reshape(-1, 2)
    return StateVector.from_amplitudes(data[:, 0] + 1j * data[:, 1], payload.parties, payload.local_dim)
