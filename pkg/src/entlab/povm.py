"""Generalized permutation test on three parties with a qutrit ancilla.

The circuit prepares |0⟩ on the ancilla, applies the qutrit Fourier transform
F, the controlled permutations (1, T², T) and then F†. The ancilla branch i
carries (1/3) Σ_k ω^{-ik} D_k |ψ⟩, which is

    outcome 0: (1 + T + T²)/3 = Π_S + Π_A
    outcome 1: Π_J̄
    outcome 2: Π_J

so the measured probabilities are projector expectations. For qubits Π_A = 0
and outcome 0 is the symmetric projector alone.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from entlab.config import DEFAULT_SEED, derive_seed
from entlab.errors import DimensionError, InvalidStateError, UnsupportedCombinationError
from entlab.linalg import (
    OMEGA,
    ComplexArray,
    Operator,
    StateVector,
    check_parties,
    reduced_density_matrix,
)
from entlab.subspaces import build_permutations, tripartite_projectors
from entlab.validation import validate_density_matrix

ANCILLA_DIM = 3
# Shots drawn per chunk; each chunk gets its own derived seed
SHOT_CHUNK = 100_000
SIGMA_BAND = 4.0


@dataclass(frozen=True, eq=False)
class HybridRegister:
    """Ancilla ⊗ system amplitudes after the circuit, ancilla index first."""

    system: StateVector
    amplitudes: ComplexArray
    ancilla_dim: int = ANCILLA_DIM

    def __post_init__(self) -> None:
        norm = float(np.linalg.norm(self.amplitudes))
        if abs(norm - 1.0) > 1e-12:
            raise InvalidStateError(f"register is not normalized (norm {norm:.15g})")

    def branch(self, outcome: int) -> ComplexArray:
        """Unnormalized system amplitudes conditioned on an ancilla outcome."""
        return self.amplitudes.reshape(self.ancilla_dim, -1)[outcome]

    def probabilities(self) -> tuple[float, float, float]:
        weights = np.sum(np.abs(self.amplitudes.reshape(self.ancilla_dim, -1)) ** 2, axis=1)
        return float(weights[0]), float(weights[1]), float(weights[2])


@dataclass(frozen=True)
class MeasurementRecord:
    """Outcome probabilities and, when sampled, the drawn counts.

    Attributes:
        probabilities: (p0, p1, p2) for the outcomes S(+A), J̄, J.
        shots: Number of samples, or None in exact mode.
        counts: Drawn counts (all zero in exact mode).
        seed: Base seed used for sampling.
    """

    probabilities: tuple[float, float, float]
    shots: int | None = None
    counts: tuple[int, int, int] = (0, 0, 0)
    seed: int = DEFAULT_SEED

    @property
    def exact(self) -> bool:
        return self.shots is None

    def frequencies(self) -> tuple[float, float, float]:
        if not self.shots:
            return self.probabilities
        f0, f1, f2 = (c / self.shots for c in self.counts)
        return f0, f1, f2

    def outliers(self, band: float = SIGMA_BAND) -> list[int]:
        """Outcomes whose frequency lies outside band·√(p(1-p)/shots) of p."""
        if not self.shots:
            return []
        flagged = []
        for k, (p, f) in enumerate(zip(self.probabilities, self.frequencies(), strict=True)):
            sigma = np.sqrt(p * (1 - p) / self.shots)
            if abs(f - p) > band * sigma + 1e-15:
                flagged.append(k)
        return flagged


@dataclass(frozen=True)
class TraceCube:
    """Tr ρ³ by three routes: Tr(T ρ⊗3), the spectrum, and the outcome-0 probability."""

    value: float
    direct: float
    via_probability: float
    p_symmetric: float

    @property
    def max_disagreement(self) -> float:
        return max(abs(self.value - self.direct), abs(self.value - self.via_probability))


@dataclass(frozen=True)
class GceResult:
    """Generalized concentratable entanglement and its per-subset terms."""

    value: float
    order: int
    terms: dict[tuple[int, ...], float] = field(default_factory=dict)


def qutrit_fourier() -> ComplexArray:
    """F|j⟩ = (1/√3) Σ_k ω^{jk} |k⟩."""
    j, k = np.meshgrid(range(ANCILLA_DIM), range(ANCILLA_DIM), indexing="ij")
    return OMEGA ** (j * k) / np.sqrt(ANCILLA_DIM)


def _require_three_parties(psi: StateVector) -> None:
    if psi.parties != 3:
        raise DimensionError(f"the permutation test needs three parties, got {psi.parties}")


def circuit_amplitudes(psi: StateVector) -> HybridRegister:
    """Run F, controlled (1, T², T) and F† on |0⟩ ⊗ |ψ⟩."""
    _require_three_parties(psi)
    perms = build_permutations(psi.local_dim, 3)
    controlled = [perms["identity"], perms["T2"], perms["T"]]
    fourier = qutrit_fourier()
    ancilla = fourier @ np.eye(ANCILLA_DIM, dtype=np.complex128)[0]
    register = np.stack([ancilla[k] * (controlled[k].entries @ psi.amplitudes) for k in range(3)])
    register = fourier.conj().T @ register
    return HybridRegister(system=psi, amplitudes=register.reshape(-1))


def projector_expectations(psi: StateVector) -> tuple[float, float, float]:
    """(⟨Π_S + Π_A⟩, ⟨Π_J̄⟩, ⟨Π_J⟩), the reference for the circuit outcomes."""
    _require_three_parties(psi)
    proj = tripartite_projectors(psi.local_dim)
    symmetric = proj.S + proj.A
    return (
        float(symmetric.expectation(psi).real),
        float(proj.Jbar.expectation(psi).real),
        float(proj.J.expectation(psi).real),
    )


def permutation_test(
    psi: StateVector, shots: int | None = None, seed: int = DEFAULT_SEED
) -> MeasurementRecord:
    """Measure the ancilla after the circuit.

    Args:
        psi: Three-party state.
        shots: Number of samples; None returns exact probabilities only.
        seed: Base seed; chunk k draws from derive_seed(seed, "povm", k).

    Raises:
        DimensionError: If psi does not have three parties.
        UnsupportedCombinationError: If shots is not positive.
    """
    register = circuit_amplitudes(psi)
    probabilities = register.probabilities()
    if shots is None:
        return MeasurementRecord(probabilities=probabilities, seed=seed)
    if shots < 1:
        raise UnsupportedCombinationError("shot count", shots, ["positive integers"])
    p = np.clip(np.array(probabilities), 0.0, None)
    p /= p.sum()
    counts = np.zeros(3, dtype=np.int64)
    remaining, chunk = shots, 0
    while remaining > 0:
        size = min(SHOT_CHUNK, remaining)
        rng = np.random.default_rng(derive_seed(seed, "povm", chunk))
        counts += rng.multinomial(size, p)
        remaining -= size
        chunk += 1
    c0, c1, c2 = (int(c) for c in counts)
    return MeasurementRecord(probabilities, shots, (c0, c1, c2), seed)


def _require_state(rho: Operator | ComplexArray) -> ComplexArray:
    matrix = rho.entries if isinstance(rho, Operator) else np.asarray(rho, dtype=np.complex128)
    check = validate_density_matrix(matrix)
    if not check.is_valid:
        raise InvalidStateError("not a density matrix", check.errors)
    return matrix


def trace_cube(rho: Operator | ComplexArray) -> TraceCube:
    """Tr ρ³ from the three-copy translation, cross-checked two other ways.

    Raises:
        InvalidStateError: If rho is not a density matrix.
    """
    matrix = _require_state(rho)
    d = matrix.shape[0]
    perms = build_permutations(d, 3)
    t = perms["T"].entries.reshape((d,) * 6)
    t2 = perms["T2"].entries.reshape((d,) * 6)
    spec = "abcxyz,xa,yb,zc->"
    via_t = complex(np.einsum(spec, t, matrix, matrix, matrix)).real
    via_t2 = complex(np.einsum(spec, t2, matrix, matrix, matrix)).real
    p_symmetric = (1.0 + via_t + via_t2) / 3
    eigenvalues = np.clip(np.linalg.eigvalsh(matrix), 0.0, None)
    return TraceCube(
        value=via_t,
        direct=float(np.sum(eigenvalues**3)),
        via_probability=(3 * p_symmetric - 1) / 2,
        p_symmetric=p_symmetric,
    )


def tsallis(rho: Operator | ComplexArray, order: int) -> float:
    """T_K(ρ) = (1 - Tr ρ^K)/(K - 1) from the spectrum.

    Raises:
        UnsupportedCombinationError: If K is not an integer >= 2.
        InvalidStateError: If rho is not a density matrix.
    """
    if isinstance(order, bool) or not isinstance(order, int | np.integer) or order < 2:
        raise UnsupportedCombinationError("Tsallis order", order, ["integers >= 2"])
    matrix = _require_state(rho)
    eigenvalues = np.clip(np.linalg.eigvalsh(matrix), 0.0, None)
    return float((1.0 - np.sum(eigenvalues**order)) / (order - 1))


def gce(psi: StateVector, subsystems: Iterable[int], order: int = 3) -> GceResult:
    """Mean of T_K over every subset α of the chosen subsystems.

    The empty subset contributes 0.

    Raises:
        DimensionError: If the subsystem set is empty.
        PartyIndexError: If it names a party outside 1..n.
    """
    chosen = check_parties(subsystems, psi.parties)
    if not chosen:
        raise DimensionError("gce needs a nonempty subsystem set")
    terms: dict[tuple[int, ...], float] = {(): 0.0}
    for size in range(1, len(chosen) + 1):
        for alpha in combinations(chosen, size):
            terms[alpha] = tsallis(reduced_density_matrix(psi, alpha), order)
    return GceResult(value=float(np.mean(list(terms.values()))), order=order, terms=terms)
