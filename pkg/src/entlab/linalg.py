"""Dense complex linear algebra on multi-party qudit spaces.

Operators and state vectors carry their tensor structure (party count n and
local dimension d, with d**n equal to the full dimension). Party indices are
1-based throughout, matching the usual A=1, B=2, C=3 labelling.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import overload

import numpy as np
import scipy.linalg
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, field_validator

from entlab.errors import (
    DimensionError,
    InvalidStateError,
    NotHermitianError,
    PartyIndexError,
    SolverError,
)

ComplexArray = NDArray[np.complex128]
RealArray = NDArray[np.float64]
ArrayLikeComplex = NDArray[np.complex128] | Sequence[complex]

# ω = e^{2πi/3}
OMEGA: complex = complex(np.exp(2j * np.pi / 3))

HERMITIAN_TOL = 1e-12
EIG_INPUT_TOL = 1e-10
EIG_RESIDUAL_TOL = 1e-9
NORM_TOL = 1e-12


def _check_structure(dim: int, parties: int, local_dim: int) -> None:
    if parties < 1 or local_dim < 1:
        raise DimensionError(f"parties and local_dim must be positive, got {parties}, {local_dim}")
    if local_dim**parties != dim:
        raise DimensionError(f"dimension {dim} is not {local_dim}^{parties}")


def check_parties(selection: Iterable[int], n: int) -> tuple[int, ...]:
    chosen = tuple(sorted(set(selection)))
    if any(p < 1 or p > n for p in chosen):
        raise PartyIndexError(chosen, n)
    return chosen


@dataclass(frozen=True, eq=False)
class Operator:
    """Dense square matrix on (C^d)^⊗n.

    Attributes:
        entries: D×D complex matrix, D = local_dim**parties.
        parties: Number of tensor factors n.
        local_dim: Dimension d of each factor.
        hermitian: When set, entries are checked against their adjoint.
    """

    entries: ComplexArray
    parties: int
    local_dim: int
    hermitian: bool = False

    # numpy scalars defer to __rmul__ instead of broadcasting over the object
    __array_ufunc__ = None

    def __post_init__(self) -> None:
        matrix = np.asarray(self.entries, dtype=np.complex128)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionError(f"operator entries must be square, got shape {matrix.shape}")
        _check_structure(matrix.shape[0], self.parties, self.local_dim)
        if self.hermitian:
            deviation = float(np.max(np.abs(matrix - matrix.conj().T)))
            if deviation > HERMITIAN_TOL * max(1.0, float(np.max(np.abs(matrix)))):
                raise NotHermitianError(deviation, HERMITIAN_TOL)
        object.__setattr__(self, "entries", matrix)

    @classmethod
    def identity(cls, parties: int, local_dim: int) -> Operator:
        """Identity on (C^d)^⊗n."""
        return cls(np.eye(local_dim**parties, dtype=np.complex128), parties, local_dim, True)

    @classmethod
    def zeros(cls, parties: int, local_dim: int) -> Operator:
        """Zero operator on (C^d)^⊗n."""
        dim = local_dim**parties
        return cls(np.zeros((dim, dim), dtype=np.complex128), parties, local_dim, True)

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    @property
    def adjoint(self) -> Operator:
        return Operator(self.entries.conj().T, self.parties, self.local_dim, self.hermitian)

    def conjugate(self) -> Operator:
        """Entrywise complex conjugate in the computational basis."""
        return Operator(self.entries.conj(), self.parties, self.local_dim, self.hermitian)

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def as_hermitian(self) -> Operator:
        """Return the same operator flagged (and checked) as Hermitian."""
        return Operator(self.entries, self.parties, self.local_dim, True)

    def hermitian_deviation(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    def expectation(self, psi: StateVector) -> complex:
        """⟨ψ|A|ψ⟩."""
        self._check_same_space(psi.parties, psi.local_dim)
        return complex(np.vdot(psi.amplitudes, self.entries @ psi.amplitudes))

    def apply(self, psi: StateVector) -> ComplexArray:
        """A|ψ⟩ as a raw (generally unnormalized) amplitude vector."""
        self._check_same_space(psi.parties, psi.local_dim)
        return self.entries @ psi.amplitudes

    def allclose(self, other: Operator, atol: float) -> bool:
        """Entrywise comparison within an absolute tolerance."""
        return self.dim == other.dim and bool(np.allclose(self.entries, other.entries, atol=atol, rtol=0))

    def max_abs_diff(self, other: Operator) -> float:
        return float(np.max(np.abs(self.entries - other.entries)))

    def _check_same_space(self, parties: int, local_dim: int) -> None:
        if (parties, local_dim) != (self.parties, self.local_dim):
            raise DimensionError(
                f"space mismatch: operator on {self.parties}x C^{self.local_dim}, "
                f"argument on {parties}x C^{local_dim}"
            )

    def __add__(self, other: Operator) -> Operator:
        self._check_same_space(other.parties, other.local_dim)
        return Operator(self.entries + other.entries, self.parties, self.local_dim)

    def __sub__(self, other: Operator) -> Operator:
        self._check_same_space(other.parties, other.local_dim)
        return Operator(self.entries - other.entries, self.parties, self.local_dim)

    def __neg__(self) -> Operator:
        return Operator(-self.entries, self.parties, self.local_dim, self.hermitian)

    def __mul__(self, scalar: complex) -> Operator:
        return Operator(scalar * self.entries, self.parties, self.local_dim)

    __rmul__ = __mul__

    def __truediv__(self, scalar: complex) -> Operator:
        return Operator(self.entries / scalar, self.parties, self.local_dim)

    def __matmul__(self, other: Operator) -> Operator:
        self._check_same_space(other.parties, other.local_dim)
        return Operator(self.entries @ other.entries, self.parties, self.local_dim)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Unit vector on (C^d)^⊗n."""

    amplitudes: ComplexArray
    parties: int
    local_dim: int

    def __post_init__(self) -> None:
        vector = np.asarray(self.amplitudes, dtype=np.complex128)
        if vector.ndim != 1:
            raise DimensionError(f"amplitudes must be a vector, got shape {vector.shape}")
        _check_structure(vector.shape[0], self.parties, self.local_dim)
        norm_sq = float(np.vdot(vector, vector).real)
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise InvalidStateError(f"state vector is not normalized (squared norm {norm_sq:.15g})")
        object.__setattr__(self, "amplitudes", vector)

    @classmethod
    def from_amplitudes(
        cls, amplitudes: ArrayLikeComplex, parties: int, local_dim: int
    ) -> StateVector:
        """Build a state by normalizing an arbitrary nonzero vector."""
        vector = np.asarray(amplitudes, dtype=np.complex128)
        norm = float(np.linalg.norm(vector))
        if norm == 0.0:
            raise InvalidStateError("cannot normalize the zero vector")
        return cls(vector / norm, parties, local_dim)

    @classmethod
    def basis(cls, digits: Sequence[int], local_dim: int) -> StateVector:
        """Computational basis state |digits⟩, e.g. basis((0, 1, 1), 2) = |011⟩."""
        if any(k < 0 or k >= local_dim for k in digits):
            raise DimensionError(f"basis digits {tuple(digits)} out of range for d = {local_dim}")
        vector = np.zeros(local_dim ** len(digits), dtype=np.complex128)
        vector[basis_index(digits, local_dim)] = 1.0
        return cls(vector, len(digits), local_dim)

    @property
    def dim(self) -> int:
        return int(self.amplitudes.shape[0])

    def tensor(self) -> ComplexArray:
        """Amplitudes reshaped to an n-index tensor of shape (d,)*n."""
        return self.amplitudes.reshape((self.local_dim,) * self.parties)

    def projector(self) -> Operator:
        """|ψ⟩⟨ψ|."""
        return Operator(np.outer(self.amplitudes, self.amplitudes.conj()), self.parties, self.local_dim, True)

    def conjugate(self) -> StateVector:
        return StateVector(self.amplitudes.conj(), self.parties, self.local_dim)

    def overlap(self, other: StateVector) -> complex:
        """⟨self|other⟩."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    """Spectrum of a Hermitian operator, ascending, with column eigenvectors."""

    values: RealArray
    vectors: ComplexArray

    def top(self) -> tuple[float, ComplexArray]:
        return float(self.values[-1]), self.vectors[:, -1]

    def bottom(self) -> tuple[float, ComplexArray]:
        return float(self.values[0]), self.vectors[:, 0]

    def eigenspace_projector(self, value: float, atol: float = 1e-8) -> ComplexArray:
        """Projector onto the span of eigenvectors with eigenvalue within atol of value."""
        mask = np.abs(self.values - value) <= atol
        block = self.vectors[:, mask]
        return block @ block.conj().T


def basis_index(digits: Sequence[int], local_dim: int) -> int:
    """Row-major index of |digits⟩."""
    index = 0
    for k in digits:
        index = index * local_dim + k
    return index


@overload
def kron(a: Operator, b: Operator) -> Operator: ...


@overload
def kron(a: StateVector, b: StateVector) -> StateVector: ...


def kron(a: Operator | StateVector, b: Operator | StateVector) -> Operator | StateVector:
    """Kronecker product with concatenated party structure.

    Args:
        a: Left factor.
        b: Right factor, of the same kind and local dimension as a.

    Returns:
        The product on parties a.parties + b.parties.

    Raises:
        DimensionError: If the kinds or local dimensions differ.
    """
    if a.local_dim != b.local_dim:
        raise DimensionError(f"local dimensions differ: {a.local_dim} vs {b.local_dim}")
    parties = a.parties + b.parties
    if isinstance(a, Operator) and isinstance(b, Operator):
        return Operator(np.kron(a.entries, b.entries), parties, a.local_dim, a.hermitian and b.hermitian)
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(np.kron(a.amplitudes, b.amplitudes), parties, a.local_dim)
    raise DimensionError(f"cannot take kron of {type(a).__name__} and {type(b).__name__}")


def kron_all(factors: Sequence[ComplexArray]) -> ComplexArray:
    """Kronecker product of a sequence of raw arrays (vectors or matrices)."""
    result = np.asarray(factors[0], dtype=np.complex128)
    for factor in factors[1:]:
        result = np.kron(result, factor)
    return result


def local_operator(factors: Sequence[ComplexArray]) -> Operator:
    """A_1 ⊗ A_2 ⊗ ... built from single-site d×d matrices."""
    d = int(np.asarray(factors[0]).shape[0])
    return Operator(kron_all(factors), len(factors), d)


def partial_transpose(a: Operator, party_set: Iterable[int]) -> Operator:
    """Transpose the selected tensor factors.

    ⟨i j|A^{T_1}|k l⟩ = ⟨k j|A|i l⟩ for the two-party case with party_set = {1}.

    Raises:
        PartyIndexError: If a party index is outside 1..n.
    """
    chosen = check_parties(party_set, a.parties)
    n, d = a.parties, a.local_dim
    perm = list(range(2 * n))
    for p in chosen:
        perm[p - 1], perm[n + p - 1] = perm[n + p - 1], perm[p - 1]
    tensor = a.entries.reshape((d,) * (2 * n)).transpose(perm)
    return Operator(tensor.reshape(a.dim, a.dim), n, d, a.hermitian)


def partial_trace(a: Operator, party_set: Iterable[int]) -> Operator:
    """Trace out the selected tensor factors.

    Raises:
        PartyIndexError: If a party index is outside 1..n.
        DimensionError: If every party would be traced out.
    """
    chosen = check_parties(party_set, a.parties)
    n, d = a.parties, a.local_dim
    if len(chosen) == n:
        raise DimensionError("partial_trace would remove every party; use Operator.trace")
    tensor = a.entries.reshape((d,) * (2 * n))
    remaining = n
    # highest index first so lower axis numbers stay valid
    for p in sorted(chosen, reverse=True):
        tensor = np.trace(tensor, axis1=p - 1, axis2=remaining + p - 1)
        remaining -= 1
    kept_dim = d**remaining
    return Operator(tensor.reshape(kept_dim, kept_dim), remaining, d, a.hermitian)


def reduced_density_matrix(psi: StateVector, keep: Iterable[int]) -> ComplexArray:
    """Reduced state of |ψ⟩⟨ψ| on the kept parties, via a direct tensor contraction."""
    kept = check_parties(keep, psi.parties)
    if not kept:
        raise DimensionError("reduced_density_matrix needs at least one kept party")
    traced = [p - 1 for p in range(1, psi.parties + 1) if p not in kept]
    order = [p - 1 for p in kept] + traced
    block = psi.tensor().transpose(order).reshape(psi.local_dim ** len(kept), -1)
    return block @ block.conj().T


def hermitian_eig(a: Operator | ComplexArray) -> EigenDecomposition:
    """Full eigendecomposition of a Hermitian matrix, ascending.

    Args:
        a: Hermitian operator or raw matrix.

    Returns:
        EigenDecomposition with real ascending values and orthonormal columns.

    Raises:
        NotHermitianError: If the input deviates from its adjoint by more than 1e-10.
        SolverError: If the residual check fails.
    """
    matrix = a.entries if isinstance(a, Operator) else np.asarray(a, dtype=np.complex128)
    scale = max(1.0, float(np.linalg.norm(matrix, 2))) if matrix.size else 1.0
    deviation = float(np.max(np.abs(matrix - matrix.conj().T))) if matrix.size else 0.0
    if deviation > EIG_INPUT_TOL * scale:
        raise NotHermitianError(deviation, EIG_INPUT_TOL)
    values, vectors = scipy.linalg.eigh((matrix + matrix.conj().T) / 2)
    residual = float(np.max(np.abs(matrix @ vectors - vectors * values))) if matrix.size else 0.0
    if residual > EIG_RESIDUAL_TOL * scale:
        raise SolverError(f"eigendecomposition residual {residual:.3g} exceeds tolerance")
    return EigenDecomposition(values=np.asarray(values, dtype=np.float64), vectors=vectors)


def schmidt_coefficients(psi: StateVector, bipartition: Iterable[int]) -> RealArray:
    """Schmidt coefficients of |ψ⟩ across (bipartition | rest), descending.

    Args:
        psi: State on n parties.
        bipartition: Parties on one side of the cut.

    Raises:
        DimensionError: If either side of the cut is empty.
    """
    side = check_parties(bipartition, psi.parties)
    if not side or len(side) == psi.parties:
        raise DimensionError(f"trivial bipartition {side} of {psi.parties} parties")
    rest = [p for p in range(1, psi.parties + 1) if p not in side]
    order = [p - 1 for p in side] + [p - 1 for p in rest]
    matrix = psi.tensor().transpose(order).reshape(psi.local_dim ** len(side), -1)
    return np.asarray(scipy.linalg.svdvals(matrix), dtype=np.float64)


def bipartitions(n: int) -> list[tuple[int, ...]]:
    """One representative side for each nontrivial cut of n parties."""
    cuts: list[tuple[int, ...]] = []
    seen: set[frozenset[int]] = set()
    everyone = frozenset(range(1, n + 1))
    for mask in range(1, 2**n - 1):
        side = frozenset(p + 1 for p in range(n) if mask >> p & 1)
        if side in seen or (everyone - side) in seen:
            continue
        seen.add(side)
        cuts.append(tuple(sorted(side)))
    return cuts


def as_generator(seed: int | np.random.Generator) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def haar_random_unitary(d: int, seed: int | np.random.Generator) -> Operator:
    """Haar-distributed d×d unitary from the QR decomposition of a Ginibre matrix.

    The diagonal of R is divided out by its phases so the distribution is
    exactly Haar rather than QR-convention dependent.
    """
    if d < 1:
        raise DimensionError(f"unitary dimension must be >= 1, got {d}")
    rng = as_generator(seed)
    ginibre = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
    q, r = scipy.linalg.qr(ginibre)
    diag = np.diag(r)
    phases = diag / np.abs(diag)
    return Operator(q * phases, 1, d)


def random_state(parties: int, local_dim: int, seed: int | np.random.Generator) -> StateVector:
    """Haar-random pure state on (C^d)^⊗n."""
    rng = as_generator(seed)
    dim = local_dim**parties
    vector = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return StateVector.from_amplitudes(vector, parties, local_dim)


def random_unit_vector(d: int, rng: np.random.Generator) -> ComplexArray:
    vector = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return vector / np.linalg.norm(vector)


def modular_shift(d: int) -> ComplexArray:
    """X|i⟩ = |i+1 mod d⟩."""
    return np.roll(np.eye(d, dtype=np.complex128), 1, axis=0)


class MatrixPayload(BaseModel):
    """JSON form of an Operator; complex entries are [re, im] pairs."""

    model_config = ConfigDict(extra="forbid")

    parties: int = Field(gt=0, description="Number of tensor factors n")
    local_dim: int = Field(gt=0, description="Local dimension d")
    entries: list[list[tuple[float, float]]] = Field(description="Row-major [re, im] matrix")

    @field_validator("entries")
    @classmethod
    def validate_square(cls, v: list[list[tuple[float, float]]]) -> list[list[tuple[float, float]]]:
        """Ensure the entries form a square matrix."""
        if any(len(row) != len(v) for row in v):
            raise ValueError("entries must form a square matrix")
        return v


def matrix_to_payload(a: Operator) -> MatrixPayload:
    """Serialize an Operator into the JSON matrix schema."""
    rows = [[(float(z.real), float(z.imag)) for z in row] for row in a.entries]
    return MatrixPayload(parties=a.parties, local_dim=a.local_dim, entries=rows)


def matrix_from_payload(payload: MatrixPayload) -> Operator:
    """Rebuild an Operator from its JSON matrix schema."""
    data = np.array(payload.entries, dtype=np.float64)
    if data.size == 0:
        raise DimensionError("payload has no entries")
    return Operator(data[..., 0] + 1j * data[..., 1], payload.parties, payload.local_dim)


def conjugate_local(a: Operator, unitaries: Sequence[ComplexArray]) -> Operator:
    """(U_1⊗...⊗U_n) A (U_1⊗...⊗U_n)^† for per-party unitaries."""
    if len(unitaries) != a.parties:
        raise DimensionError(f"need {a.parties} local unitaries, got {len(unitaries)}")
    u = kron_all(unitaries)
    return Operator(u @ a.entries @ u.conj().T, a.parties, a.local_dim, a.hermitian)


def apply_local(psi: StateVector, unitaries: Sequence[ComplexArray]) -> StateVector:
    """(U_1⊗...⊗U_n)|ψ⟩ for per-party single-site operators."""
    if len(unitaries) != psi.parties:
        raise DimensionError(f"need {psi.parties} local operators, got {len(unitaries)}")
    tensor = psi.tensor()
    for k, u in enumerate(unitaries):
        tensor = np.moveaxis(np.tensordot(u, tensor, axes=([1], [k])), 0, k)
    return StateVector.from_amplitudes(tensor.reshape(-1), psi.parties, psi.local_dim)
