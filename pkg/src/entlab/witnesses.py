"""Gell-Mann bases, structure constants and the witness operators built from them.

The Gell-Mann matrices here are normalized to Tr(λ_i λ_j) = d·δ_ij, so for
qubits they are exactly the Pauli matrices. With that normalization

    κ-_ijk = -(i/d²) Tr(λ_i [λ_j, λ_k]),   κ+_ijk = (1/d²) Tr(λ_i {λ_j, λ_k}),

and W± = Σ κ±_ijk λ_i⊗λ_j⊗λ_k reduce to permutation operators:
W- = i·d(T - T²) and W+ = d(T + T²) - 2(F12 + F23 + F13) + (4/d)·1.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.typing import NDArray

from entlab.errors import DimensionError, UnsupportedCombinationError
from entlab.linalg import (
    ComplexArray,
    Operator,
    StateVector,
    partial_transpose,
)
from entlab.subspaces import build_permutations, tripartite_projectors

RealArray = NDArray[np.float64]


class WitnessKind(str, Enum):
    """Named witness observables."""

    MINUS = "minus"
    PLUS = "plus"
    PT_MINUS = "pt-minus"
    PT_PLUS = "pt-plus"
    P = "P"
    PBAR = "Pbar"


@dataclass(frozen=True, eq=False)
class GellMannBasis:
    """d²-1 Hermitian traceless matrices with Tr(λ_i λ_j) = d·δ_ij."""

    local_dim: int
    matrices: list[Operator]

    def stack(self) -> ComplexArray:
        """All matrices as one (d²-1, d, d) array."""
        return np.stack([m.entries for m in self.matrices])


@dataclass(frozen=True, eq=False)
class StructureConstants:
    """κ- (totally antisymmetric) and κ+ (totally symmetric) as dense real arrays."""

    local_dim: int
    kappa_minus: RealArray
    kappa_plus: RealArray


@dataclass(frozen=True, eq=False)
class Witnesses:
    """W- and W+; for d = 2, W+ vanishes and W- is the three-qubit W_ε."""

    local_dim: int
    minus: Operator
    plus: Operator
    plus_vanishes: bool


@dataclass(frozen=True, eq=False)
class PtWitnesses:
    """Partially transposed witnesses 𝕎± = W±^{T_party}."""

    local_dim: int
    party: int
    minus: Operator
    plus: Operator


@dataclass(frozen=True, eq=False)
class GmeWitnesses:
    """P = Π_J - Π_A and P̄ = Π_J̄ - Π_A."""

    local_dim: int
    P: Operator
    Pbar: Operator


@dataclass(frozen=True)
class SpectralCoefficients:
    """Eigenvalues of W± on the four tripartite subspaces.

    W- = alpha·(Π_J̄ - Π_J) and W+ = c_S Π_S + c_A Π_A + c_J (Π_J + Π_J̄).
    """

    alpha: float
    c_S: float
    c_A: float
    c_J: float


@dataclass(frozen=True)
class WitnessBounds:
    """Maximal expectation over fully separable, biseparable and all states."""

    fs: float
    bs: float
    q: float
    witness: str


def _gellmann_standard(d: int) -> list[ComplexArray]:
    matrices: list[ComplexArray] = []
    pairs = [(i, j) for i in range(d) for j in range(i + 1, d)]
    for i, j in pairs:
        m = np.zeros((d, d), dtype=np.complex128)
        m[i, j] = m[j, i] = 1.0
        matrices.append(m)
    for i, j in pairs:
        m = np.zeros((d, d), dtype=np.complex128)
        m[i, j] = -1j
        m[j, i] = 1j
        matrices.append(m)
    for level in range(1, d):
        diag = np.zeros(d, dtype=np.complex128)
        diag[:level] = 1.0
        diag[level] = -level
        matrices.append(np.sqrt(2.0 / (level * (level + 1))) * np.diag(diag))
    return matrices


def gellmann_basis(d: int) -> GellMannBasis:
    """Generalized Gell-Mann matrices rescaled so that Tr(λ_i λ_j) = d·δ_ij.

    Ordering: symmetric pairs (i<j), antisymmetric pairs (i<j), then diagonal.

    Raises:
        DimensionError: If d < 2.
    """
    if d < 2:
        raise DimensionError(f"local dimension must be >= 2, got {d}")
    scale = np.sqrt(d / 2.0)
    return GellMannBasis(
        local_dim=d,
        matrices=[Operator(scale * m, 1, d, True) for m in _gellmann_standard(d)],
    )


def recombined_basis(basis: GellMannBasis, rng: np.random.Generator) -> GellMannBasis:
    """Mix a basis with a random real orthogonal matrix; normalization is preserved."""
    m = len(basis.matrices)
    q, r = np.linalg.qr(rng.standard_normal((m, m)))
    orthogonal = q * np.sign(np.diag(r))
    mixed = np.einsum("ij,jab->iab", orthogonal, basis.stack())
    return GellMannBasis(
        local_dim=basis.local_dim,
        matrices=[Operator(mixed[i], 1, basis.local_dim, True) for i in range(m)],
    )


def structure_constants(basis: GellMannBasis) -> StructureConstants:
    """κ± for the given basis."""
    d = basis.local_dim
    lam = basis.stack()
    # t_ijk = Tr(λ_i λ_j λ_k)
    triple = np.einsum("iab,jbc,kca->ijk", lam, lam, lam, optimize=True)
    swapped = triple.transpose(0, 2, 1)
    kappa_minus = (-1j / d**2) * (triple - swapped)
    kappa_plus = (triple + swapped) / d**2
    return StructureConstants(
        local_dim=d,
        kappa_minus=np.ascontiguousarray(kappa_minus.real),
        kappa_plus=np.ascontiguousarray(kappa_plus.real),
    )


def _assemble(kappa: RealArray | ComplexArray, lam: ComplexArray, d: int) -> Operator:
    """Σ κ_ijk λ_i⊗λ_j⊗λ_k as a d³×d³ operator."""
    tensor = np.einsum("ijk,iap,jbq,kcr->abcpqr", kappa, lam, lam, lam, optimize=True)
    matrix = tensor.reshape(d**3, d**3)
    return Operator((matrix + matrix.conj().T) / 2, 3, d, True)


def build_witnesses(d: int, basis: GellMannBasis | None = None) -> Witnesses:
    """W± = Σ κ±_ijk λ_i⊗λ_j⊗λ_k.

    Args:
        d: Local dimension, at least 2.
        basis: Constructing basis; defaults to gellmann_basis(d). Any basis with
            the same normalization yields the same operators.

    Returns:
        Witnesses with plus_vanishes set for d = 2 (κ+ is zero for qubits).
    """
    basis = basis or gellmann_basis(d)
    kappas = structure_constants(basis)
    lam = basis.stack()
    minus = _assemble(kappas.kappa_minus, lam, d)
    plus = _assemble(kappas.kappa_plus, lam, d)
    return Witnesses(local_dim=d, minus=minus, plus=plus, plus_vanishes=d == 2)


def permutation_witnesses(d: int) -> Witnesses:
    """W± from their permutation-operator decompositions."""
    p = build_permutations(d, 3)
    one, t, t2 = p["identity"], p["T"], p["T2"]
    minus = (1j * d) * (t - t2)
    plus = d * (t + t2) - 2 * (p["F12"] + p["F23"] + p["F13"]) + (4 / d) * one
    return Witnesses(local_dim=d, minus=minus.as_hermitian(), plus=plus.as_hermitian(),
                     plus_vanishes=d == 2)


def w_epsilon() -> Operator:
    """Three-qubit witness W_ε = Σ ε_ijk σ_i⊗σ_j⊗σ_k."""
    return build_witnesses(2).minus


def improved_chiral_witness() -> Operator:
    """(4/9)·1 - Π_J on three qubits; nonnegative on all product states."""
    projectors = tripartite_projectors(2)
    return ((4 / 9) * Operator.identity(3, 2) - projectors.J).as_hermitian()


def spectral_coefficients(d: int) -> SpectralCoefficients:
    """Closed-form eigenvalues of W± on the symmetric, antisymmetric and chiral spaces.

    Raises:
        DimensionError: If d < 3.
    """
    if d < 3:
        raise DimensionError(f"spectral coefficients need d >= 3, got {d}")
    return SpectralCoefficients(
        alpha=d * np.sqrt(3.0),
        c_S=2 * (d - 1) * (d - 2) / d,
        c_A=2 * (d + 1) * (d + 2) / d,
        c_J=-(d + 2) * (d - 2) / d,
    )


def spectral_residual(d: int) -> float:
    """Largest deviation of W± from their spectral decompositions, entrywise."""
    coeffs = spectral_coefficients(d)
    proj = tripartite_projectors(d)
    witnesses = build_witnesses(d)
    minus = coeffs.alpha * (proj.Jbar - proj.J)
    plus = coeffs.c_S * proj.S + coeffs.c_A * proj.A + coeffs.c_J * (proj.J + proj.Jbar)
    return max(witnesses.minus.max_abs_diff(minus), witnesses.plus.max_abs_diff(plus))


def analytic_bounds(d: int, witness: str | WitnessKind) -> WitnessBounds:
    """Separable, biseparable and quantum bounds on ⟨W±⟩.

    W-: (d/2, d, d√3). W+: (4/3, 10/3, 40/3) at d = 3 and
    (2(d-1)(d-2)/d, 2(d-1)(d-2)/d, 2(d+1)(d+2)/d) for d >= 4. At d = 2 the W-
    bounds are the W_ε values (1, 2, 2√3).

    Raises:
        UnsupportedCombinationError: For W+ at d = 2 or an unknown witness.
    """
    kind = WitnessKind(witness)
    if kind is WitnessKind.MINUS:
        return WitnessBounds(fs=d / 2, bs=float(d), q=d * np.sqrt(3.0), witness=kind.value)
    if kind is WitnessKind.PLUS:
        if d < 3:
            raise UnsupportedCombinationError("dimension for W+ bounds", d, ["d >= 3"])
        coeffs = spectral_coefficients(d)
        if d == 3:
            return WitnessBounds(fs=4 / 3, bs=10 / 3, q=coeffs.c_A, witness=kind.value)
        return WitnessBounds(fs=coeffs.c_S, bs=coeffs.c_S, q=coeffs.c_A, witness=kind.value)
    raise UnsupportedCombinationError("witness for analytic bounds", kind.value, ["minus", "plus"])


def conditional_observable(
    w: Operator, party: int, anchor: StateVector | ComplexArray
) -> Operator:
    """⟨anchor|W|anchor⟩ on the parties other than `party`.

    Raises:
        DimensionError: If the anchor is not a single-party vector of the right size.
    """
    n, d = w.parties, w.local_dim
    if party < 1 or party > n:
        raise DimensionError(f"party must be in 1..{n}, got {party}")
    vector = anchor.amplitudes if isinstance(anchor, StateVector) else np.asarray(anchor)
    if isinstance(anchor, StateVector) and anchor.parties != 1:
        raise DimensionError(f"anchor must live on one party, got {anchor.parties}")
    if vector.shape != (d,):
        raise DimensionError(f"anchor must have length {d}, got shape {vector.shape}")
    tensor = w.entries.reshape((d,) * (2 * n))
    tensor = np.tensordot(vector.conj(), tensor, axes=([0], [party - 1]))
    # the bra axis of `party` now sits at position n - 1 + party - 1
    tensor = np.tensordot(tensor, vector, axes=([n + party - 2], [0]))
    rest = d ** (n - 1)
    return Operator(tensor.reshape(rest, rest), n - 1, d, w.hermitian)


def conditional_eigenvalues(d: int, sign: str) -> list[float]:
    """Distinct closed-form eigenvalues of ⟨0|W±|0⟩ on the remaining two parties."""
    if sign == "minus":
        return [-float(d), 0.0, float(d)]
    if sign == "plus":
        shift = 4 / d
        return [shift - 2, shift + 2, shift + d - 4, shift - d, shift - 2, shift + 2 * d - 6]
    raise UnsupportedCombinationError("witness sign", sign, ["minus", "plus"])


def _flip_pt_coefficients(basis: GellMannBasis) -> tuple[ComplexArray, ComplexArray]:
    """κ± with the trace taken against F^{T_1} instead of F."""
    d = basis.local_dim
    lam = basis.stack()
    flip = build_permutations(d, 2)["F12"]
    flip_pt = partial_transpose(flip, {1}).entries.reshape(d, d, d, d)
    commutators = np.einsum("jab,kbc->jkac", lam, lam) - np.einsum("kab,jbc->jkac", lam, lam)
    anticommutators = np.einsum("jab,kbc->jkac", lam, lam) + np.einsum("kab,jbc->jkac", lam, lam)
    # Tr((A⊗B) M) = Σ A_ab B_ce M_(b e),(a c)
    minus = (-1j / d**2) * np.einsum("iab,jkce,beac->ijk", lam, commutators, flip_pt, optimize=True)
    plus = (1 / d**2) * np.einsum("iab,jkce,beac->ijk", lam, anticommutators, flip_pt, optimize=True)
    return minus, plus


def pt_witnesses_from_flip(d: int) -> PtWitnesses:
    """𝕎± assembled directly from coefficients traced against F^{T_1}."""
    basis = gellmann_basis(d)
    minus_coeffs, plus_coeffs = _flip_pt_coefficients(basis)
    lam = basis.stack()
    return PtWitnesses(
        local_dim=d,
        party=1,
        minus=_assemble(minus_coeffs.real, lam, d),
        plus=_assemble(plus_coeffs.real, lam, d),
    )


def build_pt_witnesses(d: int, party: int = 1) -> PtWitnesses:
    """𝕎± = W±^{T_party}.

    Party 1 gives the U*⊗U⊗U-invariant pair; parties 2 and 3 the U⊗U*⊗U and
    U⊗U⊗U* analogues.
    """
    if party not in (1, 2, 3):
        raise DimensionError(f"party must be 1, 2 or 3, got {party}")
    witnesses = permutation_witnesses(d)
    return PtWitnesses(
        local_dim=d,
        party=party,
        minus=partial_transpose(witnesses.minus, {party}),
        plus=partial_transpose(witnesses.plus, {party}),
    )


def build_gme_witnesses(d: int) -> GmeWitnesses:
    """P = Π_J - Π_A and P̄ = Π_J̄ - Π_A, GME witnesses for d >= 3.

    Raises:
        DimensionError: If d < 3 (no antisymmetric subspace).
    """
    if d < 3:
        raise DimensionError(f"GME witnesses P, P̄ need d >= 3, got {d}")
    proj = tripartite_projectors(d)
    return GmeWitnesses(
        local_dim=d,
        P=(proj.J - proj.A).as_hermitian(),
        Pbar=(proj.Jbar - proj.A).as_hermitian(),
    )


def witness_operator(d: int, kind: str | WitnessKind) -> Operator:
    """Look up a named witness at local dimension d."""
    kind = WitnessKind(kind)
    if kind is WitnessKind.MINUS:
        return permutation_witnesses(d).minus
    if kind is WitnessKind.PLUS:
        return permutation_witnesses(d).plus
    if kind is WitnessKind.PT_MINUS:
        return build_pt_witnesses(d).minus
    if kind is WitnessKind.PT_PLUS:
        return build_pt_witnesses(d).plus
    gme = build_gme_witnesses(d)
    return gme.P if kind is WitnessKind.P else gme.Pbar
