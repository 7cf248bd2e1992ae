"""Permutation operators, symmetric and chiral projectors, and explicit bases.

Conventions:
- The cyclic translation acts as T|abc⟩ = |cab⟩ (and T|abcd⟩ = |dabc⟩ for four
  parties); F_ij swaps factors i and j.
- Π_J and Π_J̄ project onto the T-eigenspaces with eigenvalues ω and ω².
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from entlab.errors import DimensionError, InvalidStateError, UnsupportedCombinationError
from entlab.linalg import (
    OMEGA,
    ComplexArray,
    Operator,
    StateVector,
    basis_index,
    partial_transpose,
)

ORTHONORMAL_TOL = 1e-12

SUPPORTED_PARTY_COUNTS = (2, 3, 4)


@dataclass(frozen=True, eq=False)
class PermutationOp:
    """A permutation of tensor factors as a 0/1 matrix.

    Attributes:
        kind: "identity", "cycle", "anticycle" or "flip(i,j)".
        source: out-position k carries the input factor source[k] (0-based).
        matrix: The permutation matrix.
    """

    kind: str
    source: tuple[int, ...]
    matrix: Operator


@dataclass(frozen=True, eq=False)
class Permutations:
    """Named permutation operators on (C^d)^⊗n, indexable by name ("T", "F12", ...)."""

    parties: int
    local_dim: int
    ops: dict[str, PermutationOp]

    def __getitem__(self, name: str) -> Operator:
        return self.ops[name].matrix

    @property
    def names(self) -> list[str]:
        return list(self.ops)


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    """Ordered orthonormal vectors and the projector they span."""

    label: str
    local_dim: int
    vectors: list[StateVector]
    projector: Operator

    @property
    def rank(self) -> int:
        return len(self.vectors)


@dataclass(frozen=True, eq=False)
class TripartiteProjectors:
    """Π_S, Π_A, Π_J, Π_J̄ for three qudits; they sum to the identity."""

    local_dim: int
    S: Operator
    A: Operator
    J: Operator
    Jbar: Operator

    def as_dict(self) -> dict[str, Operator]:
        return {"S": self.S, "A": self.A, "J": self.J, "Jbar": self.Jbar}


@dataclass(frozen=True, eq=False)
class PairProjectors:
    """Two-party symmetric and antisymmetric projectors (1 ± F)/2."""

    local_dim: int
    S: Operator
    A: Operator


@dataclass(frozen=True, eq=False)
class FlipConjugateProjectors:
    """Π_I and its complex conjugate Π_Ī."""

    local_dim: int
    z: complex
    pi: Operator
    pi_bar: Operator


def permutation_matrix(source: Sequence[int], d: int) -> ComplexArray:
    """Matrix P with P|a_0 ... a_{n-1}⟩ = |a_{source[0]} ... a_{source[n-1]}⟩."""
    n = len(source)
    shape = (d,) * n
    columns = np.arange(d**n)
    digits = np.unravel_index(columns, shape)
    rows = np.ravel_multi_index(tuple(digits[s] for s in source), shape)
    matrix = np.zeros((d**n, d**n), dtype=np.complex128)
    matrix[rows, columns] = 1.0
    return matrix


def _cycle_source(n: int, power: int) -> tuple[int, ...]:
    # T moves the last factor to the front: out[k] = in[k-1 mod n]
    return tuple((k - power) % n for k in range(n))


def _flip_source(n: int, i: int, j: int) -> tuple[int, ...]:
    source = list(range(n))
    source[i], source[j] = source[j], source[i]
    return tuple(source)


def build_permutations(d: int, n: int = 3) -> Permutations:
    """Build the identity, cyclic shifts and all flips on (C^d)^⊗n.

    Names: "identity", "T" (cycle), "T2" (T², for n=3 the anticycle), "T3" for
    n=4, and "Fij" for each pair i<j (1-based).

    Args:
        d: Local dimension, at least 2.
        n: Number of parties, one of 2, 3, 4.

    Returns:
        Permutations indexed by name.

    Raises:
        DimensionError: If d < 2.
        UnsupportedCombinationError: If n is not 2, 3 or 4.
    """
    if d < 2:
        raise DimensionError(f"local dimension must be >= 2, got {d}")
    if n not in SUPPORTED_PARTY_COUNTS:
        raise UnsupportedCombinationError("party count", n, SUPPORTED_PARTY_COUNTS)

    ops: dict[str, PermutationOp] = {}

    def add(name: str, kind: str, source: tuple[int, ...]) -> None:
        ops[name] = PermutationOp(kind, source, Operator(permutation_matrix(source, d), n, d))

    add("identity", "identity", tuple(range(n)))
    if n >= 3:
        add("T", "cycle", _cycle_source(n, 1))
        for power in range(2, n):
            kind = "anticycle" if power == n - 1 else "cycle"
            add(f"T{power}", kind, _cycle_source(n, power))
    for i, j in combinations(range(n), 2):
        add(f"F{i + 1}{j + 1}", f"flip({i + 1},{j + 1})", _flip_source(n, i, j))
    return Permutations(parties=n, local_dim=d, ops=ops)


def four_party_cycle(d: int) -> Operator:
    """The four-party translation T|abcd⟩ = |dabc⟩."""
    return build_permutations(d, 4)["T"]


def pair_projectors(d: int) -> PairProjectors:
    """Symmetric and antisymmetric projectors (1 ± F)/2 on two qudits."""
    perms = build_permutations(d, 2)
    identity, flip = perms["identity"], perms["F12"]
    return PairProjectors(
        local_dim=d,
        S=((identity + flip) / 2).as_hermitian(),
        A=((identity - flip) / 2).as_hermitian(),
    )


def tripartite_projectors(d: int) -> TripartiteProjectors:
    """Projectors onto the symmetric, antisymmetric, chiral and antichiral subspaces.

    Π_S = (1+F12+F23+F13+T+T²)/6, Π_A = (1-F12-F23-F13+T+T²)/6,
    Π_J = (1+ω²T+ωT²)/3, Π_J̄ = (1+ωT+ω²T²)/3. For d = 2, Π_A = 0.
    """
    p = build_permutations(d, 3)
    one, t, t2 = p["identity"], p["T"], p["T2"]
    flips = p["F12"] + p["F23"] + p["F13"]
    w, w2 = OMEGA, OMEGA.conjugate()
    return TripartiteProjectors(
        local_dim=d,
        S=((one + flips + t + t2) / 6).as_hermitian(),
        A=((one - flips + t + t2) / 6).as_hermitian(),
        J=((one + w2 * t + w * t2) / 3).as_hermitian(),
        Jbar=((one + w * t + w2 * t2) / 3).as_hermitian(),
    )


def subspace_traces(d: int) -> dict[str, int]:
    """Exact integer traces of Π_S, Π_A, Π_J, Π_J̄."""
    return {
        "S": (d**3 + 3 * d**2 + 2 * d) // 6,
        "A": (d**3 - 3 * d**2 + 2 * d) // 6,
        "J": (d**3 - d) // 3,
        "Jbar": (d**3 - d) // 3,
    }


def make_basis(label: str, vectors: list[StateVector]) -> SubspaceBasis:
    """Bundle orthonormal vectors with their span projector.

    Raises:
        InvalidStateError: If the vectors are not orthonormal within 1e-12.
    """
    if not vectors:
        raise InvalidStateError(f"basis {label} has no vectors")
    first = vectors[0]
    stack = np.column_stack([v.amplitudes for v in vectors])
    gram = stack.conj().T @ stack
    deviation = float(np.max(np.abs(gram - np.eye(len(vectors)))))
    if deviation > ORTHONORMAL_TOL:
        raise InvalidStateError(f"basis {label} is not orthonormal (deviation {deviation:.3g})")
    projector = Operator(stack @ stack.conj().T, first.parties, first.local_dim, True)
    return SubspaceBasis(label=label, local_dim=first.local_dim, vectors=vectors, projector=projector)


def _triple(terms: Sequence[tuple[int, int, int]], d: int, phases: Sequence[complex]) -> StateVector:
    amplitudes = np.zeros(d**3, dtype=np.complex128)
    for digits, phase in zip(terms, phases, strict=True):
        amplitudes[basis_index(digits, d)] += phase
    return StateVector.from_amplitudes(amplitudes, 3, d)


_CHIRAL_PHASES = (1.0, OMEGA, OMEGA**2)


def phi_alpha(i: int, j: int, d: int) -> StateVector:
    """(|iij⟩ + ω|iji⟩ + ω²|jii⟩)/√3."""
    return _triple([(i, i, j), (i, j, i), (j, i, i)], d, _CHIRAL_PHASES)


def phi_beta(i: int, j: int, d: int) -> StateVector:
    """(|jji⟩ + ω|jij⟩ + ω²|ijj⟩)/√3."""
    return _triple([(j, j, i), (j, i, j), (i, j, j)], d, _CHIRAL_PHASES)


def phi_gamma(i: int, j: int, k: int, d: int) -> StateVector:
    """(|ijk⟩ + ω|jki⟩ + ω²|kij⟩)/√3."""
    return _triple([(i, j, k), (j, k, i), (k, i, j)], d, _CHIRAL_PHASES)


def phi_delta(i: int, j: int, k: int, d: int) -> StateVector:
    """(|ikj⟩ + ω|kji⟩ + ω²|jik⟩)/√3."""
    return _triple([(i, k, j), (k, j, i), (j, i, k)], d, _CHIRAL_PHASES)


def chiral_basis(d: int) -> SubspaceBasis:
    """Orthonormal basis of the chiral subspace H_J, d(d²-1)/3 vectors.

    Ordered φ_α over pairs, then φ_β, then φ_γ and φ_δ over triples, each
    lexicographic. For qubits this is {|φ_1⟩, |φ_2⟩}.
    """
    if d < 2:
        raise DimensionError(f"local dimension must be >= 2, got {d}")
    pairs = list(combinations(range(d), 2))
    triples = list(combinations(range(d), 3))
    vectors = [phi_alpha(i, j, d) for i, j in pairs]
    vectors += [phi_beta(i, j, d) for i, j in pairs]
    vectors += [phi_gamma(i, j, k, d) for i, j, k in triples]
    vectors += [phi_delta(i, j, k, d) for i, j, k in triples]
    return make_basis("J", vectors)


def antichiral_basis(d: int) -> SubspaceBasis:
    """Complex conjugate of chiral_basis: the T-eigenspace with eigenvalue ω²."""
    return make_basis("Jbar", [v.conjugate() for v in chiral_basis(d).vectors])


def j1_basis() -> SubspaceBasis:
    """Qutrit H_J1: the φ_α and φ_β vectors, orthogonal complement of H_J2 in H_J."""
    pairs = list(combinations(range(3), 2))
    vectors = [phi_alpha(i, j, 3) for i, j in pairs] + [phi_beta(i, j, 3) for i, j in pairs]
    return make_basis("J1", vectors)


def j2_basis() -> SubspaceBasis:
    """Qutrit H_J2 spanned by φ_γ and φ_δ for (i,j,k) = (0,1,2); every state is AME."""
    return make_basis("J2", [phi_gamma(0, 1, 2, 3), phi_delta(0, 1, 2, 3)])


def default_z(d: int) -> complex:
    """z_d = (1 + i√((d+1)/(d-1)))/2."""
    if d < 2:
        raise DimensionError(f"local dimension must be >= 2, got {d}")
    return complex(0.5, 0.5 * np.sqrt((d + 1) / (d - 1)))


def _anchored_positions(party: int) -> tuple[int, int, int]:
    if party not in (1, 2, 3):
        raise DimensionError(f"party must be 1, 2 or 3, got {party}")
    anchor = party - 1
    q, r = (k for k in range(3) if k != anchor)
    return anchor, q, r


def flip_conjugate_vector(n: int, d: int, z: complex, party: int = 1) -> StateVector:
    """|φ_n⟩ ∝ z*Σ_i|i n i⟩ + zΣ_i|i i n⟩ (party 1 unflipped; other parties by relabelling)."""
    anchor, q, r = _anchored_positions(party)
    amplitudes = np.zeros(d**3, dtype=np.complex128)
    for i in range(d):
        first = [0, 0, 0]
        first[anchor], first[q], first[r] = i, n, i
        second = [0, 0, 0]
        second[anchor], second[q], second[r] = i, i, n
        amplitudes[basis_index(first, d)] += z.conjugate()
        amplitudes[basis_index(second, d)] += z
    return StateVector.from_amplitudes(amplitudes, 3, d)


def flip_conjugate_basis(d: int, z: complex | None = None, party: int = 1) -> SubspaceBasis:
    """Basis |φ_0⟩..|φ_{d-1}⟩ of the flip-conjugate subspace H_I.

    Swapping the two flipped parties maps each vector to its complex conjugate.

    Args:
        d: Local dimension, at least 2.
        z: Complex weight; defaults to z_d. Vectors are renormalized, so |z| is free.
        party: The party left unflipped (1 gives H_I, 2 and 3 the analogous subspaces).

    Raises:
        InvalidStateError: If z is zero.
    """
    weight = default_z(d) if z is None else complex(z)
    if weight == 0:
        raise InvalidStateError("flip-conjugate weight z must be nonzero")
    vectors = [flip_conjugate_vector(n, d, weight, party) for n in range(d)]
    return make_basis("I", vectors)


def flip_conjugate_projectors(d: int) -> FlipConjugateProjectors:
    """Π_I and Π_Ī from partially transposed permutations.

    With 𝔽_ij = F_ij^{T_1} and 𝕋 = T^{T_1}:
    Π_I = (|z|²(𝔽12 + 𝔽13) + z²𝕋 + z*²𝕋²)/(d+1), Π_Ī its conjugate.
    """
    z = default_z(d)
    p = build_permutations(d, 3)
    f12 = partial_transpose(p["F12"], {1})
    f13 = partial_transpose(p["F13"], {1})
    tt = partial_transpose(p["T"], {1})
    tt2 = partial_transpose(p["T2"], {1})
    pi_i = (abs(z) ** 2 * (f12 + f13) + z**2 * tt + z.conjugate() ** 2 * tt2) / (d + 1)
    pi_i = pi_i.as_hermitian()
    return FlipConjugateProjectors(local_dim=d, z=z, pi=pi_i, pi_bar=pi_i.conjugate())


def w_state() -> StateVector:
    """(|001⟩ + |010⟩ + |100⟩)/√3."""
    return _triple([(0, 0, 1), (0, 1, 0), (1, 0, 0)], 2, (1.0, 1.0, 1.0))


def phase_state(d: int, alpha: float = np.pi / 2) -> StateVector:
    """e^{iα}Σ_i|i0i⟩ + e^{-iα}Σ_i|ii0⟩, normalized.

    At α = π/2 this is (i|φ+⟩_AC|0⟩_B - i|φ+⟩_AB|0⟩_C)/√(2(d-1)).

    Raises:
        UnsupportedCombinationError: For d = 2 at α = π/2, where the state is biseparable.
    """
    if d < 2:
        raise DimensionError(f"local dimension must be >= 2, got {d}")
    if d == 2 and np.isclose(np.cos(alpha), 0.0, atol=1e-12):
        raise UnsupportedCombinationError("phase_state dimension at alpha=pi/2", d, ["d >= 3"])
    amplitudes = np.zeros(d**3, dtype=np.complex128)
    for i in range(d):
        amplitudes[basis_index((i, 0, i), d)] += np.exp(1j * alpha)
        amplitudes[basis_index((i, i, 0), d)] += np.exp(-1j * alpha)
    return StateVector.from_amplitudes(amplitudes, 3, d)


def four_qubit_m() -> StateVector:
    """|M⟩ = (|φ_1⟩|1⟩ + |φ_2⟩|0⟩)/√2 on four qubits."""
    phi_1, phi_2 = chiral_basis(2).vectors
    one = np.array([0.0, 1.0], dtype=np.complex128)
    zero = np.array([1.0, 0.0], dtype=np.complex128)
    amplitudes = np.kron(phi_1.amplitudes, one) + np.kron(phi_2.amplitudes, zero)
    return StateVector.from_amplitudes(amplitudes, 4, 2)


def _antisymmetric_qutrit_tensor() -> ComplexArray:
    eps = np.zeros((3, 3, 3), dtype=np.complex128)
    for (a, b, c), sign in (((0, 1, 2), 1), ((1, 2, 0), 1), ((2, 0, 1), 1),
                            ((0, 2, 1), -1), ((2, 1, 0), -1), ((1, 0, 2), -1)):
        eps[a, b, c] = sign
    return eps


# Weights of the ABC, ABD, ACD, BCD terms: (1, ω³, ω², ω) with ω = i
FOUR_QUTRIT_PHASES = (1.0 + 0j, -1j, -1.0 + 0j, 1j)


def four_qutrit_chiral() -> StateVector:
    """Four-qutrit superposition of antisymmetric triples, an eigenvector of the 4-cycle.

    ψ = Σ_k φ_k |ψ3⟩_{triple_k}|0⟩_{rest_k} over the triples ABC, ABD, ACD, BCD
    with φ = FOUR_QUTRIT_PHASES, where |ψ3⟩ is the totally antisymmetric
    three-qutrit state. With T|abcd⟩ = |dabc⟩ each term maps onto the previous
    one, so T|ψ⟩ = -i|ψ⟩ and T⁻¹|ψ⟩ = i|ψ⟩.
    """
    eps = _antisymmetric_qutrit_tensor()
    ket0 = np.array([1.0, 0.0, 0.0], dtype=np.complex128)
    # ABC|0_D, ABD|0_C, ACD|0_B, BCD|0_A as index strings
    layouts = ("abcz", "abzc", "azbc", "zabc")
    total = np.zeros((3, 3, 3, 3), dtype=np.complex128)
    for phase, layout in zip(FOUR_QUTRIT_PHASES, layouts, strict=True):
        total += phase * np.einsum(f"abc,z->{layout}", eps, ket0)
    return StateVector.from_amplitudes(total.reshape(-1), 4, 3)


SPECIAL_STATES = ("phase", "m4", "qutrit4", "w")


def special_state(kind: str, d: int = 3, alpha: float = np.pi / 2) -> StateVector:
    """One of the named special states.

    Args:
        kind: "phase" (phase_state(d, alpha)), "m4" (four-qubit |M⟩),
            "qutrit4" (four-qutrit chiral state) or "w" (three-qubit |W⟩).
        d: Local dimension, used by "phase" only.
        alpha: Phase, used by "phase" only.

    Raises:
        UnsupportedCombinationError: For an unknown kind.
    """
    if kind == "phase":
        return phase_state(d, alpha)
    if kind == "m4":
        return four_qubit_m()
    if kind == "qutrit4":
        return four_qutrit_chiral()
    if kind == "w":
        return w_state()
    raise UnsupportedCombinationError("special state", kind, SPECIAL_STATES)


def basis_from_projector(label: str, projector: Operator) -> SubspaceBasis:
    """Orthonormal basis of a projector's range from its unit eigenvectors."""
    values, vectors = np.linalg.eigh(projector.entries)
    columns = vectors[:, values > 0.5]
    states = [StateVector.from_amplitudes(columns[:, k], projector.parties, projector.local_dim)
              for k in range(columns.shape[1])]
    return make_basis(label, states)


def all_bases(d: int) -> dict[str, SubspaceBasis]:
    """Every named subspace basis available at local dimension d."""
    projectors = tripartite_projectors(d)
    pairs = pair_projectors(d)
    flip_conj = flip_conjugate_basis(d)
    bases = {
        "S": basis_from_projector("S", projectors.S),
        "J": chiral_basis(d),
        "Jbar": antichiral_basis(d),
        "I": flip_conj,
        "Ibar": make_basis("Ibar", [v.conjugate() for v in flip_conj.vectors]),
        "pairS": basis_from_projector("pairS", pairs.S),
        "pairA": basis_from_projector("pairA", pairs.A),
    }
    if d >= 3:
        bases["A"] = basis_from_projector("A", projectors.A)
    if d == 3:
        bases["J1"] = j1_basis()
        bases["J2"] = j2_basis()
    return bases
