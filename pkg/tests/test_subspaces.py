"""Tests for permutation operators, tripartite projectors and explicit bases."""

import numpy as np
import pytest

from entlab.errors import DimensionError, InvalidStateError, UnsupportedCombinationError
from entlab.linalg import OMEGA, StateVector, reduced_density_matrix
from entlab.subspaces import (
    FOUR_QUTRIT_PHASES,
    all_bases,
    antichiral_basis,
    build_permutations,
    chiral_basis,
    flip_conjugate_basis,
    flip_conjugate_projectors,
    four_party_cycle,
    four_qubit_m,
    four_qutrit_chiral,
    j1_basis,
    j2_basis,
    pair_projectors,
    phase_state,
    special_state,
    subspace_traces,
    tripartite_projectors,
    w_state,
)

DIMENSIONS = [pytest.param(d, id=f"d{d}") for d in (2, 3, 4, 5)]


class TestPermutations:
    """Tests for build_permutations."""

    def test_cycle_moves_last_factor_to_front(self) -> None:
        """Verify T|abc⟩ = |cab⟩."""
        # Given
        t = build_permutations(3, 3)["T"]
        ket = StateVector.basis((0, 1, 2), 3)

        # When
        moved = t.apply(ket)

        # Then
        assert np.allclose(moved, StateVector.basis((2, 0, 1), 3).amplitudes)

    def test_cycle_cubed_is_identity(self) -> None:
        """Verify T³ = 1 on three parties."""
        p = build_permutations(2, 3)
        assert (p["T"] @ p["T2"]).allclose(p["identity"], atol=0.0)

    def test_four_party_cycle(self) -> None:
        """Verify T|abcd⟩ = |dabc⟩."""
        t = four_party_cycle(2)
        moved = t.apply(StateVector.basis((0, 0, 0, 1), 2))
        assert np.allclose(moved, StateVector.basis((1, 0, 0, 0), 2).amplitudes)

    def test_names_for_three_parties(self) -> None:
        """Verify the named operators."""
        assert build_permutations(2, 3).names == ["identity", "T", "T2", "F12", "F13", "F23"]

    @pytest.mark.parametrize(
        ("d", "n", "error"),
        [
            pytest.param(1, 3, DimensionError, id="d-too-small"),
            pytest.param(2, 5, UnsupportedCombinationError, id="five-parties"),
        ],
    )
    def test_invalid_arguments(self, d: int, n: int, error: type[Exception]) -> None:
        """Verify unsupported sizes raise."""
        with pytest.raises(error):
            build_permutations(d, n)


class TestTripartiteProjectors:
    """Tests for Π_S, Π_A, Π_J, Π_J̄."""

    @pytest.mark.parametrize("d", DIMENSIONS)
    def test_projectors_are_idempotent_and_complete(self, d: int) -> None:
        """Verify P² = P and Σ P = 1."""
        projectors = tripartite_projectors(d).as_dict()
        total = np.zeros((d**3, d**3), dtype=np.complex128)
        for p in projectors.values():
            assert p.max_abs_diff(p @ p) < 1e-12
            total += p.entries
        assert np.allclose(total, np.eye(d**3), atol=1e-12)

    @pytest.mark.parametrize("d", DIMENSIONS)
    def test_projectors_are_orthogonal(self, d: int) -> None:
        """Verify P_a P_b = 0 for a ≠ b."""
        projectors = list(tripartite_projectors(d).as_dict().values())
        for i, a in enumerate(projectors):
            for b in projectors[i + 1 :]:
                assert np.max(np.abs((a @ b).entries)) < 1e-12

    @pytest.mark.parametrize("d", DIMENSIONS)
    def test_traces_match_closed_forms(self, d: int) -> None:
        """Verify numeric traces equal the exact integer traces."""
        expected = subspace_traces(d)
        for name, p in tripartite_projectors(d).as_dict().items():
            assert p.trace().real == pytest.approx(expected[name], abs=1e-12)

    def test_integer_traces_sum_to_dimension(self) -> None:
        """Verify the exact traces add up to d³."""
        for d in range(2, 9):
            assert sum(subspace_traces(d).values()) == d**3

    def test_qubit_antisymmetric_projector_vanishes(self) -> None:
        """Verify Π_A = 0 for d = 2."""
        assert np.allclose(tripartite_projectors(2).A.entries, 0.0)

    def test_pair_projectors(self) -> None:
        """Verify the two-party projectors have ranks d(d±1)/2."""
        pairs = pair_projectors(3)
        assert pairs.S.trace().real == pytest.approx(6)
        assert pairs.A.trace().real == pytest.approx(3)


class TestChiralBases:
    """Tests for the explicit chiral and antichiral bases."""

    @pytest.mark.parametrize("d", DIMENSIONS)
    def test_chiral_basis_spans_pi_j(self, d: int) -> None:
        """Verify the basis projector equals Π_J."""
        basis = chiral_basis(d)
        assert basis.rank == (d**3 - d) // 3
        assert basis.projector.max_abs_diff(tripartite_projectors(d).J) < 1e-12

    def test_chiral_vectors_are_t_eigenvectors(self) -> None:
        """Verify T|φ⟩ = ω|φ⟩ for every chiral basis vector."""
        t = build_permutations(3, 3)["T"]
        for v in chiral_basis(3).vectors:
            assert np.allclose(t.apply(v), OMEGA * v.amplitudes, atol=1e-12)

    def test_antichiral_basis_spans_pi_jbar(self) -> None:
        """Verify the conjugate basis spans Π_J̄."""
        assert antichiral_basis(4).projector.max_abs_diff(tripartite_projectors(4).Jbar) < 1e-12

    def test_j1_and_j2_split_the_qutrit_chiral_space(self) -> None:
        """Verify H_J = H_J1 ⊕ H_J2 for qutrits."""
        total = j1_basis().projector + j2_basis().projector
        assert total.max_abs_diff(tripartite_projectors(3).J) < 1e-12

    def test_j2_states_are_absolutely_maximally_entangled(self) -> None:
        """Verify every single-party reduction of the H_J2 basis is 1/3."""
        for v in j2_basis().vectors:
            for party in (1, 2, 3):
                assert np.allclose(reduced_density_matrix(v, (party,)), np.eye(3) / 3, atol=1e-12)


class TestFlipConjugate:
    """Tests for the flip-conjugate subspace."""

    @pytest.mark.parametrize("d", [pytest.param(d, id=f"d{d}") for d in (2, 3, 4)])
    def test_projector_matches_basis(self, d: int) -> None:
        """Verify Π_I from partially transposed permutations equals the basis projector."""
        pi = flip_conjugate_projectors(d).pi
        assert pi.max_abs_diff(flip_conjugate_basis(d).projector) < 1e-12

    def test_swap_conjugates_the_vectors(self) -> None:
        """Verify F23|φ_n⟩ = |φ_n⟩* for party 1 left unflipped."""
        flip = build_permutations(3, 3)["F23"]
        for v in flip_conjugate_basis(3).vectors:
            assert np.allclose(flip.apply(v), v.amplitudes.conj(), atol=1e-12)

    def test_other_anchor_parties(self) -> None:
        """Verify the party-2 variant is conjugated by F13."""
        flip = build_permutations(3, 3)["F13"]
        for v in flip_conjugate_basis(3, party=2).vectors:
            assert np.allclose(flip.apply(v), v.amplitudes.conj(), atol=1e-12)

    def test_zero_weight_is_refused(self) -> None:
        """Verify z = 0 is invalid."""
        with pytest.raises(InvalidStateError):
            flip_conjugate_basis(3, z=0)


class TestSpecialStates:
    """Tests for the named special states."""

    def test_w_state_is_symmetric(self) -> None:
        """Verify |W⟩ lies in the symmetric subspace."""
        psi = w_state()
        assert tripartite_projectors(2).S.expectation(psi).real == pytest.approx(1.0)

    def test_phase_state_is_chiral_at_quarter_turn(self) -> None:
        """Verify the α = π/2 phase state has no symmetric or antisymmetric weight."""
        proj = tripartite_projectors(3)
        psi = phase_state(3)
        assert proj.S.expectation(psi).real == pytest.approx(0.0, abs=1e-12)
        assert proj.A.expectation(psi).real == pytest.approx(0.0, abs=1e-12)

    def test_phase_state_refuses_qubits_at_quarter_turn(self) -> None:
        """Verify the biseparable d = 2 case is refused."""
        with pytest.raises(UnsupportedCombinationError):
            phase_state(2)

    def test_four_qubit_m_is_normalized(self) -> None:
        """Verify |M⟩ is a four-qubit unit vector."""
        psi = four_qubit_m()
        assert psi.parties == 4
        assert np.linalg.norm(psi.amplitudes) == pytest.approx(1.0)

    def test_four_qutrit_phases(self) -> None:
        """Verify the triple weights are (1, ω³, ω², ω) with ω = i."""
        omega = 1j
        assert FOUR_QUTRIT_PHASES == pytest.approx((1.0, omega**3, omega**2, omega))

    def test_four_qutrit_chiral_state_is_a_cycle_eigenvector(self) -> None:
        """Verify T|ψ⟩ = -i|ψ⟩ for T|abcd⟩ = |dabc⟩, so the inverse cycle gives +i."""
        # Given
        psi = four_qutrit_chiral()
        t = four_party_cycle(3)

        # When
        moved = t.apply(psi)
        moved_back = (t @ t @ t).apply(psi)

        # Then
        assert np.allclose(moved, -1j * psi.amplitudes, atol=1e-12)
        assert np.allclose(moved_back, 1j * psi.amplitudes, atol=1e-12)

    def test_unknown_special_state(self) -> None:
        """Verify unknown kinds are rejected."""
        with pytest.raises(UnsupportedCombinationError, match="special state"):
            special_state("ghz")

    def test_all_bases_includes_qutrit_split(self) -> None:
        """Verify d = 3 adds the J1 and J2 bases and an antisymmetric one."""
        assert {"A", "J1", "J2"} <= set(all_bases(3))
        assert "A" not in all_bases(2)
