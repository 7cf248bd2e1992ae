"""Tests for the barrier SDP solver and the invariant-state problems."""

from dataclasses import replace
from unittest.mock import patch

import numpy as np
import pytest

from entlab.errors import (
    DimensionError,
    NotConvergedError,
    SizeCapError,
    SolverError,
    UnsupportedCombinationError,
)
from entlab.linalg import Operator, random_state
from entlab.sdp import (
    BoundaryFamily,
    InvariantState,
    LmiBlock,
    LmiProblem,
    PptGmeSweep,
    SdpSolution,
    SdpStatus,
    WitnessPair,
    find_ppt_gme,
    gme_decide,
    invariant_boundary,
    invariant_expectations,
    invariant_projection,
    ppt_gme_family_state,
    ppt_relaxed_overlap,
    pptmix_boundary,
    pt_invariant_boundary,
    solve_lmi,
    twirl,
    witness_pair,
)
from entlab.subspaces import flip_conjugate_projectors, subspace_traces, tripartite_projectors
from entlab.witnesses import conditional_observable


@pytest.fixture(scope="module")
def qutrit_sweep() -> PptGmeSweep:
    """The default d = 3 PPT-GME sweep, shared by the slow sweep tests."""
    return find_ppt_gme(3)


def scalar_block(constant: float, coefficient: float) -> LmiBlock:
    return LmiBlock(np.array([[constant]]), np.array([[[coefficient]]]))


def maximally_entangled(d: int) -> Operator:
    phi = np.eye(d).reshape(-1) / np.sqrt(d)
    return Operator(np.outer(phi, phi.conj()), 2, d, True)


class TestSolveLmi:
    """Tests for the generic LMI solver."""

    def test_linear_program(self) -> None:
        """Verify min -x over 0 <= x <= 1 reaches -1 from an infeasible start."""
        # Given
        problem = LmiProblem(objective=np.array([-1.0]), blocks=[scalar_block(0.0, 1.0), scalar_block(1.0, -1.0)])

        # When
        solution = solve_lmi(problem)

        # Then
        assert solution.status is SdpStatus.OPTIMAL
        assert solution.objective == pytest.approx(-1.0, abs=1e-7)
        assert solution.dual_bound <= solution.objective
        assert np.all(solution.min_block_eigs > 0)

    def test_gap_is_relative_to_the_objective(self) -> None:
        """Verify a large optimum stops once the gap is small against |c·x|."""
        # Given - min -x over 0 <= x <= 1e6
        scale = 1e6
        problem = LmiProblem(
            objective=np.array([-1.0]), blocks=[scalar_block(0.0, 1.0), scalar_block(scale, -1.0)]
        )

        # When
        solution = solve_lmi(problem, tol=1e-8)

        # Then
        assert solution.status is SdpStatus.OPTIMAL
        assert solution.objective == pytest.approx(-scale, rel=1e-7)
        assert 1e-8 < solution.gap_estimate <= 1e-8 * scale

    def test_largest_eigenvalue(self) -> None:
        """Verify max Tr(Aρ) over density matrices equals λ_max(A)."""
        # Given
        a = np.array([[2.0, 1.0], [1.0, -1.0]])
        basis = np.array(
            [[[1, 0], [0, 0]], [[0, 0], [0, 1]], [[0, 1], [1, 0]], [[0, -1j], [1j, 0]]],
            dtype=np.complex128,
        )
        problem = LmiProblem(
            objective=-np.real(np.einsum("kij,ji->k", basis, a)),
            blocks=[LmiBlock(np.zeros((2, 2)), basis)],
            equalities=np.array([[1.0, 1.0, 0.0, 0.0]]),
            rhs=np.array([1.0]),
            initial=np.array([0.5, 0.5, 0.0, 0.0]),
        )

        # When
        solution = solve_lmi(problem)

        # Then
        assert -solution.objective == pytest.approx(np.linalg.eigvalsh(a)[-1], abs=1e-7)

    def test_inconsistent_equalities(self) -> None:
        """Verify contradictory equalities report infeasible."""
        problem = LmiProblem(
            objective=np.array([1.0]),
            blocks=[scalar_block(1.0, 1.0)],
            equalities=np.array([[1.0], [1.0]]),
            rhs=np.array([1.0, 2.0]),
        )
        assert solve_lmi(problem).status is SdpStatus.INFEASIBLE

    def test_empty_feasible_set(self) -> None:
        """Verify x >= 0 and x <= -1 is detected as infeasible by phase I."""
        problem = LmiProblem(objective=np.array([1.0]), blocks=[scalar_block(0.0, 1.0), scalar_block(-1.0, -1.0)])
        assert solve_lmi(problem).status is SdpStatus.INFEASIBLE

    def test_non_hermitian_block(self) -> None:
        """Verify a non-Hermitian coefficient is refused."""
        with pytest.raises(SolverError, match="not Hermitian"):
            LmiBlock(np.zeros((2, 2)), np.array([[[0.0, 1.0], [0.0, 0.0]]]))

    def test_block_shape_mismatch(self) -> None:
        """Verify the constant and coefficient shapes must agree."""
        with pytest.raises(DimensionError):
            LmiBlock(np.zeros((2, 2)), np.zeros((1, 3, 3)))

    def test_variable_count_mismatch(self) -> None:
        """Verify every block carries one coefficient per variable."""
        with pytest.raises(DimensionError, match="expected 2"):
            LmiProblem(objective=np.zeros(2), blocks=[scalar_block(1.0, 1.0)])


class TestInvariantStates:
    """Tests for the six-parameter invariant family."""

    def test_from_spectral_matches_projectors(self) -> None:
        """Verify permutation coordinates reproduce aΠ_A + bΠ_S + c_JΠ_J + c_J̄Π_J̄."""
        # Given
        d, a, b, cj, cjb = 3, 0.01, 0.02, 0.005, 0.015
        proj = tripartite_projectors(d)

        # When
        state = InvariantState.from_spectral(d, a, b, cj, cjb).operator()

        # Then
        expected = a * proj.A + b * proj.S + cj * proj.J + cjb * proj.Jbar
        assert state.max_abs_diff(expected) < 1e-12

    def test_maximally_mixed_is_a_state(self) -> None:
        """Verify 1/d³ passes density-matrix validation."""
        assert InvariantState.maximally_mixed(3).validate().is_valid

    def test_projection_preserves_witness_expectations(self, make_state) -> None:
        """Verify twirling leaves ⟨W-⟩ and ⟨W+⟩ unchanged."""
        # Given
        rho = make_state(3, 3).projector()

        # When
        projected = invariant_projection(rho).operator()

        # Then
        assert invariant_expectations(projected) == pytest.approx(invariant_expectations(rho), abs=1e-10)

    def test_projection_fixes_invariant_states(self) -> None:
        """Verify an invariant operator projects onto itself."""
        state = InvariantState.from_spectral(3, 0.02, 0.03, 0.0, 0.01)
        again = invariant_projection(state.operator())
        assert again.operator().max_abs_diff(state.operator()) < 1e-12

    def test_twirl_fixes_invariant_states(self) -> None:
        """Verify U⊗3 conjugation leaves the identity unchanged."""
        identity = Operator.identity(3, 2) / 8
        assert twirl(identity, 3, 0).max_abs_diff(identity) < 1e-12

    def test_projection_needs_three_parties(self) -> None:
        """Verify two-party input is refused."""
        with pytest.raises(DimensionError):
            invariant_projection(random_state(2, 3, 0).projector())

    def test_pt_pair_expectations(self) -> None:
        """Verify the 𝕎 pair is the partial transpose of W±."""
        minus, plus = witness_pair(3, WitnessPair.WPT)
        assert minus.parties == 3
        assert plus.hermitian_deviation() < 1e-12


class TestBoundaries:
    """Tests for support functions of invariant state sets."""

    def test_quantum_support(self) -> None:
        """Verify the quantum support function is the top eigenvalue."""
        assert invariant_boundary(3, 0.0, "quantum").value == pytest.approx(3 * np.sqrt(3.0), abs=1e-9)
        assert invariant_boundary(3, np.pi / 2, "quantum").value == pytest.approx(40 / 3, abs=1e-9)

    def test_quantum_support_point(self) -> None:
        """Verify the support point lies on the supporting line."""
        theta = 1.1
        point = invariant_boundary(3, theta, BoundaryFamily.QUANTUM)
        projected = np.cos(theta) * point.point[0] + np.sin(theta) * point.point[1]
        assert projected == pytest.approx(point.value, abs=1e-9)

    def test_ppt_support_contains_separable_states(self) -> None:
        """Verify the PPT support at θ = 0 reaches at least fs(W-)."""
        assert invariant_boundary(3, 0.0, BoundaryFamily.PPT_ALL).value >= 1.5 - 1e-6

    def test_ppt_sets_are_nested(self) -> None:
        """Verify ppt_all ≤ pptmix ≤ quantum."""
        theta = 0.4
        ppt = invariant_boundary(3, theta).value
        mix = pptmix_boundary(3, theta).value
        quantum = invariant_boundary(3, theta, "quantum").value
        assert ppt <= mix + 1e-6
        assert mix <= quantum + 1e-6

    def test_single_cut_needs_party(self) -> None:
        """Verify ppt_single without a party is refused."""
        with pytest.raises(DimensionError):
            invariant_boundary(3, 0.0, BoundaryFamily.PPT_SINGLE)

    def test_single_cut_label(self) -> None:
        """Verify the family label names the cut."""
        assert invariant_boundary(3, 0.0, BoundaryFamily.PPT_SINGLE, party=2).family == "ppt2"

    @pytest.mark.parametrize("d", [2, 6])
    def test_unsupported_dimension(self, d: int) -> None:
        """Verify dimensions outside 3..5 are refused."""
        with pytest.raises(UnsupportedCombinationError):
            invariant_boundary(d, 0.0)

    def test_pt_pair_quantum_support(self) -> None:
        """Verify the 𝕎-pair quantum support is λ_max(cos θ 𝕎- + sin θ 𝕎+)."""
        minus, plus = witness_pair(3, WitnessPair.WPT)
        top = np.linalg.eigvalsh((0.6 * minus + 0.8 * plus).entries)[-1]
        theta = float(np.arctan2(0.8, 0.6))
        assert pt_invariant_boundary(3, theta, "quantum").value == pytest.approx(top, abs=1e-9)


class TestPptRelaxedOverlap:
    """Tests for the PPT relaxation of the product overlap."""

    def test_product_projector(self) -> None:
        """Verify a product projector reaches 1."""
        ket = np.zeros(9, dtype=np.complex128)
        ket[0] = 1.0
        y = Operator(np.outer(ket, ket), 2, 3, True)
        assert ppt_relaxed_overlap(y) == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize(
        "d",
        [
            pytest.param(2, id="d2"),
            pytest.param(3, id="d3"),
            pytest.param(4, id="d4"),
            pytest.param(5, id="d5", marks=pytest.mark.slow),
        ],
    )
    def test_maximally_entangled_projector(self, d: int) -> None:
        """Verify PPT states overlap a maximally entangled state by at most 1/d."""
        assert ppt_relaxed_overlap(maximally_entangled(d)) == pytest.approx(1 / d, abs=1e-6)

    @pytest.mark.parametrize(
        "d",
        [
            pytest.param(3, id="d3"),
            pytest.param(4, id="d4"),
            pytest.param(5, id="d5", marks=pytest.mark.slow),
        ],
    )
    def test_flip_conjugate_conditional(self, d: int) -> None:
        """Verify ⟨0|Π_I|0⟩ on party 3 gives d²/((d+1)(d²-1))."""
        # Given
        anchor = np.eye(d, dtype=np.complex128)[0]
        y = conditional_observable(flip_conjugate_projectors(d).pi, 3, anchor)

        # When
        value = ppt_relaxed_overlap(y)

        # Then
        assert value == pytest.approx(d**2 / ((d + 1) * (d**2 - 1)), abs=1e-6)

    def test_size_cap(self) -> None:
        """Verify d = 7 exceeds the cap."""
        y = Operator.identity(2, 7)
        with pytest.raises(SizeCapError, match="d <= 6"):
            ppt_relaxed_overlap(y)

    def test_needs_two_parties(self) -> None:
        """Verify three-party input is refused."""
        with pytest.raises(DimensionError):
            ppt_relaxed_overlap(Operator.identity(3, 2))


class TestGmeDecide:
    """Tests for the invariant GME decision."""

    def test_maximally_mixed_is_biseparable(self) -> None:
        """Verify 1/d³ is not GME."""
        verdict = gme_decide(InvariantState.maximally_mixed(3))
        assert not verdict.is_gme
        assert verdict.optimum >= -1e-7

    def test_antisymmetric_state_is_gme(self) -> None:
        """Verify Π_A / Tr Π_A is detected, with Tr(Pρ) = -1."""
        state = InvariantState.from_spectral(3, 1.0, 0.0, 0.0, 0.0)
        verdict = gme_decide(state)
        assert verdict.is_gme
        assert verdict.p_value == pytest.approx(-1.0, abs=1e-10)

    def test_qubits_have_no_p_witness(self) -> None:
        """Verify d = 2 reports no P values."""
        verdict = gme_decide(InvariantState.maximally_mixed(2))
        assert verdict.p_value is None
        assert verdict.pbar_value is None

    def test_pt_family_is_refused(self) -> None:
        """Verify the partially transposed family has no GME decision."""
        with pytest.raises(UnsupportedCombinationError):
            gme_decide(InvariantState.maximally_mixed(3, pt_party=1))


class TestPptGme:
    """Tests for the PPT-GME family search."""

    def test_family_state_has_unit_trace(self) -> None:
        """Verify b is fixed by normalization."""
        rho = ppt_gme_family_state(3, 0.05, 0.02)
        assert rho.trace().real == pytest.approx(1.0, abs=1e-12)

    def test_family_state_rejects_negative_weight(self) -> None:
        """Verify a too-large a leaves b negative."""
        with pytest.raises(DimensionError, match="nonnegative"):
            ppt_gme_family_state(3, 2.0 / subspace_traces(3)["A"], 0.0)

    def test_qubits_have_no_ppt_gme_states(self) -> None:
        """Verify the d = 2 sweep is empty and says why."""
        sweep = find_ppt_gme(2)
        assert sweep.rows == []
        assert "Π_A" in sweep.note

    def test_unsupported_dimension(self) -> None:
        """Verify d = 5 is refused."""
        with pytest.raises(UnsupportedCombinationError):
            find_ppt_gme(5)

    @pytest.mark.slow
    def test_qutrit_sweep_finds_ppt_gme_states(self, qutrit_sweep: PptGmeSweep) -> None:
        """Verify the d = 3 sweep returns PPT states detected as GME."""
        assert qutrit_sweep.gme_rows()
        for row in qutrit_sweep.rows:
            assert row.min_pt_eig >= -1e-7
            assert row.p_value == pytest.approx(-row.a * subspace_traces(3)["A"], abs=1e-8)
        w_plus = [r.w_plus for r in qutrit_sweep.rows]
        assert w_plus == sorted(w_plus)

    @pytest.mark.slow
    def test_every_pin_yields_a_row(self, qutrit_sweep: PptGmeSweep) -> None:
        """Verify no pin is dropped from the default twelve-point sweep."""
        assert len(qutrit_sweep.rows) == 12

    @pytest.mark.slow
    def test_antisymmetric_weight_rises_then_falls(self, qutrit_sweep: PptGmeSweep) -> None:
        """Verify a is concave along equally spaced ⟨W+⟩ pins and peaks inside the sweep."""
        # Given
        a = np.array([r.a for r in qutrit_sweep.rows])

        # When
        second_differences = a[:-2] + a[2:] - 2 * a[1:-1]

        # Then
        assert np.all(second_differences <= 1e-6)
        assert a[0] < a.max()
        assert a[-1] < a.max()

    @pytest.mark.slow
    def test_unconverged_pin_raises(self) -> None:
        """Verify a pin that runs out of Newton steps raises instead of being skipped."""
        # Given - the two range solves succeed, every later solve reports max_iter
        calls: list[SdpSolution] = []

        def stalled(problem: LmiProblem, tol: float) -> SdpSolution:
            solution = solve_lmi(problem, tol)
            calls.append(solution)
            if len(calls) <= 2:
                return solution
            return replace(solution, status=SdpStatus.MAX_ITER)

        # When / Then
        with (
            patch("entlab.sdp.solve_lmi", side_effect=stalled),
            pytest.raises(NotConvergedError, match="find_ppt_gme"),
        ):
            find_ppt_gme(3, sweep_points=2)
        assert len(calls) >= 3
