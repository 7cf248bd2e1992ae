"""Tests for dense multi-party linear algebra."""

import numpy as np
import pytest
from pydantic import ValidationError

from entlab.errors import DimensionError, InvalidStateError, NotHermitianError, PartyIndexError
from entlab.linalg import (
    MatrixPayload,
    Operator,
    StateVector,
    apply_local,
    bipartitions,
    haar_random_unitary,
    hermitian_eig,
    kron,
    local_operator,
    matrix_from_payload,
    matrix_to_payload,
    modular_shift,
    partial_trace,
    partial_transpose,
    random_state,
    reduced_density_matrix,
    schmidt_coefficients,
)
from entlab.subspaces import build_permutations


class TestOperator:
    """Tests for the Operator container."""

    def test_rejects_non_square_entries(self) -> None:
        """Verify a rectangular matrix is refused."""
        with pytest.raises(DimensionError, match="square"):
            Operator(np.zeros((2, 3)), 1, 2)

    def test_rejects_inconsistent_structure(self) -> None:
        """Verify d**n must equal the matrix dimension."""
        with pytest.raises(DimensionError, match="is not 2\\^3"):
            Operator(np.eye(4), 3, 2)

    def test_hermitian_flag_is_checked(self) -> None:
        """Verify a non-Hermitian matrix cannot be flagged Hermitian."""
        with pytest.raises(NotHermitianError):
            Operator(np.array([[0.0, 1.0], [0.0, 0.0]]), 1, 2, True)

    def test_numpy_scalar_multiplication_returns_operator(self) -> None:
        """Verify numpy scalars on the left produce an Operator, not an object array."""
        # Given
        op = Operator.identity(1, 2)

        # When
        scaled = np.cos(0.0) * op

        # Then
        assert isinstance(scaled, Operator)
        assert scaled.allclose(op, atol=0.0)

    def test_mismatched_spaces_cannot_be_added(self) -> None:
        """Verify operators on different spaces do not combine."""
        with pytest.raises(DimensionError):
            Operator.identity(2, 2) + Operator.identity(1, 4)


class TestStateVector:
    """Tests for StateVector."""

    def test_unnormalized_amplitudes_are_rejected(self) -> None:
        """Verify the constructor refuses a non-unit vector."""
        with pytest.raises(InvalidStateError, match="not normalized"):
            StateVector(np.array([1.0, 1.0]), 1, 2)

    def test_from_amplitudes_normalizes(self) -> None:
        """Verify from_amplitudes rescales to unit norm."""
        psi = StateVector.from_amplitudes([3.0, 4.0], 1, 2)
        assert np.allclose(psi.amplitudes, [0.6, 0.8])

    def test_zero_vector_cannot_be_normalized(self) -> None:
        """Verify the zero vector is refused."""
        with pytest.raises(InvalidStateError, match="zero vector"):
            StateVector.from_amplitudes([0.0, 0.0], 1, 2)

    def test_basis_state_index(self) -> None:
        """Verify |011⟩ sits at row-major index 3."""
        psi = StateVector.basis((0, 1, 1), 2)
        assert psi.amplitudes[3] == 1.0
        assert psi.parties == 3

    def test_basis_digit_out_of_range(self) -> None:
        """Verify digits must lie below the local dimension."""
        with pytest.raises(DimensionError):
            StateVector.basis((0, 2), 2)


class TestKron:
    """Tests for Kronecker products."""

    def test_party_counts_add(self) -> None:
        """Verify the product lives on the combined parties."""
        product = kron(Operator.identity(1, 3), Operator.identity(2, 3))
        assert product.parties == 3
        assert product.dim == 27

    def test_local_dimension_mismatch(self) -> None:
        """Verify factors with different d are refused."""
        with pytest.raises(DimensionError, match="local dimensions differ"):
            kron(Operator.identity(1, 2), Operator.identity(1, 3))


class TestPartialOperations:
    """Tests for partial transpose and partial trace."""

    def test_partial_transpose_of_flip(self) -> None:
        """Verify F^{T_1} is d times the maximally entangled projector."""
        # Given
        d = 3
        flip = build_permutations(d, 2)["F12"]
        phi = np.eye(d).reshape(-1) / np.sqrt(d)

        # When
        pt = partial_transpose(flip, {1})

        # Then
        assert np.allclose(pt.entries, d * np.outer(phi, phi))

    def test_partial_transpose_twice_is_identity(self, make_state) -> None:
        """Verify transposing the same party twice restores the operator."""
        rho = make_state(3, 2).projector()
        twice = partial_transpose(partial_transpose(rho, {2}), {2})
        assert twice.allclose(rho, atol=1e-15)

    def test_partial_trace_of_product(self) -> None:
        """Verify Tr_2(A ⊗ B) = Tr(B) A."""
        a = np.array([[1.0, 2.0], [3.0, 4.0]], dtype=np.complex128)
        b = np.array([[0.5, 0.0], [0.0, 1.5]], dtype=np.complex128)
        reduced = partial_trace(local_operator([a, b]), {2})
        assert np.allclose(reduced.entries, 2.0 * a)

    def test_partial_trace_of_everything_is_refused(self) -> None:
        """Verify tracing every party is an error."""
        with pytest.raises(DimensionError):
            partial_trace(Operator.identity(2, 2), {1, 2})

    @pytest.mark.parametrize(
        "parties",
        [
            pytest.param({0}, id="zero"),
            pytest.param({4}, id="too-large"),
        ],
    )
    def test_invalid_party_index(self, parties: set[int]) -> None:
        """Verify party indices are 1-based and bounded."""
        with pytest.raises(PartyIndexError):
            partial_transpose(Operator.identity(3, 2), parties)

    def test_reduced_density_matrix_matches_partial_trace(self, make_state) -> None:
        """Verify the direct contraction agrees with partial_trace of the projector."""
        psi = make_state(3, 3)
        direct = reduced_density_matrix(psi, (1, 3))
        via_trace = partial_trace(psi.projector(), {2})
        assert np.allclose(direct, via_trace.entries, atol=1e-14)


class TestSpectra:
    """Tests for eigen- and Schmidt decompositions."""

    def test_hermitian_eig_is_ascending(self, make_state) -> None:
        """Verify eigenvalues come back ascending with a small residual."""
        rho = make_state(2, 3).projector()
        eig = hermitian_eig(rho)
        assert np.all(np.diff(eig.values) >= -1e-14)
        assert eig.values[-1] == pytest.approx(1.0, abs=1e-12)

    def test_hermitian_eig_rejects_non_hermitian(self) -> None:
        """Verify a non-Hermitian input raises."""
        with pytest.raises(NotHermitianError):
            hermitian_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_schmidt_coefficients_of_product(self) -> None:
        """Verify a product state has a single unit Schmidt coefficient."""
        psi = StateVector.basis((0, 1, 0), 2)
        coeffs = schmidt_coefficients(psi, (1,))
        assert coeffs[0] == pytest.approx(1.0)
        assert np.allclose(coeffs[1:], 0.0)

    def test_schmidt_squares_sum_to_one(self, make_state) -> None:
        """Verify Σ s_k² = 1 for every cut."""
        psi = make_state(3, 3)
        for side in bipartitions(3):
            assert np.sum(schmidt_coefficients(psi, side) ** 2) == pytest.approx(1.0, abs=1e-12)

    def test_trivial_bipartition_is_refused(self, make_state) -> None:
        """Verify a cut with an empty side raises."""
        with pytest.raises(DimensionError):
            schmidt_coefficients(make_state(3, 2), (1, 2, 3))

    @pytest.mark.parametrize(
        ("n", "count"),
        [
            pytest.param(2, 1, id="two-parties"),
            pytest.param(3, 3, id="three-parties"),
            pytest.param(4, 7, id="four-parties"),
        ],
    )
    def test_bipartition_count(self, n: int, count: int) -> None:
        """Verify there are 2^(n-1) - 1 nontrivial cuts."""
        assert len(bipartitions(n)) == count


class TestRandomness:
    """Tests for seeded random objects."""

    def test_haar_unitary_is_unitary(self) -> None:
        """Verify U U† = 1."""
        u = haar_random_unitary(4, 99).entries
        assert np.allclose(u @ u.conj().T, np.eye(4), atol=1e-12)

    def test_random_state_is_reproducible(self) -> None:
        """Verify the same seed yields the same state."""
        assert np.array_equal(random_state(3, 2, 5).amplitudes, random_state(3, 2, 5).amplitudes)

    def test_apply_local_matches_kron(self, make_state) -> None:
        """Verify per-party application equals the full Kronecker product."""
        # Given
        psi = make_state(3, 2)
        unitaries = [haar_random_unitary(2, k).entries for k in range(3)]

        # When
        moved = apply_local(psi, unitaries)

        # Then
        full = local_operator(unitaries).entries @ psi.amplitudes
        assert np.allclose(moved.amplitudes, full, atol=1e-14)

    def test_modular_shift_cycles(self) -> None:
        """Verify X|d-1⟩ = |0⟩."""
        x = modular_shift(3)
        assert np.allclose(x @ np.array([0, 0, 1]), [1, 0, 0])


class TestMatrixPayload:
    """Tests for the JSON matrix schema."""

    def test_payload_preserves_entries(self) -> None:
        """Verify an operator survives the payload schema."""
        # Given
        op = Operator(np.array([[1.0, 1j], [-1j, 2.0]]), 1, 2, True)

        # When
        rebuilt = matrix_from_payload(matrix_to_payload(op))

        # Then
        assert rebuilt.allclose(op, atol=0.0)

    def test_non_square_payload_is_refused(self) -> None:
        """Verify ragged entries fail validation."""
        with pytest.raises(ValidationError):
            MatrixPayload(parties=1, local_dim=2, entries=[[(1.0, 0.0)]] * 2)
