"""Tests for the acceptance criteria behind `entlab verify`."""

import pytest

from entlab.commands.verify import (
    SAMPLE_STATES,
    Criterion,
    Suite,
    criteria_for,
    run_criterion,
    run_suite,
    verify_payload,
)
from entlab.config import SeesawConfig
from entlab.errors import SolverError


class TestCriteriaTable:
    """Tests for the criteria each suite replays."""

    def test_sample_size(self) -> None:
        """Verify random-state checks draw twenty states."""
        assert SAMPLE_STATES == 20

    @pytest.mark.parametrize(
        "name",
        [
            pytest.param("bs(W-), d = 4", id="bs-minus-d4"),
            pytest.param("fs(W-), d = 5", id="fs-minus-d5"),
            pytest.param("q(W+), d = 5", id="q-plus-d5"),
            pytest.param("max ⟨χ|χ⟩ - d²/(d²-1), d = 3..12", id="chi-norm"),
            pytest.param("Λ²(M)", id="four-qubit-m"),
            pytest.param("G(four-qutrit chiral state)", id="four-qutrit"),
        ],
    )
    def test_bounds_suite_names(self, name: str) -> None:
        """Verify the bounds suite carries the named check."""
        assert name in [c.name for c in criteria_for(Suite.BOUNDS)]

    def test_phase_state_targets(self) -> None:
        """Verify G of the phase state is checked against 1 - 1/(2(d-1))."""
        targets = {c.name: c.target for c in criteria_for(Suite.BOUNDS)}

        assert targets["G(phase state), d = 3"] == pytest.approx(3 / 4)
        assert targets["G(phase state), d = 4"] == pytest.approx(5 / 6)
        assert targets["G(phase state), d = 5"] == pytest.approx(7 / 8)

    def test_four_party_targets(self) -> None:
        """Verify the four-party targets."""
        targets = {c.name: (c.target, c.tol) for c in criteria_for(Suite.BOUNDS)}

        assert targets["Λ²(M)"] == pytest.approx((2 / 9, 1e-6))
        assert targets["G(four-qutrit chiral state)"] == pytest.approx((7 / 8, 1e-4))

    def test_pptgme_search_covers_d4(self) -> None:
        """Verify the sdp suite requires PPT GME states at d = 3 and d = 4."""
        names = [c.name for c in criteria_for(Suite.SDP)]

        assert "PPT GME states found, d = 3" in names
        assert "PPT GME states found, d = 4" in names

    def test_all_is_the_union(self) -> None:
        """Verify the all suite lists every criterion once."""
        parts = [c for s in (Suite.ALGEBRA, Suite.BOUNDS, Suite.SDP, Suite.POVM) for c in criteria_for(s)]

        assert len(criteria_for(Suite.ALL)) == len(parts)


class TestRunCriterion:
    """Tests for run_criterion."""

    @pytest.mark.parametrize(
        ("comparison", "measured", "passed"),
        [
            pytest.param("eq", 1.05, False, id="eq-outside"),
            pytest.param("eq", 1.0 + 1e-9, True, id="eq-inside"),
            pytest.param("ge", 5.0, True, id="ge-above"),
            pytest.param("ge", 0.5, False, id="ge-below"),
        ],
    )
    def test_comparisons(self, comparison: str, measured: float, passed: bool) -> None:
        """Verify eq and ge comparisons."""
        criterion = Criterion(Suite.ALGEBRA, "constant", 1.0, 1e-6, lambda _: measured, comparison)

        result = run_criterion(criterion, SeesawConfig())

        assert result.passed is passed
        assert result.measured == pytest.approx(measured)

    def test_library_error_is_a_failure(self) -> None:
        """Verify a raising criterion fails with its message instead of aborting the suite."""
        # Given
        def measure(_: SeesawConfig) -> float:
            raise SolverError("infeasible")

        criterion = Criterion(Suite.SDP, "raises", 0.0, 1e-9, measure)

        # When
        result = run_criterion(criterion, SeesawConfig())

        # Then
        assert result.passed is False
        assert result.measured is None
        assert result.error is not None
        assert "infeasible" in result.error


class TestRunSuite:
    """Tests for run_suite."""

    def test_threads_keep_the_table_order(self) -> None:
        """Verify results come back in table order on several workers."""
        # When
        results = run_suite(Suite.ALGEBRA, SeesawConfig(), threads=3)

        # Then
        assert [r.name for r in results] == [c.name for c in criteria_for(Suite.ALGEBRA)]
        assert all(r.passed for r in results)

    def test_payload_counts(self) -> None:
        """Verify the report counts passes and failures."""
        results = run_suite(Suite.ALGEBRA, SeesawConfig(), threads=1)

        payload = verify_payload(Suite.ALGEBRA, results)

        assert payload["passed"] == len(results)
        assert payload["failed"] == 0
