"""Tests for the witness-plane sweeps and their file emission."""

import json
from pathlib import Path

import numpy as np
import pytest

from entlab.config import SeesawConfig
from entlab.errors import EmptyResultError, UnsupportedCombinationError
from entlab.statespace import (
    CSV_HEADER,
    Family,
    SweepRow,
    SweepTable,
    emit,
    nesting_violations,
    polytope_residual,
    render_csv,
    render_json,
    render_svg,
    support_curvature,
    sweep,
    vertices,
)

GRID = 16


@pytest.fixture
def small_table() -> SweepTable:
    """Hand-made table with two θ values and two families."""
    return SweepTable(
        local_dim=3,
        witness_pair="w",
        rows=[
            SweepRow(0.0, "fs", 1.5, (1.5, 0.0)),
            SweepRow(0.0, "quantum", 5.196, (5.196, -1.667)),
            SweepRow(0.5, "fs", 1.2, (1.0, 0.6)),
            SweepRow(0.5, "quantum", 6.0, (4.0, 2.0)),
        ],
    )


class TestSweep:
    """Tests for sweep."""

    def test_rows_follow_grid_then_family(self, small_seesaw: SeesawConfig) -> None:
        """Verify rows are ordered by θ index and then by requested family."""
        # When
        table = sweep(3, families=("quantum", "bs"), grid_size=GRID, cfg=small_seesaw)

        # Then
        assert len(table.rows) == 2 * GRID
        assert [r.family for r in table.rows[:4]] == ["quantum", "bs", "quantum", "bs"]
        thetas = [r.theta for r in table.family_rows("quantum")]
        assert thetas == pytest.approx([2 * np.pi * k / GRID for k in range(GRID)])

    def test_thread_count_does_not_change_results(self, small_seesaw: SeesawConfig) -> None:
        """Verify one and four workers produce identical tables."""
        serial = sweep(3, families=("fs",), grid_size=GRID, cfg=small_seesaw, threads=1)
        parallel = sweep(3, families=("fs",), grid_size=GRID, cfg=small_seesaw, threads=4)
        assert serial.rows == parallel.rows

    def test_quantum_region_is_the_vertex_triangle(self) -> None:
        """Verify the W-pair quantum support equals that of the three corners."""
        table = sweep(3, families=("quantum",), grid_size=GRID)
        assert polytope_residual(table) < 1e-7

    def test_separable_sets_are_nested(self, small_seesaw: SeesawConfig) -> None:
        """Verify fs ≤ bs ≤ quantum at every θ."""
        table = sweep(3, families=("fs", "bs", "quantum"), grid_size=GRID, cfg=small_seesaw)
        assert nesting_violations(table) == []

    @pytest.mark.slow
    def test_default_families_are_nested(self, small_seesaw: SeesawConfig) -> None:
        """Verify every family, SDP ones included, respects the nesting order."""
        table = sweep(3, grid_size=GRID, cfg=small_seesaw)
        assert {r.family for r in table.rows} == {"fs", "bs", "ppt", "pptmix", "quantum"}
        assert nesting_violations(table) == []

    def test_pt_pair_quantum_region_is_curved(self) -> None:
        """Verify the 𝕎-pair quantum boundary is not a polygon."""
        table = sweep(3, pair="wpt", families=("quantum",), grid_size=GRID)
        assert table.witness_pair == "wpt"
        assert support_curvature(table) > 1e-4

    @pytest.mark.parametrize(
        "kwargs",
        [
            pytest.param({"d": 5}, id="dimension"),
            pytest.param({"d": 3, "grid_size": 8}, id="coarse-grid"),
            pytest.param({"d": 3, "families": ()}, id="no-families"),
            pytest.param({"d": 3, "pair": "wpt", "families": ("pptgme",)}, id="pptgme-on-wpt"),
        ],
    )
    def test_unsupported_requests(self, kwargs: dict) -> None:
        """Verify invalid sweep requests raise before any work."""
        with pytest.raises(UnsupportedCombinationError):
            sweep(**kwargs)

    def test_unknown_family(self) -> None:
        """Verify family names are validated."""
        with pytest.raises(ValueError):
            sweep(3, families=("entangled",), grid_size=GRID)


class TestVertices:
    """Tests for the analytic corners."""

    @pytest.mark.parametrize("d", [3, 4])
    def test_vertices_match_spectral_coefficients(self, d: int) -> None:
        """Verify basis states land on the analytic corners."""
        assert max(v.deviation for v in vertices(d)) < 1e-9

    def test_qutrit_corners(self) -> None:
        """Verify the d = 3 corner coordinates."""
        corners = {v.label: v.expected for v in vertices(3)}
        assert corners["chiral"] == pytest.approx((-3 * np.sqrt(3.0), -5 / 3))
        assert corners["antisymmetric"] == pytest.approx((0.0, 40 / 3))


class TestTableChecks:
    """Tests for nesting_violations and support_curvature on fixed tables."""

    def test_clean_table(self, small_table: SweepTable) -> None:
        """Verify fs below quantum produces no violation."""
        assert nesting_violations(small_table) == []

    def test_violation_is_reported(self) -> None:
        """Verify fs above bs at one θ is listed."""
        table = SweepTable(3, "w", [SweepRow(0.0, "fs", 2.0, (0, 0)), SweepRow(0.0, "bs", 1.0, (0, 0))])
        violations = nesting_violations(table)
        assert len(violations) == 1
        assert "fs=2 > bs=1" in violations[0]

    def test_collinear_points_have_no_curvature(self) -> None:
        """Verify points on a line span zero area."""
        rows = [SweepRow(float(k), "quantum", 0.0, (float(k), 2.0 * k)) for k in range(5)]
        assert support_curvature(SweepTable(3, "w", rows)) == pytest.approx(0.0)

    def test_values_at(self, small_table: SweepTable) -> None:
        """Verify lookup of all family values at one θ."""
        assert small_table.values_at(0.5) == {"fs": 1.2, "quantum": 6.0}


class TestEmission:
    """Tests for CSV, JSON and SVG output."""

    def test_csv(self, small_table: SweepTable) -> None:
        """Verify the header and one line per row."""
        lines = render_csv(small_table).splitlines()
        assert lines[0] == ",".join(CSV_HEADER)
        assert len(lines) == 1 + len(small_table.rows)
        assert lines[1] == "0.0,fs,1.5,1.5,0.0"

    def test_json(self, small_table: SweepTable) -> None:
        """Verify the JSON document layout."""
        payload = json.loads(render_json(small_table))
        assert payload["local_dim"] == 3
        assert payload["witness_pair"] == "w"
        assert payload["rows"][1] == {
            "theta": 0.0,
            "family": "quantum",
            "value": 5.196,
            "point": [5.196, -1.667],
        }

    def test_svg_has_one_polygon_per_family(self, small_table: SweepTable) -> None:
        """Verify each family is drawn and named in the legend."""
        svg = render_svg(small_table)
        assert svg.startswith("<svg")
        assert svg.count("<polygon") == 2
        assert "fully separable" in svg
        assert "quantum" in svg

    def test_emit_writes_each_format(self, small_table: SweepTable, tmp_path: Path) -> None:
        """Verify one file per format with the suffix replaced."""
        # When
        written = emit(small_table, ("csv", "json", "svg"), tmp_path / "out" / "plane.csv")

        # Then
        assert [p.name for p in written] == ["plane.csv", "plane.json", "plane.svg"]
        assert all(p.exists() for p in written)

    def test_empty_table_writes_nothing(self, tmp_path: Path) -> None:
        """Verify an empty table raises before any file is created."""
        with pytest.raises(EmptyResultError):
            emit(SweepTable(3, "w"), ("csv",), tmp_path / "plane.csv")
        assert list(tmp_path.iterdir()) == []

    def test_unknown_format_writes_nothing(self, small_table: SweepTable, tmp_path: Path) -> None:
        """Verify formats are validated before writing."""
        with pytest.raises(UnsupportedCombinationError):
            emit(small_table, ("csv", "png"), tmp_path / "plane.csv")
        assert list(tmp_path.iterdir()) == []


@pytest.mark.slow
def test_pptgme_overlay_rows_are_labelled(small_seesaw: SeesawConfig) -> None:
    """Verify the overlay adds pptgme rows with positive antisymmetric weight."""
    table = sweep(3, families=("quantum", "pptgme"), grid_size=GRID, cfg=small_seesaw)
    overlay = table.family_rows(Family.PPTGME)
    assert overlay
    assert all(r.value > 0 for r in overlay)
