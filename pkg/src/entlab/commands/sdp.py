"""SDP problem runners for the `entlab sdp` and `entlab pptgme` commands."""

import csv
import io
from dataclasses import asdict
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np
from rich.table import Table

from entlab import cli_logger
from entlab.config import SolverTolerances
from entlab.sdp import (
    BoundaryFamily,
    InvariantState,
    WitnessPair,
    find_ppt_gme,
    gme_decide,
    invariant_boundary,
    ppt_gme_family_state,
    ppt_relaxed_overlap,
    pt_invariant_boundary,
)
from entlab.subspaces import flip_conjugate_projectors, subspace_traces
from entlab.witnesses import conditional_observable


PPTGME_CSV_HEADER = ("wplus", "wminus", "a", "b", "c", "min_pt_eig", "verdict")


class SdpProblem(str, Enum):
    """Problems reachable from `entlab sdp --problem`."""

    OVERLAP = "overlap"
    BOUNDARY = "boundary"
    GME = "gme"
    PPTGME = "pptgme"


def flip_conjugate_overlap_target(d: int) -> float:
    """Closed-form PPT-relaxed overlap d²/((d+1)(d²-1)) for Π_I conditioned on party 3."""
    return d**2 / ((d + 1) * (d**2 - 1))


def overlap_payload(d: int, tol: SolverTolerances) -> dict[str, Any]:
    """PPT relaxation of the product overlap of Π_I, giving a lower bound on G over H_I."""
    anchor = np.zeros(d, dtype=np.complex128)
    anchor[0] = 1.0
    y = conditional_observable(flip_conjugate_projectors(d).pi, 3, anchor)
    value = ppt_relaxed_overlap(y, tol.gap)
    return {
        "problem": SdpProblem.OVERLAP.value,
        "local_dim": d,
        "ppt_overlap": value,
        "expected": flip_conjugate_overlap_target(d),
        "geometric_measure_bound": 1.0 - value,
    }


def boundary_payload(
    d: int, theta: float, family: BoundaryFamily, party: int | None, pair: WitnessPair, tol: SolverTolerances
) -> dict[str, Any]:
    """One support-function value of an invariant-state family."""
    boundary = invariant_boundary if pair is WitnessPair.W else pt_invariant_boundary
    point = boundary(d, theta, family, party, tol.gap)
    return {"problem": SdpProblem.BOUNDARY.value, "local_dim": d, "pair": pair.value, **asdict(point)}


def gme_payload(d: int, a: float, c: float, tol: SolverTolerances) -> dict[str, Any]:
    """GME decision for the invariant state aΠ_A + bΠ_S + cΠ_J̄ with b from unit trace."""
    ppt_gme_family_state(d, a, c)
    traces = subspace_traces(d)
    b = (1.0 - a * traces["A"] - c * traces["Jbar"]) / traces["S"]
    verdict = gme_decide(InvariantState.from_spectral(d, a, b, 0.0, c), tol.gme, tol.gap)
    return {
        "problem": SdpProblem.GME.value,
        "local_dim": d,
        "a": a,
        "b": b,
        "c": c,
        **asdict(verdict),
    }


def pptgme_payload(d: int, points: int, tol: SolverTolerances, threads: int = 1) -> dict[str, Any]:
    """PPT states of the aΠ_A + bΠ_S + cΠ_J̄ family detected as GME."""
    sweep = find_ppt_gme(d, points, tol.gap, threads)
    return {
        "problem": SdpProblem.PPTGME.value,
        "local_dim": d,
        "note": sweep.note,
        "rows": [asdict(r) for r in sweep.rows],
        "gme_count": len(sweep.gme_rows()),
    }


def render_pptgme_csv(payload: dict[str, Any]) -> str:
    """One line per pin in ascending ⟨W+⟩, floats in round-trip repr."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(PPTGME_CSV_HEADER)
    for row in payload["rows"]:
        writer.writerow(
            [
                repr(row["w_plus"]),
                repr(row["w_minus"]),
                repr(row["a"]),
                repr(row["b"]),
                repr(row["c"]),
                repr(row["min_pt_eig"]),
                row["verdict"],
            ]
        )
    return buffer.getvalue()


def write_pptgme_csv(payload: dict[str, Any], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_pptgme_csv(payload))


def print_sdp_summary(payload: dict[str, Any]) -> None:
    problem = payload["problem"]
    cli_logger.info(f"[bold]sdp {problem}[/bold] at d = {payload['local_dim']}")
    if problem == SdpProblem.OVERLAP.value:
        cli_logger.value("max Tr(Yρ), ρ PPT", payload["ppt_overlap"], payload["expected"])
        cli_logger.value("G lower bound", payload["geometric_measure_bound"])
    elif problem == SdpProblem.BOUNDARY.value:
        cli_logger.value(f"support[{payload['family']}]", payload["value"])
        cli_logger.dim(f"  point = ({payload['point'][0]:.10g}, {payload['point'][1]:.10g})")
    elif problem == SdpProblem.GME.value:
        cli_logger.value("min Tr(ρW)", payload["optimum"])
        cli_logger.info(f"  verdict: [bold]{payload['verdict']}[/bold]")
    else:
        print_pptgme_table(payload)


def print_pptgme_table(payload: dict[str, Any]) -> None:
    if payload["note"]:
        cli_logger.warning(payload["note"])
    if not payload["rows"]:
        cli_logger.dim("  no rows")
        return
    table = Table(show_header=True, header_style="bold")
    for column in ("⟨W+⟩", "a", "b", "c", "Tr(Pρ)", "min PT eig", "VERDICT"):
        table.add_column(column, justify="right")
    for row in payload["rows"]:
        table.add_row(
            f"{row['w_plus']:.6g}",
            f"{row['a']:.6g}",
            f"{row['b']:.6g}",
            f"{row['c']:.6g}",
            f"{row['p_value']:.3e}",
            f"{row['min_pt_eig']:.2e}",
            row["verdict"],
        )
    cli_logger.table(table)
    cli_logger.dim(f"  {payload['gme_count']} PPT state(s) detected as GME")
