"""Projector algebra report for the `entlab projectors` command."""

from itertools import combinations
from typing import Any

import numpy as np
from rich.table import Table

from entlab import cli_logger
from entlab.linalg import matrix_to_payload
from entlab.subspaces import all_bases, subspace_traces, tripartite_projectors


def projector_payload(d: int) -> dict[str, Any]:
    """Traces and algebra residuals of Π_S, Π_A, Π_J, Π_J̄ at local dimension d."""
    projectors = tripartite_projectors(d).as_dict()
    expected = subspace_traces(d)
    rows = []
    for name, p in projectors.items():
        rows.append(
            {
                "name": name,
                "trace": float(p.trace().real),
                "expected_trace": expected[name],
                "idempotency": p.max_abs_diff(p @ p),
                "hermiticity": p.hermitian_deviation(),
            }
        )
    orthogonality = max(
        float(np.max(np.abs((projectors[a] @ projectors[b]).entries)))
        for a, b in combinations(projectors, 2)
    )
    total = sum((p.entries for p in projectors.values()), np.zeros((d**3, d**3), dtype=np.complex128))
    completeness = float(np.max(np.abs(total - np.eye(d**3))))
    return {
        "local_dim": d,
        "projectors": rows,
        "orthogonality": orthogonality,
        "completeness": completeness,
    }


def projector_export(d: int) -> dict[str, Any]:
    """Every projector and named basis in the JSON matrix schema, with a traces block.

    Basis vectors are lists of [re, im] amplitudes; projectors use
    {"parties", "local_dim", "entries"}.
    """
    projectors = tripartite_projectors(d).as_dict()
    expected = subspace_traces(d)
    bases = {
        label: {
            "rank": basis.rank,
            "vectors": [[(float(z.real), float(z.imag)) for z in v.amplitudes] for v in basis.vectors],
            "projector": matrix_to_payload(basis.projector).model_dump(),
        }
        for label, basis in all_bases(d).items()
    }
    return {
        "local_dim": d,
        "projectors": {name: matrix_to_payload(p).model_dump() for name, p in projectors.items()},
        "bases": bases,
        "traces": {
            name: {"trace": float(p.trace().real), "expected": expected[name]} for name, p in projectors.items()
        },
    }


def print_projector_table(payload: dict[str, Any]) -> None:
    table = Table(show_header=True, header_style="bold", title=f"Tripartite projectors, d = {payload['local_dim']}")
    table.add_column("PROJECTOR", style="cyan")
    table.add_column("TRACE", justify="right")
    table.add_column("EXPECTED", justify="right")
    table.add_column("|P²-P|", justify="right")
    for row in payload["projectors"]:
        table.add_row(
            row["name"],
            f"{row['trace']:.12g}",
            str(row["expected_trace"]),
            f"{row['idempotency']:.2e}",
        )
    cli_logger.table(table)
    cli_logger.dim(f"  max |P_a P_b| = {payload['orthogonality']:.2e}")
    cli_logger.dim(f"  max |ΣP - 1| = {payload['completeness']:.2e}")
