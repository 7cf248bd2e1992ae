"""Permutation-test report for the `entlab povm` command."""

from typing import Any

from entlab import cli_logger
from entlab.linalg import StateVector, reduced_density_matrix
from entlab.povm import gce, permutation_test, projector_expectations, trace_cube

OUTCOME_LABELS = ("S", "Jbar", "J")


def povm_payload(label: str, psi: StateVector, shots: int | None, seed: int, order: int) -> dict[str, Any]:
    """Outcome probabilities, counts, Tr ρ_A³ and the GCE over all parties."""
    record = permutation_test(psi, shots, seed)
    cube = trace_cube(reduced_density_matrix(psi, (1,)))
    return {
        "state": label,
        "local_dim": psi.local_dim,
        "shots": record.shots,
        "seed": seed,
        "p": list(record.probabilities),
        "projector_expectations": list(projector_expectations(psi)),
        "counts": list(record.counts),
        "frequencies": list(record.frequencies()),
        "outliers": [OUTCOME_LABELS[k] for k in record.outliers()],
        "trace_cube": cube.value,
        "trace_cube_routes": {"spectrum": cube.direct, "probability": cube.via_probability},
        "gce": gce(psi, range(1, psi.parties + 1), order).value,
        "gce_order": order,
    }


def print_povm_summary(payload: dict[str, Any]) -> None:
    cli_logger.info(f"[bold]{payload['state']}[/bold] at d = {payload['local_dim']}")
    for label, p, expected in zip(OUTCOME_LABELS, payload["p"], payload["projector_expectations"], strict=True):
        cli_logger.value(f"p[{label}]", p, expected)
    if payload["shots"]:
        cli_logger.dim(f"  counts = {payload['counts']} over {payload['shots']} shots")
        for label in payload["outliers"]:
            cli_logger.warning(f"outcome {label} lies outside the 4σ band")
    cli_logger.value("Tr ρ_A³", payload["trace_cube"])
    cli_logger.value(f"GCE (K={payload['gce_order']})", payload["gce"])
