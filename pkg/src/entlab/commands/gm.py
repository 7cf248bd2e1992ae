"""Geometric-measure reports for the `entlab gm` command."""

from typing import Any

from entlab import cli_logger
from entlab.config import SeesawConfig
from entlab.errors import UnsupportedCombinationError
from entlab.gm import OptimizationResult, gme_schmidt_measure, max_product_overlap, min_projector_overlap
from entlab.linalg import Operator, StateVector
from entlab.subspaces import flip_conjugate_projectors, tripartite_projectors

PROJECTOR_NAMES = ("S", "A", "J", "Jbar", "S+Jbar", "I")


def named_projector(name: str, d: int) -> Operator:
    """Tripartite projector by name; "S+Jbar" is the sum Π_S + Π_J̄ and "I" is Π_I."""
    if name == "I":
        return flip_conjugate_projectors(d).pi
    projectors = tripartite_projectors(d).as_dict()
    if name == "S+Jbar":
        return (projectors["S"] + projectors["Jbar"]).as_hermitian()
    if name not in projectors:
        raise UnsupportedCombinationError("projector", name, PROJECTOR_NAMES)
    return projectors[name]


def _run_stats(result: OptimizationResult) -> dict[str, Any]:
    return {
        "restarts": result.restarts_used,
        "converged": result.converged,
        "iterations": result.iterations,
        "nonconverged_restarts": result.nonconverged_restarts,
    }


def state_payload(label: str, psi: StateVector, cfg: SeesawConfig) -> dict[str, Any]:
    """Λ², G and (for three or more parties) the biseparable geometric measure."""
    result = max_product_overlap(psi, cfg)
    payload: dict[str, Any] = {
        "state": label,
        "parties": psi.parties,
        "local_dim": psi.local_dim,
        "max_overlap": result.value,
        "geometric_measure": 1.0 - result.value,
        **_run_stats(result),
    }
    if psi.parties >= 3:
        payload["gme_schmidt_measure"] = gme_schmidt_measure(psi)
    return payload


def projector_payload(name: str, d: int, cfg: SeesawConfig) -> dict[str, Any]:
    """Minimum product-state overlap of a named projector."""
    result = min_projector_overlap(named_projector(name, d), cfg)
    return {
        "projector": name,
        "local_dim": d,
        "min_product_overlap": result.value,
        "geometric_measure": 1.0 - result.value,
        **_run_stats(result),
    }


def print_gm_summary(payload: dict[str, Any]) -> None:
    subject = payload.get("state") or f"Π_{payload['projector']}"
    cli_logger.info(f"[bold]{subject}[/bold] at d = {payload['local_dim']}")
    if "max_overlap" in payload:
        cli_logger.value("Λ²", payload["max_overlap"])
    else:
        cli_logger.value("min overlap", payload["min_product_overlap"])
    cli_logger.value("G", payload["geometric_measure"])
    if "gme_schmidt_measure" in payload:
        cli_logger.value("G_GME", payload["gme_schmidt_measure"])
    if payload["nonconverged_restarts"]:
        cli_logger.warning(
            f"{payload['nonconverged_restarts']} of {payload['restarts']} restarts hit max_iter"
        )
