"""Witness spectra and separability bounds for the `entlab witness` command."""

from typing import Any

import numpy as np
from rich.table import Table

from entlab import cli_logger
from entlab.config import SeesawConfig
from entlab.gm import fully_separable_max, invariant_biseparable_max
from entlab.witnesses import (
    WitnessKind,
    analytic_bounds,
    spectral_coefficients,
    spectral_residual,
    witness_operator,
)


def witness_payload(d: int, kind: WitnessKind, cfg: SeesawConfig | None) -> dict[str, Any]:
    """Spectrum of a witness, its analytic bounds and optionally the numerical ones.

    The numerical fs bound uses the product-state see-saw, bs the exact
    conditional-observable maximum and q the top eigenvalue.
    """
    w = witness_operator(d, kind)
    eigenvalues = np.linalg.eigvalsh(w.entries)
    payload: dict[str, Any] = {
        "local_dim": d,
        "witness": kind.value,
        "min_eigenvalue": float(eigenvalues[0]),
        "max_eigenvalue": float(eigenvalues[-1]),
    }
    if d >= 3:
        coeffs = spectral_coefficients(d)
        payload["spectral"] = {"alpha": coeffs.alpha, "c_S": coeffs.c_S, "c_A": coeffs.c_A, "c_J": coeffs.c_J}
        payload["spectral_residual"] = spectral_residual(d)
    if kind in (WitnessKind.MINUS, WitnessKind.PLUS) and (d >= 3 or kind is WitnessKind.MINUS):
        bounds = analytic_bounds(d, kind)
        payload["analytic"] = {"fs": bounds.fs, "bs": bounds.bs, "q": bounds.q}
    if cfg is not None:
        payload["numeric"] = {
            "fs": fully_separable_max(w, cfg),
            "bs": invariant_biseparable_max(w),
            "q": float(eigenvalues[-1]),
        }
    return payload


def print_witness_table(payload: dict[str, Any]) -> None:
    cli_logger.info(f"[bold]{payload['witness']}[/bold] at d = {payload['local_dim']}")
    cli_logger.value("λ_min", payload["min_eigenvalue"])
    cli_logger.value("λ_max", payload["max_eigenvalue"])
    if "spectral" in payload:
        for name, v in payload["spectral"].items():
            cli_logger.value(name, v)
    analytic = payload.get("analytic", {})
    numeric = payload.get("numeric", {})
    if not analytic and not numeric:
        return
    table = Table(show_header=True, header_style="bold")
    table.add_column("BOUND", style="cyan")
    table.add_column("ANALYTIC", justify="right")
    table.add_column("NUMERIC", justify="right")
    for key in ("fs", "bs", "q"):
        a = analytic.get(key)
        n = numeric.get(key)
        table.add_row(key, "-" if a is None else f"{a:.12g}", "-" if n is None else f"{n:.12g}")
    cli_logger.table(table)
