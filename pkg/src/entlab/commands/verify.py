"""Acceptance checks run by `entlab verify`.

Each criterion computes one measured number and compares it with a target:
"eq" passes when |measured - target| <= tol, "ge" when measured >= target - tol.
"""

import time
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Any

import numpy as np
from rich.table import Table

from entlab import cli_logger
from entlab.commands.projectors import projector_payload
from entlab.commands.sdp import flip_conjugate_overlap_target
from entlab.commands.states import random_superposition
from entlab.config import SeesawConfig, derive_seed
from entlab.errors import EntlabError
from entlab.gm import (
    chi_norm_max,
    extremize_eta,
    flip_conjugate_analytic_bound,
    fully_separable_max,
    geometric_measure,
    gme_schmidt_measure,
    invariant_biseparable_max,
    max_product_overlap,
    min_projector_overlap,
)
from entlab.linalg import (
    Operator,
    StateVector,
    apply_local,
    haar_random_unitary,
    random_state,
    reduced_density_matrix,
)
from entlab.povm import gce, permutation_test, projector_expectations, trace_cube
from entlab.sdp import (
    BoundaryFamily,
    find_ppt_gme,
    invariant_boundary,
    ppt_relaxed_overlap,
)
from entlab.statespace import vertices
from entlab.subspaces import (
    chiral_basis,
    flip_conjugate_projectors,
    four_qubit_m,
    four_qutrit_chiral,
    j2_basis,
    phase_state,
    tripartite_projectors,
)
from entlab.witnesses import build_witnesses, permutation_witnesses, spectral_residual
from entlab.witnesses import conditional_observable as conditional

SAMPLE_STATES = 20
POVM_STATES = 100
POVM_SHOTS = 100_000


class Suite(str, Enum):
    """Groups of acceptance checks."""

    ALGEBRA = "algebra"
    BOUNDS = "bounds"
    SDP = "sdp"
    POVM = "povm"
    ALL = "all"


@dataclass(frozen=True)
class Criterion:
    suite: Suite
    name: str
    target: float
    tol: float
    measure: Callable[[SeesawConfig], float]
    comparison: str = "eq"


@dataclass(frozen=True)
class CriterionResult:
    """Outcome of one criterion; error holds the message when it raised."""

    suite: str
    name: str
    measured: float | None
    target: float
    tol: float
    comparison: str
    passed: bool
    seconds: float
    error: str | None = None

    def as_payload(self) -> dict[str, Any]:
        return {
            "suite": self.suite,
            "name": self.name,
            "measured": self.measured,
            "target": self.target,
            "tol": self.tol,
            "comparison": self.comparison,
            "passed": self.passed,
            "error": self.error,
        }


# Algebra


def _projector_residual(_: SeesawConfig) -> float:
    worst = 0.0
    for d in (2, 3, 4, 5):
        payload = projector_payload(d)
        worst = max(worst, payload["orthogonality"], payload["completeness"])
        for row in payload["projectors"]:
            worst = max(worst, row["idempotency"], abs(row["trace"] - row["expected_trace"]))
    return worst


def _witness_identity_residual(_: SeesawConfig) -> float:
    worst = 0.0
    for d in (2, 3, 4, 5):
        built, perms = build_witnesses(d), permutation_witnesses(d)
        worst = max(worst, built.minus.max_abs_diff(perms.minus), built.plus.max_abs_diff(perms.plus))
    return worst


def _commutator_residual(_: SeesawConfig) -> float:
    worst = 0.0
    for d in (2, 3, 4, 5):
        w = permutation_witnesses(d)
        commutator = w.plus.entries @ w.minus.entries - w.minus.entries @ w.plus.entries
        worst = max(worst, float(np.max(np.abs(commutator))))
    return worst


def _spectral_residual(_: SeesawConfig) -> float:
    return max(spectral_residual(d) for d in (3, 4, 5))


def _j2_ame_residual(_: SeesawConfig) -> float:
    worst = 0.0
    for v in j2_basis().vectors:
        for party in (1, 2, 3):
            rho = reduced_density_matrix(v, (party,))
            worst = max(worst, float(np.max(np.abs(rho - np.eye(3) / 3))))
    return worst


# Bounds


def _random_chiral_gm_deviation(cfg: SeesawConfig) -> float:
    basis = chiral_basis(2)
    return max(
        abs(geometric_measure(random_superposition(basis, derive_seed(cfg.seed, "verify", k)), cfg) - 5 / 9)
        for k in range(SAMPLE_STATES)
    )


def _eta_disagreement(cfg: SeesawConfig) -> float:
    worst = 0.0
    for alpha in (0.0, np.pi / 3):
        analytic = extremize_eta(alpha)
        for d in (2, 3, 4, 5):
            worst = max(worst, abs(extremize_eta(alpha, d, "numeric", cfg) - analytic))
    return worst


def _j2_gme_deviation(cfg: SeesawConfig) -> float:
    basis = j2_basis()
    return max(
        abs(gme_schmidt_measure(random_superposition(basis, derive_seed(cfg.seed, "verify", k))) - 2 / 3)
        for k in range(SAMPLE_STATES)
    )


def _flip_bound_margin(cfg: SeesawConfig) -> float:
    worst = float("inf")
    for d in range(3, 9):
        result = flip_conjugate_analytic_bound(d, cfg)
        assert result.measured is not None
        worst = min(worst, result.measured - result.bound)
    return worst


def _chi_norm_deviation(cfg: SeesawConfig) -> float:
    return max(abs(chi_norm_max(d, 0, cfg).value - d**2 / (d**2 - 1)) for d in range(3, 13))


# SDP


def _vertex_deviation(_: SeesawConfig) -> float:
    return max(v.deviation for v in vertices(3))


def _ppt_overlap_deviation(_: SeesawConfig) -> float:
    worst = 0.0
    for d in (3, 4, 5):
        anchor = np.eye(d, dtype=np.complex128)[0]
        value = ppt_relaxed_overlap(conditional(flip_conjugate_projectors(d).pi, 3, anchor))
        worst = max(worst, abs(value - flip_conjugate_overlap_target(d)))
    return worst


# POVM


def _exact_probability_residual(cfg: SeesawConfig) -> float:
    worst = 0.0
    for k in range(POVM_STATES):
        psi = random_state(3, 2 + k % 2, derive_seed(cfg.seed, "verify", k))
        measured = permutation_test(psi).probabilities
        expected = projector_expectations(psi)
        worst = max(worst, *(abs(m - e) for m, e in zip(measured, expected, strict=True)))
    return worst


def _sampling_outliers(cfg: SeesawConfig) -> float:
    psi = random_state(3, 3, derive_seed(cfg.seed, "verify", 0))
    return float(len(permutation_test(psi, POVM_SHOTS, cfg.seed).outliers()))


def _trace_cube_disagreement(cfg: SeesawConfig) -> float:
    worst = 0.0
    for k in range(SAMPLE_STATES):
        psi = random_state(3, 3, derive_seed(cfg.seed, "verify", k))
        worst = max(worst, trace_cube(reduced_density_matrix(psi, (1,))).max_disagreement)
    return worst


def _product_gce(_: SeesawConfig) -> float:
    return abs(gce(StateVector.basis((0, 0, 0), 3), (1, 2, 3)).value)


def _gce_lu_deviation(cfg: SeesawConfig) -> float:
    psi = random_state(3, 3, derive_seed(cfg.seed, "verify", 0))
    reference = gce(psi, (1, 2, 3)).value
    worst = 0.0
    for k in range(10):
        rng = np.random.default_rng(derive_seed(cfg.seed, "verify-lu", k))
        unitaries = [haar_random_unitary(3, rng).entries for _ in range(3)]
        worst = max(worst, abs(gce(apply_local(psi, unitaries), (1, 2, 3)).value - reference))
    return worst


def _w_minus(d: int) -> Operator:
    return permutation_witnesses(d).minus


def _w_plus(d: int) -> Operator:
    return permutation_witnesses(d).plus


def _top_eigenvalue(w: Operator) -> float:
    return float(np.linalg.eigvalsh(w.entries)[-1])


def _witness_bound_criteria() -> tuple[Criterion, ...]:
    """fs, bs and q of W- for d = 3..5 and of W+ for d = 4, 5."""
    criteria: list[Criterion] = []
    for d in (3, 4, 5):
        criteria += [
            Criterion(Suite.BOUNDS, f"fs(W-), d = {d}", d / 2, 1e-7, lambda cfg, d=d: fully_separable_max(_w_minus(d), cfg)),
            Criterion(Suite.BOUNDS, f"bs(W-), d = {d}", float(d), 1e-7, lambda _, d=d: invariant_biseparable_max(_w_minus(d))),
            Criterion(Suite.BOUNDS, f"q(W-), d = {d}", d * np.sqrt(3.0), 1e-7, lambda _, d=d: _top_eigenvalue(_w_minus(d))),
        ]
    for d in (4, 5):
        separable = 2 * (d - 1) * (d - 2) / d
        criteria += [
            Criterion(Suite.BOUNDS, f"fs(W+), d = {d}", separable, 1e-7, lambda cfg, d=d: fully_separable_max(_w_plus(d), cfg)),
            Criterion(Suite.BOUNDS, f"bs(W+), d = {d}", separable, 1e-7, lambda _, d=d: invariant_biseparable_max(_w_plus(d))),
            Criterion(
                Suite.BOUNDS,
                f"q(W+), d = {d}",
                2 * (d + 1) * (d + 2) / d,
                1e-7,
                lambda _, d=d: _top_eigenvalue(_w_plus(d)),
            ),
        ]
    return tuple(criteria)


def _phase_state_criteria() -> tuple[Criterion, ...]:
    return tuple(
        Criterion(
            Suite.BOUNDS,
            f"G(phase state), d = {d}",
            1 - 1 / (2 * (d - 1)),
            1e-4,
            lambda cfg, d=d: geometric_measure(phase_state(d), cfg),
        )
        for d in (3, 4, 5)
    )


CRITERIA: tuple[Criterion, ...] = (
    Criterion(Suite.ALGEBRA, "projector algebra, d = 2..5", 0.0, 1e-12, _projector_residual),
    Criterion(Suite.ALGEBRA, "W± permutation decompositions, d = 2..5", 0.0, 1e-10, _witness_identity_residual),
    Criterion(Suite.ALGEBRA, "[W+, W-] = 0, d = 2..5", 0.0, 1e-10, _commutator_residual),
    Criterion(Suite.ALGEBRA, "W± spectral decompositions, d = 3..5", 0.0, 1e-9, _spectral_residual),
    Criterion(Suite.ALGEBRA, "H_J2 reductions are 1/3", 0.0, 1e-12, _j2_ame_residual),
    Criterion(Suite.ALGEBRA, "min Re⟨abc|T|abc⟩", -1 / 8, 1e-9, lambda _: extremize_eta(0.0)),
    Criterion(Suite.ALGEBRA, "min Re(e^{iπ/3}⟨abc|T|abc⟩)", -1 / 6, 1e-9, lambda _: extremize_eta(np.pi / 3)),
    Criterion(
        Suite.BOUNDS,
        "min product overlap of Π_S, d = 2",
        1 / 4,
        1e-8,
        lambda cfg: min_projector_overlap(tripartite_projectors(2).S, cfg).value,
    ),
    Criterion(
        Suite.BOUNDS,
        "min product overlap of Π_S + Π_J̄, d = 2",
        4 / 9,
        1e-8,
        lambda cfg: min_projector_overlap(
            (tripartite_projectors(2).S + tripartite_projectors(2).Jbar).as_hermitian(), cfg
        ).value,
    ),
    Criterion(Suite.BOUNDS, "G of random chiral qubit states - 5/9", 0.0, 1e-7, _random_chiral_gm_deviation),
    Criterion(Suite.BOUNDS, "eta minimum, analytic vs numeric, d = 2..5", 0.0, 1e-6, _eta_disagreement),
    Criterion(Suite.BOUNDS, "G_GME of random H_J2 states - 2/3", 0.0, 1e-7, _j2_gme_deviation),
    *_witness_bound_criteria(),
    Criterion(Suite.BOUNDS, "fs(W+), d = 3", 4 / 3, 1e-7, lambda cfg: fully_separable_max(_w_plus(3), cfg)),
    Criterion(Suite.BOUNDS, "bs(W+), d = 3", 10 / 3, 1e-7, lambda _: invariant_biseparable_max(_w_plus(3))),
    Criterion(
        Suite.BOUNDS,
        "q(W+), d = 3",
        40 / 3,
        1e-7,
        lambda _: _top_eigenvalue(_w_plus(3)),
    ),
    Criterion(Suite.BOUNDS, "max ⟨χ|χ⟩ - d²/(d²-1), d = 3..12", 0.0, 1e-6, _chi_norm_deviation),
    Criterion(Suite.BOUNDS, "G(φ_0) - (1 - d/(d²-1)), d = 3..8", 0.0, 1e-9, _flip_bound_margin, "ge"),
    Criterion(Suite.BOUNDS, "Λ²(M)", 2 / 9, 1e-6, lambda cfg: max_product_overlap(four_qubit_m(), cfg).value),
    Criterion(Suite.BOUNDS, "G(four-qutrit chiral state)", 7 / 8, 1e-4, lambda cfg: geometric_measure(four_qutrit_chiral(), cfg)),
    *_phase_state_criteria(),
    Criterion(Suite.SDP, "W-plane vertices, d = 3", 0.0, 1e-7, _vertex_deviation),
    Criterion(Suite.SDP, "PPT-relaxed overlap of Π_I - d²/((d+1)(d²-1)), d = 3..5", 0.0, 1e-6, _ppt_overlap_deviation),
    Criterion(
        Suite.SDP,
        "PPT support ≥ fs(W-) at θ = 0, d = 3",
        3 / 2,
        1e-6,
        lambda _: invariant_boundary(3, 0.0, BoundaryFamily.PPT_ALL).value,
        "ge",
    ),
    Criterion(Suite.SDP, "PPT GME states found, d = 3", 1.0, 0.0, lambda _: float(len(find_ppt_gme(3).gme_rows())), "ge"),
    Criterion(Suite.SDP, "PPT GME states found, d = 4", 1.0, 0.0, lambda _: float(len(find_ppt_gme(4).gme_rows())), "ge"),
    Criterion(Suite.SDP, "PPT GME states found, d = 2", 0.0, 0.0, lambda _: float(len(find_ppt_gme(2).rows))),
    Criterion(Suite.POVM, "exact probabilities = projector expectations", 0.0, 1e-12, _exact_probability_residual),
    Criterion(Suite.POVM, "sampled outcomes outside 4σ", 0.0, 0.0, _sampling_outliers),
    Criterion(Suite.POVM, "Tr ρ³ routes agree", 0.0, 1e-10, _trace_cube_disagreement),
    Criterion(Suite.POVM, "GCE of |000⟩", 0.0, 1e-12, _product_gce),
    Criterion(Suite.POVM, "GCE under local unitaries", 0.0, 1e-10, _gce_lu_deviation),
)


def criteria_for(suite: Suite) -> list[Criterion]:
    if suite is Suite.ALL:
        return list(CRITERIA)
    return [c for c in CRITERIA if c.suite is suite]


def _passes(measured: float, criterion: Criterion) -> bool:
    if criterion.comparison == "ge":
        return measured >= criterion.target - criterion.tol
    return abs(measured - criterion.target) <= criterion.tol


def run_criterion(criterion: Criterion, cfg: SeesawConfig) -> CriterionResult:
    """Evaluate one criterion; library errors count as failures."""
    start = time.perf_counter()
    measured: float | None = None
    error = None
    try:
        measured = float(criterion.measure(cfg))
    except EntlabError as e:
        error = str(e)
    return CriterionResult(
        suite=criterion.suite.value,
        name=criterion.name,
        measured=measured,
        target=criterion.target,
        tol=criterion.tol,
        comparison=criterion.comparison,
        passed=measured is not None and _passes(measured, criterion),
        seconds=time.perf_counter() - start,
        error=error,
    )


def run_suite(suite: Suite, cfg: SeesawConfig, threads: int = 1) -> list[CriterionResult]:
    """Evaluate the suite's criteria on `threads` workers; results keep the table order."""
    with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        return list(executor.map(lambda c: run_criterion(c, cfg), criteria_for(suite)))


def verify_payload(suite: Suite, results: list[CriterionResult]) -> dict[str, Any]:
    """Machine report; timings are left out so reruns are byte-identical."""
    passed = sum(r.passed for r in results)
    return {
        "suite": suite.value,
        "passed": passed,
        "failed": len(results) - passed,
        "criteria": [r.as_payload() for r in results],
    }


def print_verify_table(results: list[CriterionResult]) -> None:
    table = Table(show_header=True, header_style="bold")
    table.add_column("SUITE", style="cyan")
    table.add_column("CRITERION")
    table.add_column("MEASURED", justify="right")
    table.add_column("TARGET", justify="right")
    table.add_column("TIME", justify="right")
    table.add_column("")
    for r in results:
        measured = "-" if r.measured is None else f"{r.measured:.12g}"
        relation = "≥" if r.comparison == "ge" else "±"
        target = f"{r.target:.12g} {relation} {r.tol:g}"
        mark = "[green]✓[/green]" if r.passed else "[red]✗[/red]"
        table.add_row(r.suite, r.name, measured, target, f"{r.seconds:.1f}s", mark)
    cli_logger.table(table)
    for r in results:
        if r.error:
            cli_logger.dim(f"  • {r.name}: {r.error}")


def summarize(results: list[CriterionResult]) -> bool:
    """Print the pass count; True when every criterion passed."""
    passed = sum(r.passed for r in results)
    if passed == len(results):
        cli_logger.success(f"{passed}/{len(results)} criteria passed")
        return True
    cli_logger.error(f"{len(results) - passed} of {len(results)} criteria failed")
    return False

