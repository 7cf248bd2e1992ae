"""entlab CLI entry point."""

import sys
from pathlib import Path
from typing import Annotated

import typer

from entlab import __version__, cli_logger, exit_codes
from entlab.commands.gm import PROJECTOR_NAMES, print_gm_summary, projector_payload, state_payload
from entlab.commands.povm import povm_payload, print_povm_summary
from entlab.commands.preconditions import (
    STDOUT_PATH,
    build_run_config,
    domain_errors,
    quiet,
    seesaw_for,
    write_payload,
)
from entlab.commands.projectors import print_projector_table, projector_export
from entlab.commands.projectors import projector_payload as projector_algebra_payload
from entlab.commands.sdp import (
    SdpProblem,
    boundary_payload,
    gme_payload,
    overlap_payload,
    pptgme_payload,
    print_pptgme_table,
    print_sdp_summary,
    write_pptgme_csv,
)
from entlab.commands.states import STATE_PRESETS, load_state
from entlab.commands.statespace import print_sweep_summary
from entlab.commands.verify import Suite, print_verify_table, run_suite, summarize, verify_payload
from entlab.commands.witness import print_witness_table, witness_payload
from entlab.config import SolverTolerances, Subcommand
from entlab.errors import UnsupportedCombinationError, handle_cli_error
from entlab.sdp import BoundaryFamily, WitnessPair
from entlab.statespace import DEFAULT_GRID, Family, emit, render_json, sweep
from entlab.witnesses import WitnessKind

app = typer.Typer(
    name="entlab",
    help="Chiral symmetries, entangled subspaces and witnesses for three-party qudits.",
    no_args_is_help=True,
)

# Options shared by several commands
SeedOption = Annotated[int | None, typer.Option("--seed", help="Base seed (default: ENTLAB_SEED or 20240607).")]
RestartsOption = Annotated[int | None, typer.Option("--restarts", help="See-saw restarts (default 64).")]
ConfigOption = Annotated[
    Path | None, typer.Option("--config", help="YAML file with seesaw, tolerances and threads sections.")
]
JsonOption = Annotated[Path | None, typer.Option("--json", help="Write the JSON payload here ('-' for stdout).")]
ThreadsOption = Annotated[
    int | None, typer.Option("--threads", help="Worker threads (default: ENTLAB_THREADS or CPU count).")
]


def version_callback(value: bool) -> None:
    """Show version and exit."""
    if value:
        cli_logger.info(f"[bold]entlab[/bold] {__version__}")
        raise typer.Exit()


@app.callback()
def main(
    version: bool = typer.Option(
        False,
        "--version",
        "-V",
        callback=version_callback,
        is_eager=True,
        help="Show entlab version and exit.",
    ),
) -> None:
    """Chiral symmetries, entangled subspaces and witnesses for three-party qudits."""


@app.command()
def projectors(
    d: Annotated[int, typer.Option("--d", help="Local dimension.")] = 3,
    out: Annotated[
        Path | None,
        typer.Option("--out", help="Write every projector, basis and trace as JSON ('-' for stdout)."),
    ] = None,
    json_path: JsonOption = None,
) -> None:
    """Check the symmetric, antisymmetric, chiral and antichiral projectors.

    Reports traces against the closed forms, idempotency, mutual orthogonality
    and completeness. --out exports the matrices themselves.
    """
    with domain_errors():
        build_run_config(Subcommand.PROJECTORS, d=d)
        payload = projector_algebra_payload(d)
        if out:
            write_payload(projector_export(d), out)
    if not (quiet(json_path) or quiet(out)):
        print_projector_table(payload)
    if json_path:
        write_payload(payload, json_path)
    raise typer.Exit(exit_codes.SUCCESS)


@app.command()
def witness(
    d: Annotated[int, typer.Option("--d", help="Local dimension.")] = 3,
    which: Annotated[WitnessKind, typer.Option("--which", help="Witness observable.")] = WitnessKind.MINUS,
    bounds: Annotated[
        bool, typer.Option("--bounds/--no-bounds", help="Also compute fs, bs and q numerically.")
    ] = False,
    seed: SeedOption = None,
    restarts: RestartsOption = None,
    config: ConfigOption = None,
    out: Annotated[
        Path | None, typer.Option("--out", "--json", help="Write the JSON payload here ('-' for stdout).")
    ] = None,
) -> None:
    """Spectrum and separability bounds of W±, 𝕎± or the GME witnesses P, P̄."""
    with domain_errors():
        run = build_run_config(Subcommand.WITNESS, d=d, seed=seed, restarts=restarts, config=config)
        payload = witness_payload(d, which, seesaw_for(run, config) if bounds else None)
    if not quiet(out):
        print_witness_table(payload)
    if out:
        write_payload(payload, out)
    raise typer.Exit(exit_codes.SUCCESS)


@app.command()
def gm(
    state: Annotated[
        str | None,
        typer.Option("--state", help=f"Preset ({', '.join(STATE_PRESETS)}), file:PATH or PATH.json."),
    ] = None,
    projector: Annotated[
        str | None,
        typer.Option("--projector", help=f"Minimize the product overlap of {', '.join(PROJECTOR_NAMES)}."),
    ] = None,
    d: Annotated[int | None, typer.Option("--d", help="Local dimension for presets that take one.")] = None,
    seed: SeedOption = None,
    restarts: RestartsOption = None,
    config: ConfigOption = None,
    json_path: JsonOption = None,
) -> None:
    """Geometric measure of a state, or the minimum product overlap of a projector.

    Without --state or --projector the three-qubit W state is used.
    """
    if state and projector:
        cli_logger.error("Cannot specify both --state and --projector")
        raise typer.Exit(exit_codes.DOMAIN_ERROR)
    with domain_errors():
        run = build_run_config(Subcommand.GM, d=d, seed=seed, restarts=restarts, config=config)
        cfg = seesaw_for(run, config)
        if projector:
            payload = projector_payload(projector, run.d or 2, cfg)
        else:
            label = state or "w"
            payload = state_payload(label, load_state(label, run.d or 3, run.seed), cfg)
    if not quiet(json_path):
        print_gm_summary(payload)
    if json_path:
        write_payload(payload, json_path)
    if not payload["converged"]:
        if not quiet(json_path):
            cli_logger.warning("Best restart did not reach the tolerance")
        raise typer.Exit(exit_codes.NOT_CONVERGED)
    raise typer.Exit(exit_codes.SUCCESS)


@app.command()
def sdp(
    problem: Annotated[SdpProblem, typer.Option("--problem", help="SDP to solve.")],
    d: Annotated[int, typer.Option("--d", help="Local dimension.")] = 3,
    theta: Annotated[float, typer.Option("--theta", help="Boundary direction in radians.")] = 0.0,
    family: Annotated[
        BoundaryFamily, typer.Option("--family", help="Boundary family.")
    ] = BoundaryFamily.PPT_ALL,
    party: Annotated[int | None, typer.Option("--party", help="Cut for ppt_single.")] = None,
    pair: Annotated[WitnessPair, typer.Option("--pair", help="Witness pair of the plane.")] = WitnessPair.W,
    a: Annotated[float, typer.Option("--a", help="Weight of Π_A for the gme problem.")] = 0.0,
    c: Annotated[float, typer.Option("--c", help="Weight of Π_J̄ for the gme problem.")] = 0.0,
    points: Annotated[int, typer.Option("--points", help="Sweep points for pptgme.")] = 12,
    tol: Annotated[float | None, typer.Option("--tol", help="Barrier gap target (default 1e-8).")] = None,
    threads: ThreadsOption = None,
    config: ConfigOption = None,
    json_path: JsonOption = None,
    csv_path: Annotated[Path | None, typer.Option("--csv", help="Write the pptgme sweep as CSV.")] = None,
) -> None:
    """Invariant-state SDPs: PPT overlap bound, boundaries, GME decision, PPT-GME search."""
    with domain_errors():
        run = build_run_config(Subcommand.SDP, d=d, threads=threads, config=config, csv_path=csv_path)
        tolerances = run.tolerances
        if tol is not None:
            tolerances = SolverTolerances.model_validate({**tolerances.model_dump(), "gap": tol})
        if csv_path and problem is not SdpProblem.PPTGME:
            raise UnsupportedCombinationError("problem for --csv", problem.value, [SdpProblem.PPTGME.value])
        if problem is SdpProblem.OVERLAP:
            payload = overlap_payload(d, tolerances)
        elif problem is SdpProblem.BOUNDARY:
            payload = boundary_payload(d, theta, family, party, pair, tolerances)
        elif problem is SdpProblem.GME:
            payload = gme_payload(d, a, c, tolerances)
        else:
            payload = pptgme_payload(d, points, tolerances, run.threads)
        if csv_path:
            write_pptgme_csv(payload, csv_path)
    if not quiet(json_path):
        print_sdp_summary(payload)
    if json_path:
        write_payload(payload, json_path)
    raise typer.Exit(exit_codes.SUCCESS)


@app.command()
def pptgme(
    d: Annotated[int, typer.Option("--d", help="Local dimension.")] = 3,
    points: Annotated[int, typer.Option("--points", help="Sweep points along ⟨W+⟩.")] = 12,
    threads: ThreadsOption = None,
    config: ConfigOption = None,
    json_path: JsonOption = None,
    csv_path: Annotated[Path | None, typer.Option("--csv", help="Write the sweep as CSV.")] = None,
) -> None:
    """PPT states of aΠ_A + bΠ_S + cΠ_J̄ that are GME (same as sdp --problem pptgme)."""
    with domain_errors():
        run = build_run_config(Subcommand.PPTGME, d=d, threads=threads, config=config, csv_path=csv_path)
        payload = pptgme_payload(d, points, run.tolerances, run.threads)
        if csv_path:
            write_pptgme_csv(payload, csv_path)
    if not quiet(json_path):
        print_pptgme_table(payload)
    if json_path:
        write_payload(payload, json_path)
    raise typer.Exit(exit_codes.SUCCESS)


@app.command()
def statespace(
    d: Annotated[int, typer.Option("--d", help="Local dimension (3 or 4).")] = 3,
    pair: Annotated[WitnessPair, typer.Option("--pair", help="Witness pair of the plane.")] = WitnessPair.W,
    families: Annotated[
        str,
        typer.Option("--families", help="Comma-separated: fs, bs, ppt, pptmix, quantum, pptgme."),
    ] = "fs,bs,ppt,pptmix,quantum",
    grid: Annotated[int, typer.Option("--grid", help="Number of θ values (>= 16).")] = DEFAULT_GRID,
    seed: SeedOption = None,
    restarts: RestartsOption = None,
    threads: ThreadsOption = None,
    config: ConfigOption = None,
    json_path: JsonOption = None,
    csv_path: Annotated[Path | None, typer.Option("--csv", help="Write the sweep as CSV.")] = None,
    svg_path: Annotated[Path | None, typer.Option("--svg", help="Write the regions as SVG.")] = None,
) -> None:
    """Support-function sweep of the (⟨W-⟩, ⟨W+⟩) or (⟨𝕎-⟩, ⟨𝕎+⟩) plane."""
    with domain_errors():
        run = build_run_config(
            Subcommand.STATESPACE,
            d=d,
            seed=seed,
            restarts=restarts,
            threads=threads,
            config=config,
            json_path=json_path,
            csv_path=csv_path,
            svg_path=svg_path,
        )
        chosen = tuple(Family(f.strip()) for f in families.split(",") if f.strip())
        table = sweep(d, pair, chosen, grid, seesaw_for(run, config), run.threads, run.tolerances.gap)
        if run.json_path == STDOUT_PATH:
            typer.echo(render_json(table), nl=False)
        elif run.json_path:
            emit(table, ("json",), run.json_path)
        if run.csv_path:
            emit(table, ("csv",), run.csv_path)
        if run.svg_path:
            emit(table, ("svg",), run.svg_path)
    if not quiet(json_path):
        print_sweep_summary(table)
    raise typer.Exit(exit_codes.SUCCESS)


@app.command()
def povm(
    state: Annotated[
        str, typer.Option("--state", help=f"Preset ({', '.join(STATE_PRESETS)}), file:PATH or PATH.json.")
    ] = "w",
    d: Annotated[int | None, typer.Option("--d", help="Local dimension for presets that take one.")] = None,
    shots: Annotated[int | None, typer.Option("--shots", help="Sample this many outcomes.")] = None,
    exact: Annotated[bool, typer.Option("--exact", help="Exact probabilities only (default).")] = False,
    order: Annotated[int, typer.Option("--order", help="Tsallis order K for the GCE.")] = 3,
    seed: SeedOption = None,
    json_path: JsonOption = None,
) -> None:
    """Permutation test with a qutrit ancilla, Tr ρ³ and concentratable entanglement."""
    if exact and shots is not None:
        cli_logger.error("Cannot specify both --exact and --shots")
        raise typer.Exit(exit_codes.DOMAIN_ERROR)
    with domain_errors():
        run = build_run_config(Subcommand.POVM, d=d, seed=seed)
        psi = load_state(state, run.d or 3, run.seed)
        payload = povm_payload(state, psi, shots, run.seed, order)
    if not quiet(json_path):
        print_povm_summary(payload)
    if json_path:
        write_payload(payload, json_path)
    raise typer.Exit(exit_codes.SUCCESS)


@app.command()
def verify(
    suite: Annotated[Suite, typer.Option("--suite", help="Group of acceptance checks.")] = Suite.ALL,
    seed: SeedOption = None,
    restarts: RestartsOption = None,
    threads: ThreadsOption = None,
    config: ConfigOption = None,
    json_path: JsonOption = None,
) -> None:
    """Replay the acceptance checks and report measured values against their targets."""
    with domain_errors():
        run = build_run_config(
            Subcommand.VERIFY, seed=seed, restarts=restarts, threads=threads, config=config
        )
        results = run_suite(suite, seesaw_for(run, config), run.threads)
    if not quiet(json_path):
        print_verify_table(results)
        passed = summarize(results)
    else:
        passed = all(r.passed for r in results)
    if json_path:
        write_payload(verify_payload(suite, results), json_path)
    raise typer.Exit(exit_codes.SUCCESS if passed else exit_codes.DOMAIN_ERROR)


def main_cli() -> None:
    """CLI entry point with top-level exception handling.

    Wraps the Typer app so unhandled exceptions become one clean error line
    and an exit code instead of a traceback.
    """
    try:
        app()
    except Exception as e:
        sys.exit(handle_cli_error(e))


if __name__ == "__main__":
    main_cli()
