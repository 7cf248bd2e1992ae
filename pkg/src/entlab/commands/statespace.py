"""Sweep summary for the `entlab statespace` command."""

from rich.table import Table

from entlab import cli_logger
from entlab.statespace import SweepTable, nesting_violations


def print_sweep_summary(table: SweepTable) -> None:
    """Per-family support range and the nesting check."""
    summary = Table(show_header=True, header_style="bold", title=f"{table.witness_pair} plane, d = {table.local_dim}")
    summary.add_column("FAMILY", style="cyan")
    summary.add_column("ROWS", justify="right")
    summary.add_column("MIN", justify="right")
    summary.add_column("MAX", justify="right")
    families = list(dict.fromkeys(r.family for r in table.rows))
    for family in families:
        values = [r.value for r in table.family_rows(family)]
        summary.add_row(family, str(len(values)), f"{min(values):.8g}", f"{max(values):.8g}")
    cli_logger.table(summary)
    violations = nesting_violations(table)
    if violations:
        cli_logger.warning(f"{len(violations)} nesting violation(s)")
        for line in violations[:5]:
            cli_logger.dim(f"  • {line}")
    else:
        cli_logger.success("Families are nested at every θ")
