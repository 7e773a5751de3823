from pathlib import Path
from typing import List, Optional

import typer
from InquirerPy import inquirer
from InquirerPy.base.control import Choice
from rich.panel import Panel
from rich.table import Table

from coveragekit.core.construction import NaiveKind
from coveragekit.core.pipeline import run_analysis, write_analysis_outputs
from coveragekit.shared.config import load_run_config
from coveragekit.shared.ui import cli_errors, console, exit_with_error, track_progress, EXIT_CONFIG


def _prompt_naive_kinds() -> list[str]:
    """
    Let the user tick the naive constructions to compare against the
    coverage-aware baseline (space to toggle, enter to confirm).
    """
    kinds = inquirer.checkbox(
        message="Naive constructions to compare:",
        choices=[Choice(kind.value, name=kind.label, enabled=True) for kind in NaiveKind],
        pointer="👉",
        qmark="❓",
        validate=lambda selected: len(selected) > 0,
        invalid_message="Pick at least one construction",
    ).execute()
    return list(kinds)


def _summary_table(result) -> Table:
    table = Table(show_header=True, header_style="bold bright_cyan", box=None, padding=(0, 2))
    table.add_column("Measure", style="bold bright_blue")
    table.add_column("Naive", style="white")
    table.add_column("n", justify="right")
    table.add_column("Mean", justify="right")
    table.add_column("Median", justify="right")
    table.add_column("Sign test p", justify="right")
    table.add_column("Breakdowns", justify="right")
    for s in result.summaries:
        table.add_row(
            s.measure.value, s.naive_kind.label, str(s.n),
            f"{100 * s.mean:.1f}%", f"{100 * s.median:.1f}%",
            "n/a" if s.sign_test_p is None else f"{s.sign_test_p:.3g}",
            str(s.breakdown_count),
        )
    return table


def analyze(
    config: Optional[Path] = typer.Option(
        None, "--config", "-c", help="⚙️  Run configuration (TOML)", metavar="FILE"),
    naive_kind: Optional[List[str]] = typer.Option(
        None, "--naive-kind", "-k", help="🧱 Naive construction: forward | backward (repeatable)"),
    interactive: bool = typer.Option(
        False, "--interactive", "-i", help="👉 Choose naive constructions from a menu"),
    workers: Optional[int] = typer.Option(
        None, "--workers", "-w", help="⚡ Worker processes for per-instrument fits", min=1),
    out: Optional[Path] = typer.Option(
        None, "--out", "-o", help="📦 Output directory"),
):
    """
    📊 Measure how naive calendar alignment distorts volatility.

    Every selected instrument is analyzed under the coverage-aware
    construction and each naive construction; ReturnStd and GARCH(1,1)
    distortions are aggregated with sign and t tests.

    📋 EXAMPLES:
        coveragekit analyze --config run.toml
        coveragekit analyze --config run.toml --naive-kind forward --workers 4
        coveragekit analyze --config run.toml --interactive
    """
    if naive_kind:
        unknown = sorted(set(k.lower() for k in naive_kind) - {k.value for k in NaiveKind})
        if unknown:
            exit_with_error(f"unknown naive kind(s): {', '.join(unknown)}", EXIT_CONFIG)
    if interactive:
        naive_kind = _prompt_naive_kinds()

    with cli_errors():
        run_config = load_run_config(config, {
            "analysis.naive_kinds": [k.lower() for k in naive_kind] if naive_kind else None,
            "analysis.workers": workers,
            "output.dir": str(out) if out else None,
        })
        result = run_analysis(run_config, track_progress)
        write_analysis_outputs(result, run_config, run_config.output_dir)

    console.print(Panel(
        _summary_table(result),
        title=f"[bold bright_green]✨ {len(result.selected)} instruments analyzed[/bold bright_green]",
        border_style="bright_green",
        padding=(1, 2)
    ))
    if result.skipped:
        console.print(f"[yellow]⚠️  {len(result.skipped)} instrument(s) skipped; "
                      f"see summary.json[/yellow]")
    console.print(f"[dim]Results written to {run_config.output_dir}[/dim]")
