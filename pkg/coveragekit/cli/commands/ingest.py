from pathlib import Path
from typing import Optional

import typer
from rich.panel import Panel
from rich.table import Table

from coveragekit.core.errors import ConfigError
from coveragekit.core.pipeline import run_ingest, write_ingest_outputs
from coveragekit.shared.config import load_run_config
from coveragekit.shared.ui import cli_errors, console, spinner


def _ingest_summary_panel(result, out_dir: Path) -> Panel:
    rows, days = result.matrix.shape
    table = Table(show_header=False, box=None, padding=(0, 2))
    table.add_column("Item", style="bold bright_blue")
    table.add_column("Value", style="white")
    table.add_row("Instruments", str(rows))
    table.add_row("Trading days", str(days))
    table.add_row("Panel", f"{result.calendar.panel_start} .. {result.calendar.panel_end}")
    table.add_row("Rows loaded", str(result.report.rows_loaded))
    table.add_row("Warnings", str(len(result.report.warnings)))
    table.add_row("Rejected files", str(len(result.report.rejects)))
    table.add_row("Output", str(out_dir))
    return Panel(
        table,
        title="[bold bright_green]✨ Corpus ingested[/bold bright_green]",
        border_style="bright_green",
        padding=(1, 2)
    )


def ingest(
    config: Optional[Path] = typer.Option(
        None, "--config", "-c", help="⚙️  Run configuration (TOML)", metavar="FILE"),
    adjusted_dir: Optional[Path] = typer.Option(
        None, "--adjusted-dir", help="📁 Directory of split/dividend-adjusted EoD files"),
    unadjusted_dir: Optional[Path] = typer.Option(
        None, "--unadjusted-dir", help="📁 Directory of unadjusted EoD files"),
    metadata: Optional[Path] = typer.Option(
        None, "--metadata", "-m", help="🏷️  Ticker to instrument type table (CSV)"),
    out: Optional[Path] = typer.Option(
        None, "--out", "-o", help="📦 Output directory"),
):
    """
    📥 Ingest a corpus of end-of-day files.

    Builds the availability matrix over the union trading calendar and the
    per-instrument coverage windows.

    📋 EXAMPLES:
        coveragekit ingest --unadjusted-dir data/unadjusted --out out
        coveragekit ingest --config run.toml
    """
    with cli_errors():
        run_config = load_run_config(config, {
            "input.adjusted_dir": str(adjusted_dir) if adjusted_dir else None,
            "input.unadjusted_dir": str(unadjusted_dir) if unadjusted_dir else None,
            "input.metadata": str(metadata) if metadata else None,
            "output.dir": str(out) if out else None,
        })
        options = run_config.ingest
        if options is None:
            raise ConfigError("ingest reads a corpus; the configuration names a synthetic universe")
        with spinner("Loading corpus...", "Corpus loaded"):
            result = run_ingest(options.layout, options.schema, options.workers)
        write_ingest_outputs(result, run_config.output_dir)
    console.print(_ingest_summary_panel(result, run_config.output_dir))
