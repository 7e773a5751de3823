from pathlib import Path
from typing import Optional

import typer
from rich.panel import Panel
from rich.table import Table

from coveragekit.core.pipeline import load_report_inputs, render_report
from coveragekit.shared.ui import cli_errors, console


def _fmt(value, spec: str) -> str:
    return "n/a" if value is None else format(value, spec)


def _summaries_table(summaries: list[dict]) -> Table:
    table = Table(show_header=True, header_style="bold bright_cyan", box=None, padding=(0, 2))
    for name in ("Measure", "Naive", "n", "Mean", "Median", "Positive", "Sign p", "t", "t p", "Breakdowns"):
        table.add_column(name, justify="left" if name in ("Measure", "Naive") else "right")
    for s in summaries:
        table.add_row(
            s["measure"], s["naive_kind"], str(s["n"]),
            f"{100 * s['mean']:.1f}%", f"{100 * s['median']:.1f}%", f"{100 * s['frac_positive']:.1f}%",
            _fmt(s["sign_test_p"], ".3g"), _fmt(s["t_stat"], ".3f"), _fmt(s["t_test_p"], ".3g"),
            str(s["breakdown_count"]),
        )
    return table


def _profiles_table(profiles) -> Table:
    table = Table(show_header=True, header_style="bold bright_magenta", box=None, padding=(0, 2))
    for name in ("Ticker", "Construction", "Obs", "Return std", "AIC", "BIC", "RMSE", "MAE"):
        table.add_column(name, justify="left" if name in ("Ticker", "Construction") else "right")
    for row in profiles.to_dict(orient="records"):
        table.add_row(
            str(row["ticker"]), row["construction"], str(row["observations"]),
            _fmt(row["return_std"], ".5f"), _fmt(row["aic"], ".1f"), _fmt(row["bic"], ".1f"),
            _fmt(row["rmse"], ".5f"), _fmt(row["mae"], ".5f"),
        )
    return table


def report(
    analysis_dir: Path = typer.Option(
        Path("coveragekit-out"), "--analysis-dir", "-a", help="📂 Output directory of an analyze run"),
    out: Optional[Path] = typer.Option(
        None, "--out", "-o", help="📝 Markdown file to write (default: <analysis-dir>/report.md)"),
):
    """
    📝 Render the markdown report of an analysis run.

    📋 EXAMPLES:
        coveragekit report --analysis-dir out
        coveragekit report --analysis-dir out --out docs/report.md
    """
    out_path = out or analysis_dir / "report.md"
    with cli_errors():
        inputs = load_report_inputs(analysis_dir)
        render_report(analysis_dir, out_path, inputs)

    console.print(Panel(
        _summaries_table(inputs.summaries),
        title="[bold bright_cyan]📊 Distortion Summaries[/bold bright_cyan]",
        border_style="bright_cyan",
        padding=(1, 2)
    ))
    if len(inputs.profiles):
        console.print(Panel(
            _profiles_table(inputs.profiles),
            title="[bold bright_magenta]🧱 Construction Profiles[/bold bright_magenta]",
            border_style="bright_magenta",
            padding=(1, 2)
        ))
    console.print(f"[bold bright_green]✅ Report written to {out_path}[/bold bright_green]")
