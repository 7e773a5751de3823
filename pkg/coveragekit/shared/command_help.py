"""Guide screens: constructions, measures and the files each command writes."""

from rich.columns import Columns
from rich.panel import Panel
from rich.table import Table
from rich.text import Text

from coveragekit.shared.ui import console


def _table(header_style: str, *columns: str) -> Table:
    table = Table(show_header=True, header_style=header_style, box=None, padding=(0, 1))
    table.add_column(columns[0], style="bright_green", min_width=14)
    for name in columns[1:]:
        table.add_column(name, style="white", min_width=20)
    return table


def create_construction_panels():
    """Construction and measure overview tables."""

    constructions = _table("bold bright_blue", "Construction", "Observations", "Padding")
    constructions.add_row("CoverageAware", "Observed trading days only", "none")
    constructions.add_row("ForwardFilled", "Every calendar day in [S, E]", "weekends, holidays")
    constructions.add_row("BackwardFilled", "Every calendar day in [panel start, E]",
                          "pre-listing days too")

    constructions_panel = Panel(
        constructions,
        title="[bold bright_blue]🧱 Constructions (--naive-kind)[/bold bright_blue]",
        border_style="bright_blue",
        padding=(1, 1)
    )

    measures = _table("bold bright_magenta", "Measure", "Value")
    measures.add_row("ReturnStd", "Sample std of log returns (ddof 1)")
    measures.add_row("GarchUnconditionalVariance", "omega / (1 - alpha - beta) of a GARCH(1,1) fit")
    measures.add_row("delta_sigma", "(aware - naive) / aware; > 0 means suppression")

    measures_panel = Panel(
        measures,
        title="[bold bright_magenta]📐 Measures[/bold bright_magenta]",
        border_style="bright_magenta",
        padding=(1, 1)
    )
    return [constructions_panel, measures_panel]


def create_outputs_panel():
    """Files written by each command."""

    outputs = _table("bold bright_green", "Command", "Files")
    outputs.add_row("ingest", "availability_matrix.csv, metadata.json, ingest_report.json,\n"
                              "coverage_counts.csv, instrument_types.csv, lifespans.csv,\n"
                              "lifespan_histogram.csv")
    outputs.add_row("simulate", "adjusted/, unadjusted/, metadata.csv, ground_truth.json")
    outputs.add_row("analyze", "distortion_records.csv, summary.json, profiles.csv, fits.json,\n"
                               "figures/*.csv, run_manifest.json")
    outputs.add_row("report", "report.md")

    return Panel(
        outputs,
        title="[bold bright_green]📁 Output Files[/bold bright_green]",
        border_style="bright_green",
        padding=(1, 1)
    )


def create_workflow_panel():
    """Typical end-to-end run."""

    workflow = Text()
    for step, command, comment in (
        ("1.", "coveragekit simulate --out corpus", "# or bring a vendor corpus"),
        ("2.", "coveragekit ingest --unadjusted-dir corpus/unadjusted --out out",
         "# availability matrix"),
        ("3.", "coveragekit analyze --config run.toml --out out", "# records and summaries"),
        ("4.", "coveragekit report --analysis-dir out", "# report.md"),
    ):
        workflow.append(f"{step} ", style="white")
        workflow.append(command, style="bold bright_cyan")
        workflow.append(f"  {comment}\n", style="dim")

    workflow.append("\n💡 ", style="yellow")
    workflow.append("Tip: every key of the run file is listed in ", style="white")
    workflow.append("Docs/configuration.md", style="bold bright_blue")

    return Panel(
        workflow,
        title="[bold bright_cyan]🚀 How to Use[/bold bright_cyan]",
        border_style="bright_cyan",
        padding=(1, 2)
    )


def display_guide():
    """Display the construction, measure and output guide."""
    console.print()
    console.print(
        "[bold bright_cyan]📖 coveragekit Guide[/bold bright_cyan]", justify="center")
    console.print(
        "[dim]How calendar alignment distorts volatility, and what each command writes[/dim]",
        justify="center")
    console.print()

    console.print(Columns(create_construction_panels(), equal=True, expand=True))
    console.print()
    console.print(create_outputs_panel())
    console.print()
    console.print(create_workflow_panel())
    console.print()
