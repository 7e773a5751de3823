import typer
from rich.align import Align
from rich.panel import Panel
from rich.table import Table
from rich.text import Text

from coveragekit.shared.command_help import display_guide
from coveragekit.shared.ui import configure_logging, console, create_quick_start_panel, print_ascii_msg
from coveragekit.cli.commands.analyze import analyze
from coveragekit.cli.commands.ingest import ingest
from coveragekit.cli.commands.report import report
from coveragekit.cli.commands.simulate import simulate
from coveragekit.cli.commands.version import version

app = typer.Typer(
    name="coveragekit",
    help="📈 coveragekit - temporal coverage bias in financial panel data",
    add_completion=False,
    rich_markup_mode="rich",
    context_settings={"help_option_names": ["-h", "--help"]}
)

COMMANDS = (
    ("ingest", "Build the availability matrix and coverage windows of a corpus"),
    ("simulate", "Generate a synthetic GARCH(1,1) corpus with staggered listings"),
    ("analyze", "Measure ReturnStd and GARCH distortion of naive constructions"),
    ("report", "Render the markdown report of an analysis run"),
    ("guide", "Constructions, measures and output files"),
    ("version", "Show coveragekit version and system information"),
)


def _description() -> Text:
    description = Text()
    description.append(
        "Compare coverage-aware series with naive calendar-aligned ones and measure\n", style="white")
    description.append(
        "how much volatility the padding suppresses.\n", style="white")
    return description


def create_help():
    """Organized help display"""
    print_ascii_msg()
    console.print(Align.center(_description()))
    console.print()

    commands_table = Table(
        show_header=True, header_style="bold bright_cyan", box=None, padding=(0, 2))
    commands_table.add_column("Command", style="bold bright_blue", min_width=12)
    commands_table.add_column("Description", style="white", min_width=50)
    for name, description in COMMANDS:
        commands_table.add_row(name, description)

    console.print(Panel(
        commands_table,
        title="[bold bright_cyan]📋 Available Commands[/bold bright_cyan]",
        border_style="bright_cyan",
        padding=(1, 2)
    ))
    console.print()

    console.print(Panel(
        create_quick_start_panel(),
        title="[bold bright_green]🚀 Quick Start Examples[/bold bright_green]",
        border_style="bright_green",
        padding=(1, 2)
    ))
    console.print()

    options_content = Text()
    for flag, text in (
        ("-h, --help", "Show this help message and exit"),
        ("--version", "Show version information"),
        ("-v, --verbose", "Debug logging (optimizer detail)"),
        ("-q, --quiet", "Warnings only, no spinners or progress bars"),
    ):
        options_content.append(f"{flag:<15}", style="bold bright_blue")
        options_content.append(f"{text}\n", style="white")
    options_content.append("\n💡 Get command help: ", style="white")
    options_content.append("coveragekit <command> --help", style="bold bright_green")

    console.print(Panel(
        options_content,
        title="[bold bright_cyan]⚙️  Global Options[/bold bright_cyan]",
        border_style="bright_cyan",
        padding=(1, 2)
    ))
    console.print()


@app.callback(invoke_without_command=True)
def main(
    ctx: typer.Context,
    version_flag: bool = typer.Option(
        False,
        "--version",
        help="Show version information and exit",
        is_eager=True
    ),
    help_flag: bool = typer.Option(
        False,
        "--help",
        "-h",
        help="Show this help message and exit",
        is_eager=True
    ),
    verbose: bool = typer.Option(
        False,
        "--verbose",
        "-v",
        help="Debug logging"
    ),
    quiet: bool = typer.Option(
        False,
        "--quiet",
        "-q",
        help="Warnings only, no spinners or progress bars"
    ),
):
    """
    📈 coveragekit - temporal coverage bias in financial panel data
    """
    configure_logging(verbose=verbose, quiet=quiet)

    if version_flag:
        version()
        raise typer.Exit()

    if help_flag:
        create_help()
        raise typer.Exit()

    if ctx.invoked_subcommand is None:
        print_ascii_msg()
        console.print(Align.center(_description()))
        console.print()
        console.print(create_quick_start_panel())
        console.print()
        console.print(Align.center(
            "[dim]Use 'coveragekit --help' for detailed command information[/dim]"))
        console.print()


app.command(
    name="ingest",
    help="📥 Ingest EoD files: availability matrix, coverage windows, ingest report"
)(ingest)

app.command(
    name="simulate",
    help="🎲 Generate a synthetic GARCH(1,1) corpus with staggered listings"
)(simulate)

app.command(
    name="analyze",
    help="📊 Measure ReturnStd and GARCH unconditional-variance distortion"
)(analyze)

app.command(
    name="report",
    help="📝 Render the markdown report of an analysis run"
)(report)

app.command(
    name="version",
    help="📋 Show coveragekit version and system information"
)(version)


@app.command(name="guide", help="📖 Show the construction, measure and output guide")
def guide():
    """Display the guide."""
    display_guide()
