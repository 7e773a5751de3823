import logging
import sys
from contextlib import contextmanager
from typing import Iterable, Iterator, NoReturn, TypeVar

import typer
from halo import Halo
from rich.align import Align
from rich.console import Console
from rich.logging import RichHandler
from rich.progress import BarColumn, MofNCompleteColumn, Progress, SpinnerColumn, TextColumn
from rich.text import Text

from coveragekit.cli.assets.ascii_art import get_coveragekit_logo
from coveragekit.core.errors import AnalysisError, ConfigError, DataError, EstimationError


console = Console()
logger = logging.getLogger("coveragekit")

T = TypeVar("T")

_state = {"quiet": False}


def configure_logging(verbose: bool = False, quiet: bool = False) -> None:
    """Route the package logger through a single RichHandler on the shared console."""
    _state["quiet"] = quiet
    for handler in list(logger.handlers):
        if isinstance(handler, RichHandler):
            logger.removeHandler(handler)
    handler = RichHandler(console=console, show_path=False, rich_tracebacks=True, markup=False)
    handler.setFormatter(logging.Formatter("%(message)s", datefmt="[%X]"))
    logger.addHandler(handler)
    logger.setLevel(logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO)
    logger.propagate = False


def interactive() -> bool:
    return not _state["quiet"] and sys.stdout.isatty()


@contextmanager
def spinner(text: str, done: str) -> Iterator[None]:
    """Halo spinner around a single-step phase."""
    halo = Halo(text=text, spinner="dots", enabled=interactive())
    halo.start()
    try:
        yield
    except BaseException:
        halo.fail(f"{text} failed")
        raise
    else:
        halo.succeed(done)


def track_progress(items: Iterable[T], total: int, description: str) -> Iterator[T]:
    """Rich progress bar over ``items``; silent when quiet or not on a terminal."""
    with Progress(
        SpinnerColumn("dots", style="bright_cyan"),
        TextColumn(f"[bright_white]{description}"),
        BarColumn(),
        MofNCompleteColumn(),
        console=console,
        transient=True,
        disable=not interactive(),
    ) as progress:
        task = progress.add_task(description, total=total)
        for item in items:
            yield item
            progress.advance(task)


def print_ascii_msg():
    """Display the coveragekit logo"""
    console.print()
    console.print(Align.center(get_coveragekit_logo()))
    console.print(Align.center(
        "[bold bright_cyan]Listing coverage for financial panel data[/bold bright_cyan]"))
    console.print()


def create_quick_start_panel():
    """Quick start lines for the landing screen"""
    quick_start = Text()
    quick_start.append("Quick Start:\n", style="bold bright_green")
    for command, comment in (
        ("coveragekit simulate --out corpus", "# Write a synthetic corpus"),
        ("coveragekit ingest --unadjusted-dir corpus/unadjusted", "# Availability matrix + metadata"),
        ("coveragekit analyze --config run.toml", "# Distortion records and summaries"),
        ("coveragekit report --analysis-dir out", "# Markdown report"),
        ("coveragekit guide", "# Constructions, measures and output files"),
    ):
        quick_start.append(f"  {command:<56}", style="bold bright_blue")
        quick_start.append(f"{comment}\n", style="dim white")
    return quick_start


def exit_with_error(message: str, code: int) -> NoReturn:
    """Print the error line and leave with ``code``."""
    logger.debug("exit %d: %s", code, message)
    console.print(f"[bold red]Error:[/bold red] {message}")
    raise typer.Exit(code=code)


EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_ANALYSIS = 4


@contextmanager
def cli_errors() -> Iterator[None]:
    """Map the package exceptions onto the command exit codes."""
    try:
        yield
    except ConfigError as exc:
        exit_with_error(str(exc), EXIT_CONFIG)
    except DataError as exc:
        exit_with_error(str(exc), EXIT_DATA)
    except (AnalysisError, EstimationError) as exc:
        exit_with_error(str(exc), EXIT_ANALYSIS)
