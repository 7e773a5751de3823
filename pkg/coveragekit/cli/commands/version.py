import platform
import sys
from importlib import metadata

from coveragekit import __version__
from coveragekit.shared.ui import console

NUMERICAL_STACK = ("numpy", "scipy", "pandas")


def _installed(package: str) -> str:
    try:
        return metadata.version(package)
    except metadata.PackageNotFoundError:
        return "not installed"


def version():
    """
    📋 Show coveragekit version and system information.

    Displays the package version, the Python runtime and the numerical
    libraries the estimators run on.
    """
    console.print()
    console.print(
        f"[bold bright_cyan]coveragekit[/bold bright_cyan] [bright_green]v{__version__}[/bright_green]")
    console.print()

    console.print("[bold bright_cyan]System Information:[/bold bright_cyan]")
    console.print(f"  Python:       {sys.version.split()[0]}")
    console.print(f"  Platform:     {platform.system()}")
    console.print(f"  Architecture: {platform.machine()}")
    console.print()

    console.print("[bold bright_cyan]Numerical Stack:[/bold bright_cyan]")
    for package in NUMERICAL_STACK:
        console.print(f"  {package + ':':<13} {_installed(package)}")
    console.print()
