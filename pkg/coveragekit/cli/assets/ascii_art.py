"""
ASCII Art assets for the coveragekit CLI
"""

from rich.text import Text


def get_coveragekit_logo():
    """
    Returns the coveragekit wordmark in blue

    Returns:
        Text: Rich Text object containing the styled ASCII art
    """
    return Text.from_markup(
        "[bold blue] ██████╗ ██████╗ ██╗   ██╗███████╗██████╗  █████╗  ██████╗ ███████╗[/bold blue]\n"
        "[bold blue]██╔════╝██╔═══██╗██║   ██║██╔════╝██╔══██╗██╔══██╗██╔════╝ ██╔════╝[/bold blue]\n"
        "[bold blue]██║     ██║   ██║██║   ██║█████╗  ██████╔╝███████║██║  ███╗█████╗  [/bold blue]\n"
        "[bold blue]██║     ██║   ██║╚██╗ ██╔╝██╔══╝  ██╔══██╗██╔══██║██║   ██║██╔══╝  [/bold blue]\n"
        "[bold blue]╚██████╗╚██████╔╝ ╚████╔╝ ███████╗██║  ██║██║  ██║╚██████╔╝███████╗[/bold blue]\n"
        "[bold blue] ╚═════╝ ╚═════╝   ╚═══╝  ╚══════╝╚═╝  ╚═╝╚═╝  ╚═╝ ╚═════╝ ╚══════╝[/bold blue]"
    )