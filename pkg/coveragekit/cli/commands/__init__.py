"""coveragekit.cli.commands

This package contains one module per coveragekit subcommand.
"""
