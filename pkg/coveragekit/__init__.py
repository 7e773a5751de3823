"""coveragekit: listing coverage as a first-class property of financial panel data."""

__version__ = "0.1.0"
