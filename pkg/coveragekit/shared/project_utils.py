from __future__ import annotations

from pathlib import Path

ANALYSIS_MARKERS = ("summary.json", "distortion_records.csv")


def is_analysis_dir(path: Path) -> bool:
    """Return True if the directory holds the outputs of an ``analyze`` run."""
    path = Path(path)
    return path.is_dir() and all((path / name).is_file() for name in ANALYSIS_MARKERS)
