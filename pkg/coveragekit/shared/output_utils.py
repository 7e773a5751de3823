"""Output directory helpers and template rendering."""

from pathlib import Path
from typing import Iterable

from jinja2 import Environment, FileSystemLoader, StrictUndefined


_templates_dir = Path(__file__).resolve().parent.parent / "core" / "templates"
template_env = Environment(loader=FileSystemLoader(_templates_dir), trim_blocks=True,
                           lstrip_blocks=True, keep_trailing_newline=True,
                           undefined=StrictUndefined)


def ensure_dir(path: Path) -> Path:
    """Create directory if it doesn't exist."""
    path.mkdir(parents=True, exist_ok=True)
    return path


def clean_outputs(out_dir: Path, names: Iterable[str], patterns: Iterable[str] = ()) -> None:
    """Remove result files a previous run left behind."""
    if not out_dir.exists():
        return
    for name in names:
        target = out_dir / name
        if target.is_file():
            target.unlink()
    for pattern in patterns:
        for target in out_dir.glob(pattern):
            if target.is_file():
                target.unlink()


def render_and_write(template_name: str, dest_path: Path, context: dict,
                     env: Environment = template_env) -> Path:
    """Render template and write to destination file."""
    content = env.get_template(template_name).render(context)
    ensure_dir(dest_path.parent)
    dest_path.write_text(content, encoding="utf-8")
    return dest_path
