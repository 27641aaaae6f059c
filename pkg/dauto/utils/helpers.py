"""Utility functions for dauto."""

from pathlib import Path

from loguru import logger


class OutputPathError(ValueError):
    """Raised when a write would land outside the configured output directory."""
    pass


def ensure_dir(path: Path) -> Path:
    """Ensure a directory exists, creating it if necessary."""
    path.mkdir(parents=True, exist_ok=True)
    return path


def safe_filename(name: str) -> str:
    """Convert a string to a safe filename."""
    unsafe = '<>:"/\\|?* '
    for char in unsafe:
        name = name.replace(char, "_")
    return name.strip()


def format_float(value: float) -> str:
    """Six significant digits, the format of every CSV number."""
    return f"{value:.6g}"


def validate_output_path(path: str | Path, outdir: Path) -> Path:
    """
    Resolve a path for writing, ensuring it stays within the output directory.

    Args:
        path: Absolute, or relative to `outdir`; may contain ~ and ..
        outdir: The configured output root.

    Returns:
        Resolved absolute path.

    Raises:
        OutputPathError: Empty path, null byte, or a path escaping `outdir`.
    """
    path_str = str(path)
    if not path_str.strip():
        raise OutputPathError("Empty output path is not allowed")
    if "\x00" in path_str:
        raise OutputPathError("Invalid characters in output path")

    root = Path(outdir).expanduser().resolve()
    candidate = Path(path_str).expanduser()
    if not candidate.is_absolute():
        candidate = root / candidate
    resolved = candidate.resolve()
    try:
        resolved.relative_to(root)
    except ValueError:
        logger.warning(f"Blocked write outside output dir: path={path_str!r} outdir={root}")
        raise OutputPathError(f"{resolved} is outside the output directory {root}") from None
    return resolved
