"""Utility functions for dauto."""

from dauto.utils.helpers import (
    OutputPathError,
    ensure_dir,
    format_float,
    safe_filename,
    validate_output_path,
)

__all__ = [
    "OutputPathError",
    "ensure_dir",
    "format_float",
    "safe_filename",
    "validate_output_path",
]
