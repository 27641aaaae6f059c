"""CSV and TSV writers for reports, embeddings and p-value matrices.

Every file is comma (or tab) separated with a header row, LF line endings and
floats printed with six significant digits.
"""

from __future__ import annotations

import csv
from collections.abc import Iterable, Sequence
from pathlib import Path

import numpy as np

from dauto.eval.pca import PcaProjection
from dauto.utils import ensure_dir, format_float

Cell = str | int | float | None


def _render(value: Cell) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(float(value))
    return str(value)


def write_table(
    path: Path, header: Sequence[str], rows: Iterable[Sequence[Cell]], delimiter: str = ","
) -> Path:
    """Write a header plus rows; returns the path written."""
    ensure_dir(path.parent)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, delimiter=delimiter, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_render(v) for v in row])
    return path


def write_embedding_tsv(path: Path, projection: PcaProjection) -> Path:
    """Rows "x<TAB>y<TAB>domain"; the domain column is empty when no tags were given."""
    tags = projection.domain_tags
    rows = (
        (float(x), float(y), None if tags is None else int(tags[i]))
        for i, (x, y) in enumerate(projection.coords)
    )
    return write_table(path, ("x", "y", "domain"), rows, delimiter="\t")


def write_pvalue_csv(path: Path, methods: Sequence[str], pvalues: np.ndarray) -> Path:
    """Methods label both the header row and the first column; the diagonal reads "-"."""
    rows = []
    for i, name in enumerate(methods):
        cells: list[Cell] = [name]
        for j in range(len(methods)):
            cells.append("-" if i == j else float(pvalues[i, j]))
        rows.append(cells)
    return write_table(path, ("method", *methods), rows)


def read_table(path: Path, delimiter: str = ",") -> tuple[list[str], list[list[str]]]:
    """Header and raw string rows of a file written by `write_table`."""
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.reader(f, delimiter=delimiter)
        header = next(reader)
        return header, [row for row in reader]
