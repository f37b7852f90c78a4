"""
CSV input/output for the command line.

Dialect: comma separator, '.' decimal point, optional single header row,
detected by a non-numeric cell in the first non-empty row.
"""

import csv
import logging
from typing import List, Optional, Sequence, TextIO, Tuple

import numpy as np

logger = logging.getLogger("cli")


class CsvParseError(ValueError):
    """Raised for malformed numeric CSV; names the 1-based row and column."""

    def __init__(self, message: str, row: int, col: Optional[int] = None):
        where = f"row {row}" + (f", column {col}" if col is not None else "")
        super().__init__(f"{where}: {message}")
        self.row = row
        self.col = col


def _is_number(cell: str) -> bool:
    try:
        float(cell)
        return True
    except ValueError:
        return False


def parse_matrix(lines: TextIO) -> Tuple[np.ndarray, Optional[List[str]]]:
    """Parse an n x p numeric table; returns (data, header or None)."""
    header = None
    rows: List[List[float]] = []
    width = None
    for lineno, cells in enumerate(csv.reader(lines), start=1):
        cells = [c.strip() for c in cells]
        if not cells or all(c == "" for c in cells):
            continue
        if header is None and not rows and not all(_is_number(c) for c in cells):
            header = cells
            width = len(cells)
            continue
        if width is None:
            width = len(cells)
        if len(cells) != width:
            raise CsvParseError(f"expected {width} columns, found {len(cells)}", lineno)
        values = []
        for col, cell in enumerate(cells, start=1):
            try:
                v = float(cell)
            except ValueError:
                raise CsvParseError(f"non-numeric value {cell!r}", lineno, col) from None
            if not np.isfinite(v):
                raise CsvParseError(f"non-finite value {cell!r}", lineno, col)
            values.append(v)
        rows.append(values)
    if not rows:
        raise CsvParseError("no numeric rows", 1)
    return np.array(rows, dtype=float), header


def read_matrix(path: str) -> Tuple[np.ndarray, Optional[List[str]]]:
    try:
        with open(path, "r", newline="") as f:
            data, header = parse_matrix(f)
    except OSError as e:
        raise CsvParseError(f"cannot read {path}: {e}", 0) from e
    logger.debug("Read %d x %d matrix from %s", data.shape[0], data.shape[1], path)
    return data, header


def fmt(value: float) -> str:
    """Shortest text that parses back to the same float."""
    return repr(float(value))


def write_matrix(path: str, data, header: Optional[Sequence[str]] = None) -> None:
    arr = np.asarray(data, dtype=float)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        if header:
            writer.writerow(list(header))
        for row in arr:
            writer.writerow([fmt(v) for v in row])


def read_sections(text: str) -> List[List[dict]]:
    """Split blank-line separated CSV sections into lists of row dicts."""
    sections = []
    for block in text.strip().split("\n\n"):
        lines = [ln for ln in block.splitlines() if ln.strip()]
        if lines:
            sections.append(list(csv.DictReader(lines)))
    return sections
