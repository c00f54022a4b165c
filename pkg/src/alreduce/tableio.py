"""CSV emission helpers shared by the study modules and the CLI.

All floating-point fields are printed with 17 significant digits so that
re-running a study produces byte-identical, diffable output.
"""

from __future__ import annotations

__all__ = ["format_float", "write_csv"]


def format_float(x) -> str:
    return format(float(x), ".17g")


def format_cell(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, int):
        return str(x)
    return format_float(x)


def write_csv(header, rows, fh) -> None:
    """Write a header line and iterable of row tuples with LF endings."""
    fh.write(",".join(header) + "\n")
    for row in rows:
        fh.write(",".join(format_cell(cell) for cell in row) + "\n")
