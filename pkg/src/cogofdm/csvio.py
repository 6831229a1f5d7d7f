"""CSV output helpers shared by the CLI and the sweep exports.

Conventions for every CSV this package emits: UTF-8, LF line endings,
'.' as decimal separator, scientific notation for nonzero values with
magnitude below 1e-3.
"""

from __future__ import annotations

import math
from typing import IO, Iterable, Sequence

import numpy as np


def format_value(value) -> str:
    """Render one CSV cell according to the package-wide number format."""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    x = float(value)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0.0:
        return "0"
    if abs(x) < 1e-3:
        return f"{x:.12e}"
    return f"{x:.12g}"


def write_csv(stream: IO[str], header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Write header plus rows to an open text stream with LF endings."""
    stream.write(",".join(header) + "\n")
    for row in rows:
        stream.write(",".join(format_value(cell) for cell in row) + "\n")


def write_csv_path(path: str, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        write_csv(fh, header, rows)
