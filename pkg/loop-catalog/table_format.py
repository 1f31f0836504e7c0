"""Plain-text Cayley table format.

    # optional comment lines
    order 3
    0 1 2
    1 2 0
    2 0 1

Element 0 is the identity. Writing then reading a table gives back the same bytes.
"""

from pathlib import Path
from typing import List, Union

import numpy as np

from errors import TableParseError


def format_table(table: np.ndarray) -> str:
    """Render a square index table in the text format."""
    arr = np.asarray(table)
    lines = [f"order {arr.shape[0]}"]
    lines.extend(" ".join(str(int(v)) for v in row) for row in arr)
    return "\n".join(lines) + "\n"


def parse_table(text: str) -> np.ndarray:
    """
    Parse the text format into an int32 array.

    Only the syntax is checked here; loop axioms are the job of build_loop().
    Raises TableParseError with the 1-based line number of the problem.
    """
    order = None
    rows: List[List[int]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith('#'):
            continue

        if order is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] != 'order':
                raise TableParseError("expected header 'order n'", line=lineno)
            try:
                order = int(parts[1])
            except ValueError:
                raise TableParseError(f"order is not an integer: {parts[1]!r}", line=lineno)
            if order < 1:
                raise TableParseError(f"order must be positive, got {order}", line=lineno)
            continue

        if len(rows) == order:
            raise TableParseError(f"more than {order} rows", line=lineno)
        try:
            row = [int(tok) for tok in line.split()]
        except ValueError:
            raise TableParseError("row contains a non-integer entry", line=lineno)
        if len(row) != order:
            raise TableParseError(f"expected {order} entries, got {len(row)}", line=lineno)
        bad = [v for v in row if v < 0 or v >= order]
        if bad:
            raise TableParseError(f"entry {bad[0]} outside 0..{order - 1}", line=lineno)
        rows.append(row)

    if order is None:
        raise TableParseError("empty table file")
    if len(rows) != order:
        raise TableParseError(f"expected {order} rows, got {len(rows)}")

    return np.array(rows, dtype=np.int32)


def read_table(path: Union[str, Path]) -> np.ndarray:
    with open(path, 'r') as f:
        return parse_table(f.read())


def write_table(path: Union[str, Path], table: np.ndarray) -> None:
    with open(path, 'w') as f:
        f.write(format_table(table))
