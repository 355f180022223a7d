"""Validation and CSV helpers for observational tables.

Tables are plain :class:`pandas.DataFrame` objects with unique string column
names and finite float values; :func:`check_table` enforces that contract the
way ``sklearn.utils.check_array`` does for arrays.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path

import numpy as np
import pandas as pd

__all__ = ["check_table", "check_columns", "read_csv", "write_csv", "EmptyTableError"]


class EmptyTableError(ValueError):
    pass


def check_table(data, min_rows: int = 0, min_cols: int = 0) -> pd.DataFrame:
    """Validate ``data`` and return it as a float ``DataFrame``.

    Accepts a DataFrame or a mapping of column name to sequence.  Raises
    ``ValueError`` for duplicate names, non-numeric or non-finite values.
    """
    if isinstance(data, pd.DataFrame):
        df = data
    elif isinstance(data, dict):
        df = pd.DataFrame(data)
    else:
        raise TypeError(f"expected a DataFrame or dict of columns, got {type(data).__name__}")
    names = [str(c) for c in df.columns]
    if len(set(names)) != len(names):
        dupes = sorted({c for c in names if names.count(c) > 1})
        raise ValueError(f"duplicate column names: {dupes}")
    try:
        values = df.to_numpy(dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"non-numeric column in table: {exc}") from None
    if values.size and not np.isfinite(values).all():
        bad = [n for n, ok in zip(names, np.isfinite(values).all(axis=0)) if not ok]
        raise ValueError(f"non-finite values in columns {bad}")
    if len(df) < min_rows:
        raise ValueError(f"need at least {min_rows} rows, got {len(df)}")
    if len(names) < min_cols:
        raise ValueError(f"need at least {min_cols} columns, got {len(names)}")
    out = pd.DataFrame(values, columns=names, index=pd.RangeIndex(len(df)))
    return out


def check_columns(df: pd.DataFrame, *names) -> None:
    missing = [n for n in names if n not in df.columns]
    if missing:
        raise KeyError(f"columns not in table: {missing}")


def read_csv(path, required=None) -> pd.DataFrame:
    """Read a header-first numeric CSV, reporting bad rows by line number."""
    text = Path(path).read_text(encoding="utf-8")
    return parse_csv_text(text, required=required, source=str(path))


def parse_csv_text(text: str, required=None, source="<csv>") -> pd.DataFrame:
    rows = list(csv.reader(io.StringIO(text)))
    rows = [(i + 1, r) for i, r in enumerate(rows) if r and any(c.strip() for c in r)]
    if not rows:
        raise EmptyTableError(f"{source}: empty file")
    header = [h.strip() for h in rows[0][1]]
    if required is not None and header != list(required):
        raise ValueError(f"{source}: expected header {','.join(required)}, found {','.join(header)}")
    values = []
    for lineno, row in rows[1:]:
        if len(row) != len(header):
            raise ValueError(f"{source}:{lineno}: expected {len(header)} fields, found {len(row)}")
        try:
            values.append([float(c) for c in row])
        except ValueError:
            raise ValueError(f"{source}:{lineno}: malformed number in {row}") from None
    if not values:
        raise EmptyTableError(f"{source}: no data rows")
    return check_table(pd.DataFrame(values, columns=header))


def write_csv(df: pd.DataFrame, path=None) -> str:
    """Serialize with ``repr``-exact floats; returns the text and writes it if ``path`` given."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(df.columns)
    for row in df.itertuples(index=False):
        w.writerow([_fmt(v) for v in row])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def _fmt(v) -> str:
    v = float(v)
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)
