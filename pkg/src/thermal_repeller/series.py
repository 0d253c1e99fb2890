"""Tabular output records and their CSV form.

Files start with ``#`` metadata lines, then one row of column names, then
comma-separated values formatted to 12 significant digits in scientific
notation. Nothing time- or host-dependent is written, so identical inputs
give byte-identical files.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, NumericalError

__all__ = ["TimeSeries", "format_value", "read_csv"]

FLOAT_FORMAT = "{:.11e}"


def format_value(value) -> str:
    """Metadata value as text: floats with :data:`FLOAT_FORMAT` style precision."""
    if isinstance(value, bool) or value is None:
        return str(value)
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (list, tuple)):
        return " ".join(format_value(v) for v in value)
    return str(value)


@dataclass(frozen=True)
class TimeSeries:
    """Rows of (abscissa, values...) with ordered metadata.

    Attributes
    ----------
    columns : column names; the first is the abscissa.
    rows : array of shape (n_rows, len(columns)).
    metadata : ordered (key, value) pairs written as ``# key: value``.
    """

    columns: tuple
    rows: np.ndarray
    metadata: tuple = field(default=())

    def __post_init__(self):
        rows = np.atleast_2d(np.asarray(self.rows, dtype=float))
        if rows.shape[1] != len(self.columns):
            raise ConfigError(f"{rows.shape[1]} values per row but {len(self.columns)} columns")
        if rows.shape[0] > 1 and np.any(np.diff(rows[:, 0]) <= 0):
            raise ConfigError(f"abscissa {self.columns[0]!r} must be strictly increasing")
        if not np.all(np.isfinite(rows)):
            raise NumericalError("refusing to write non-finite values")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "metadata", tuple(self.metadata))

    @classmethod
    def from_columns(cls, columns: dict, metadata=()) -> "TimeSeries":
        names = tuple(columns)
        return cls(names, np.column_stack([np.asarray(columns[k], float) for k in names]),
                   tuple(metadata))

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, self.columns.index(name)]

    def to_csv_text(self) -> str:
        out = io.StringIO()
        for key, value in self.metadata:
            out.write(f"# {key}: {format_value(value)}\n")
        out.write(",".join(self.columns) + "\n")
        for row in self.rows:
            out.write(",".join(FLOAT_FORMAT.format(v) for v in row) + "\n")
        return out.getvalue()

    def write(self, path: str | os.PathLike) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_csv_text())


def read_csv(path: str | os.PathLike) -> TimeSeries:
    """Parse a file written by :meth:`TimeSeries.write`."""
    metadata = []
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    body = []
    for line in lines:
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition(":")
            metadata.append((key.strip(), value.strip()))
        elif line:
            body.append(line)
    columns = tuple(body[0].split(","))
    rows = np.array([[float(v) for v in line.split(",")] for line in body[1:]])
    return TimeSeries(columns, rows.reshape(-1, len(columns)), tuple(metadata))
