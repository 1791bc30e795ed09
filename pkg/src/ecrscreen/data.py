"""The response-plus-covariates data container and CSV ingestion."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, DomainError


class CsvFormatError(DomainError):
    """A cell that does not parse as a finite real, with its location."""

    def __init__(self, path, line: int, column: int, message: str):
        self.path, self.line, self.column = str(path), line, column
        super().__init__(f"{path}:{line}: column {column}: {message}")


@dataclass(frozen=True, eq=False)
class DataMatrix:
    """n observations of (response, covariate 1, ..., covariate p).

    Column 0 of ``values`` is the response.  ``labels`` has length p + 1.
    """

    values: np.ndarray
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[1] < 2:
            raise DomainError(f"need an n x (1 + p) matrix with p >= 1, got shape {v.shape}")
        labels = tuple(self.labels) or ("Y",) + tuple(f"X{j}" for j in range(1, v.shape[1]))
        if len(labels) != v.shape[1]:
            raise DomainError(f"{len(labels)} labels for {v.shape[1]} columns")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_arrays(cls, y, X, labels=None) -> "DataMatrix":
        X = np.asarray(X, dtype=float)
        return cls(np.column_stack([np.asarray(y, dtype=float), X]), tuple(labels or ()))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1] - 1

    @property
    def y(self) -> np.ndarray:
        return self.values[:, 0]

    @property
    def X(self) -> np.ndarray:
        return self.values[:, 1:]

    @property
    def covariate_labels(self) -> tuple[str, ...]:
        return self.labels[1:]

    def restrict(self, covariates) -> "DataMatrix":
        """Keep the response and the listed covariates (1-based, in the given order)."""
        cols = [0] + [int(c) for c in covariates]
        return DataMatrix(self.values[:, cols], tuple(self.labels[c] for c in cols))

    def take_rows(self, rows) -> "DataMatrix":
        return DataMatrix(self.values[rows], self.labels)


def read_csv(path, response=0, delimiter: str = ",", header: bool = True) -> DataMatrix:
    """Load a numeric CSV and move the response column to the front.

    ``response`` is a column name (requires a header) or a 0-based position.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh, delimiter=delimiter))
    rows = [r for r in rows if r]
    if header:
        if not rows:
            raise CsvFormatError(path, 1, 0, "empty file")
        names = [c.strip() for c in rows[0]]
        body, first_line = rows[1:], 2
    else:
        names = [f"col{j}" for j in range(len(rows[0]))] if rows else []
        body, first_line = rows, 1
    width = len(names)
    values = np.empty((len(body), width))
    for r, row in enumerate(body):
        line = first_line + r
        if len(row) != width:
            raise CsvFormatError(path, line, len(row), f"expected {width} fields, found {len(row)}")
        for c, cell in enumerate(row):
            try:
                x = float(cell)
            except ValueError:
                raise CsvFormatError(path, line, c, f"cannot parse {cell!r} as a number") from None
            if not math.isfinite(x):
                raise CsvFormatError(path, line, c, f"non-finite value {cell!r}")
            values[r, c] = x
    if values.shape[0] < 2:
        raise DomainError(f"{path}: need at least 2 data rows, found {values.shape[0]}")

    if isinstance(response, str) and not response.lstrip("-").isdigit():
        matches = [j for j, name in enumerate(names) if name == response]
        if not header or not matches:
            raise ConfigurationError(f"response column {response!r} not found in {path}")
        if len(matches) > 1:
            raise ConfigurationError(f"response column {response!r} is not unique in {path}")
        ridx = matches[0]
    else:
        ridx = int(response)
        if not 0 <= ridx < width:
            raise ConfigurationError(f"response column position {ridx} out of range for {width} columns in {path}")
    if width < 2:
        raise DomainError(f"{path}: need a response and at least one covariate")
    order = [ridx] + [j for j in range(width) if j != ridx]
    return DataMatrix(values[:, order], tuple(names[j] for j in order))


def write_csv(data: DataMatrix, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(data.labels)
        for row in data.values:
            w.writerow([repr(float(x)) for x in row])
