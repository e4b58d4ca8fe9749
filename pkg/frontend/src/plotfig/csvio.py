"""Comment-aware CSV reading with schema checks.

The upstream CSVs carry `#`-prefixed comment headers (scenario hash, seed,
sweep gap notes) above a single header row; data cells are numeric except
for labeled columns like `method` and `stability`.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import SchemaError


@dataclass(frozen=True)
class Table:
    path: str
    header: list
    rows: list
    comments: list

    def require(self, *names):
        for name in names:
            if name not in self.header:
                raise SchemaError(f"{self.path}: missing column {name!r}")

    def column(self, name, numeric=True):
        self.require(name)
        i = self.header.index(name)
        values = [row[i] for row in self.rows]
        return np.array(values, dtype=float) if numeric else values

    def numbered_columns(self, prefix):
        """All columns named `<prefix>1..<prefix>k`, as an (n_rows, k) array."""
        names = []
        k = 1
        while f"{prefix}{k}" in self.header:
            names.append(f"{prefix}{k}")
            k += 1
        if not names:
            raise SchemaError(f"{self.path}: missing column {prefix!r}1")
        return np.column_stack([self.column(name) for name in names])


def read_table(path) -> Table:
    comments, header, rows = [], None, []
    with open(path, newline="") as fh:
        for record in csv.reader(line for line in fh):
            if not record:
                continue
            if record[0].startswith("#"):
                comments.append(",".join(record).lstrip("# "))
                continue
            if header is None:
                header = record
            else:
                rows.append(record)
    if header is None:
        raise SchemaError(f"{path}: no header row found")
    return Table(str(path), header, rows, comments)
