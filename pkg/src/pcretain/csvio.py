"""CSV ingestion and serialization.

Reals are written with 12 significant digits and integers as integers,
so every file re-parses to the values that produced it.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .covest import DataMatrix

log = logging.getLogger(__name__)

ROWS_ARE_OBSERVATIONS = "observations"
ROWS_ARE_VARIABLES = "variables"
ORIENTATIONS = (ROWS_ARE_OBSERVATIONS, ROWS_ARE_VARIABLES)


class DataFileError(ValueError):
    """Malformed or unusable input file."""


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if v != v:
            return "nan"
        if v in (float("inf"), float("-inf")):
            return "inf" if v > 0 else "-inf"
        return format(v, ".12g")
    if value is None:
        return ""
    return str(value)


def write_rows(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def read_rows(path: Path) -> tuple[list[str], list[list[str]]]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise DataFileError(f"{path}: empty file")
    return [c.strip() for c in rows[0]], [[c.strip() for c in r] for r in rows[1:]]


@dataclass(frozen=True)
class DatasetFile:
    path: Path
    orientation: str
    header: bool
    data: DataMatrix

    @property
    def n(self) -> int:
        return self.data.n

    @property
    def p(self) -> int:
        return self.data.p


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def read_dataset(path, orientation: str = ROWS_ARE_OBSERVATIONS, header: bool = True,
                 row_labels: bool | None = None) -> DatasetFile:
    """Parse a numeric CSV table.

    ``row_labels=None`` treats the first column as labels when none of its
    data cells parse as numbers. With ``orientation="variables"`` the table
    is transposed so rows become observations.
    """
    if orientation not in ORIENTATIONS:
        raise DataFileError(f"orientation must be one of {ORIENTATIONS}, got {orientation!r}")
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8-sig") as fh:
            raw = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    except OSError as exc:
        raise DataFileError(f"{path}: {exc.strerror or exc}") from exc
    if not raw:
        raise DataFileError(f"{path}: empty file")
    names = None
    first_line = 1
    if header:
        names = [c.strip() for c in raw[0]]
        raw = raw[1:]
        first_line = 2
    if not raw:
        raise DataFileError(f"{path}: empty data (header only)")
    width = len(raw[0])
    for i, row in enumerate(raw):
        if len(row) != width:
            raise DataFileError(f"{path}: ragged row at line {i + first_line}: "
                                f"{len(row)} fields, expected {width}")
    if row_labels is None:
        row_labels = width > 1 and not any(_is_number(r[0]) for r in raw)
    start = 1 if row_labels else 0
    if width - start < 1:
        raise DataFileError(f"{path}: no numeric columns")
    values = np.empty((len(raw), width - start))
    for i, row in enumerate(raw):
        for j in range(start, width):
            cell = row[j].strip()
            try:
                values[i, j - start] = float(cell)
            except ValueError:
                raise DataFileError(f"{path}: non-numeric cell {cell!r} at line {i + first_line}, "
                                    f"column {j + 1}") from None
    if not np.all(np.isfinite(values)):
        i, j = np.argwhere(~np.isfinite(values))[0]
        raise DataFileError(f"{path}: non-finite value at line {i + first_line}, column {j + start + 1}")
    if orientation == ROWS_ARE_VARIABLES:
        labels = [r[0].strip() for r in raw] if row_labels else None
        values = values.T
    else:
        labels = names[start:] if names is not None else None
    data = DataMatrix(values, labels)
    if data.constant_columns:
        log.warning("%s: constant columns %s", path, [c + 1 for c in data.constant_columns])
    log.info("%s: n=%d observations, p=%d variables", path, data.n, data.p)
    return DatasetFile(path, orientation, header, data)


def ingest_csv(path, orientation: str = ROWS_ARE_OBSERVATIONS, header: bool = True,
               row_labels: bool | None = None) -> DataMatrix:
    return read_dataset(path, orientation, header, row_labels).data


def write_matrix(path, data: DataMatrix, row_prefix: str | None = None) -> Path:
    labels = data.labels or tuple(f"V{j + 1}" for j in range(data.p))
    header = ([row_prefix] if row_prefix else []) + list(labels)
    rows = []
    for i, row in enumerate(data.values):
        rows.append(([f"{row_prefix}{i + 1}"] if row_prefix else []) + list(row))
    return write_rows(path, header, rows)


def groups_from_rows(header: Sequence[str], rows: Sequence[Sequence[str]],
                     columns: Sequence[str] | None = None, source="input") -> dict[str, list[float]]:
    """Columns of a parsed table as named groups; blank cells end a shorter group."""
    header = list(header)
    wanted = list(columns) if columns else header
    missing = [c for c in wanted if c not in header]
    if missing:
        raise DataFileError(f"{source}: missing columns {missing}; available {header}")
    groups: dict[str, list[float]] = {c: [] for c in wanted}
    for lineno, row in enumerate(rows, start=2):
        if len(row) != len(header):
            raise DataFileError(f"{source}: ragged row at line {lineno}")
        for c in wanted:
            j = header.index(c)
            cell = row[j]
            if cell == "":
                continue
            try:
                groups[c].append(float(cell))
            except ValueError:
                raise DataFileError(f"{source}: non-numeric cell {cell!r} at line {lineno}, "
                                    f"column {j + 1}") from None
    return groups


def read_groups(path, columns: Sequence[str] | None = None) -> dict[str, list[float]]:
    header, rows = read_rows(path)
    return groups_from_rows(header, rows, columns, path)


def write_groups(path, groups: dict[str, Sequence[float]]) -> Path:
    names = list(groups)
    depth = max(len(g) for g in groups.values())
    rows = [[groups[c][i] if i < len(groups[c]) else None for c in names] for i in range(depth)]
    return write_rows(path, names, rows)
