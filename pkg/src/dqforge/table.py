"""Tabular data model, CSV input/output, column kinds and column profiles.

Cells are plain Python objects:

* ``None``  -> missing
* ``float`` -> number (always finite)
* ``str``   -> text

A :class:`Table` stores its data column-wise and carries a stable row id per
record, so rows can be dropped or cells rewritten without losing track of
where a value came from.
"""

from __future__ import annotations

import csv
import enum
import io
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, BinaryIO, Iterable, Mapping, Sequence

import numpy as np

Cell = Any  # None | float | str

DEFAULT_MISSING_TOKENS = ("", "NA", "NaN", "null")

_NUMBER_RE = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")
_DIGIT_RE = re.compile(r"\d")


class TableError(ValueError):
    """Raised for malformed input or an invalid table construction."""


@dataclass(frozen=True)
class CsvDialect:
    delimiter: str = ","
    quotechar: str = '"'
    encoding: str = "utf-8"
    missing_tokens: tuple[str, ...] = DEFAULT_MISSING_TOKENS

    def missing_set(self) -> frozenset[str]:
        return frozenset(t.casefold() for t in self.missing_tokens)


def parse_cell(token: str, missing: frozenset[str] | None = None) -> Cell:
    """Turn one raw CSV field into a cell value."""
    if missing is None:
        missing = CsvDialect().missing_set()
    stripped = token.strip()
    if stripped.casefold() in missing:
        return None
    if _NUMBER_RE.match(stripped):
        value = float(stripped)
        if math.isfinite(value):
            return value
    return token


def format_cell(value: Cell) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if value.is_integer() and abs(value) < 1e16:
            return str(int(value))
        return repr(value)
    return value


def _normalize(value: Cell) -> Cell:
    if value is None or isinstance(value, str):
        return value
    if isinstance(value, bool):
        raise TableError("boolean cells are not supported")
    if isinstance(value, (int, float, np.integer, np.floating)):
        v = float(value)
        if not math.isfinite(v):
            # NaN is the common in-memory spelling of "missing"
            if math.isnan(v):
                return None
            raise TableError(f"non-finite number {value!r}")
        return v
    raise TableError(f"unsupported cell type {type(value).__name__}")


class Table:
    """Column-oriented collection of records with stable row ids.

    Tables are treated as immutable by the pipeline: every correcting
    operation returns a new table that shares untouched columns.
    """

    __slots__ = ("_attrs", "_cols", "_row_ids", "_index")

    def __init__(
        self,
        columns: Mapping[str, Sequence[Cell]],
        row_ids: Sequence[int] | None = None,
        *,
        _trusted: bool = False,
    ):
        attrs = list(columns)
        if len(set(attrs)) != len(attrs):
            raise TableError("attribute names must be unique")
        cols = {}
        n = None
        for a in attrs:
            col = list(columns[a]) if _trusted else [_normalize(v) for v in columns[a]]
            if n is None:
                n = len(col)
            elif len(col) != n:
                raise TableError(
                    f"column {a!r} has {len(col)} cells, expected {n}")
            cols[a] = col
        n = n or 0
        if row_ids is None:
            row_ids = list(range(n))
        else:
            row_ids = [int(r) for r in row_ids]
            if len(row_ids) != n:
                raise TableError("row id count does not match row count")
            if len(set(row_ids)) != n:
                raise TableError("row ids must be unique")
        self._attrs = attrs
        self._cols = cols
        self._row_ids = row_ids
        self._index = None

    @classmethod
    def from_rows(cls, attributes: Sequence[str], rows: Iterable[Sequence[Cell]],
                  row_ids: Sequence[int] | None = None) -> "Table":
        rows = [list(r) for r in rows]
        m = len(attributes)
        for i, r in enumerate(rows):
            if len(r) != m:
                raise TableError(f"row {i} has {len(r)} cells, expected {m}")
        cols = {a: [r[j] for r in rows] for j, a in enumerate(attributes)}
        return cls(cols, row_ids)

    @property
    def attributes(self) -> list[str]:
        return list(self._attrs)

    @property
    def row_ids(self) -> list[int]:
        return list(self._row_ids)

    @property
    def n_rows(self) -> int:
        return len(self._row_ids)

    @property
    def n_cols(self) -> int:
        return len(self._attrs)

    def __len__(self) -> int:
        return self.n_rows

    def column(self, attr: str) -> list[Cell]:
        """The column's cells. The returned list must not be mutated."""
        try:
            return self._cols[attr]
        except KeyError:
            raise KeyError(f"unknown attribute {attr!r}") from None

    def row(self, i: int) -> tuple[Cell, ...]:
        return tuple(self._cols[a][i] for a in self._attrs)

    def rows(self) -> list[tuple[Cell, ...]]:
        return list(zip(*(self._cols[a] for a in self._attrs))) if self._attrs else [()] * self.n_rows

    def position_of(self, row_id: int) -> int:
        if self._index is None:
            self._index = {r: i for i, r in enumerate(self._row_ids)}
        return self._index[row_id]

    def take(self, positions: Sequence[int]) -> "Table":
        """Sub-table with the given row positions, keeping their row ids."""
        positions = list(positions)
        cols = {a: [c[i] for i in positions] for a, c in self._cols.items()}
        return Table(cols, [self._row_ids[i] for i in positions], _trusted=True)

    def with_column(self, attr: str, values: Sequence[Cell]) -> "Table":
        if attr not in self._cols:
            raise KeyError(f"unknown attribute {attr!r}")
        if len(values) != self.n_rows:
            raise TableError("replacement column has the wrong length")
        cols = dict(self._cols)
        cols[attr] = [_normalize(v) for v in values]
        return Table(cols, self._row_ids, _trusted=True)

    def with_cells(self, updates: Mapping[tuple[int, str], Cell]) -> "Table":
        """Copy of the table with ``{(position, attr): value}`` rewritten."""
        cols = dict(self._cols)
        touched: dict[str, list] = {}
        for (pos, attr), value in updates.items():
            if attr not in touched:
                touched[attr] = list(cols[attr])
            touched[attr][pos] = _normalize(value)
        cols.update(touched)
        return Table(cols, self._row_ids, _trusted=True)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Table):
            return NotImplemented
        return (self._attrs == other._attrs and self._row_ids == other._row_ids
                and self._cols == other._cols)

    def __repr__(self) -> str:
        return f"Table({self.n_rows} rows x {self.n_cols} columns)"


# -- CSV ----------------------------------------------------------------------

def load_table(source: BinaryIO | bytes | str, dialect: CsvDialect = CsvDialect()) -> Table:
    """Parse CSV with a mandatory header row.

    ``source`` may be a binary stream, raw bytes, or a filesystem path.
    """
    if isinstance(source, str):
        with open(source, "rb") as fh:
            data = fh.read()
    elif isinstance(source, (bytes, bytearray)):
        data = bytes(source)
    else:
        data = source.read()
    try:
        text = data.decode(dialect.encoding)
    except UnicodeDecodeError as exc:
        raise TableError(f"input is not valid {dialect.encoding}: {exc}") from None
    if text.startswith("﻿"):
        text = text[1:]

    reader = csv.reader(io.StringIO(text, newline=""), delimiter=dialect.delimiter,
                        quotechar=dialect.quotechar, strict=True)
    try:
        header = next(reader)
    except StopIteration:
        raise TableError("empty input: a header row is required") from None
    except csv.Error as exc:
        raise TableError(f"line {reader.line_num}: {exc}") from None
    m = len(header)
    if len(set(header)) != m:
        raise TableError("line 1: duplicate column names in header")

    raw_rows = []
    try:
        for row in reader:
            if not row:
                continue
            if len(row) != m:
                raise TableError(
                    f"line {reader.line_num}: expected {m} fields, found {len(row)}")
            raw_rows.append(row)
    except csv.Error as exc:
        raise TableError(f"line {reader.line_num}: {exc}") from None

    missing = dialect.missing_set()
    cols = {}
    raw_cols = list(zip(*raw_rows)) if raw_rows else [()] * m
    for name, raw in zip(header, raw_cols):
        cache: dict[str, Cell] = {}
        out = []
        for tok in raw:
            try:
                out.append(cache[tok])
            except KeyError:
                cache[tok] = v = parse_cell(tok, missing)
                out.append(v)
        cols[name] = out
    return Table(cols, _trusted=True)


def write_table(table: Table, sink: BinaryIO | str, dialect: CsvDialect = CsvDialect()) -> None:
    buf = io.StringIO(newline="")
    writer = csv.writer(buf, delimiter=dialect.delimiter, quotechar=dialect.quotechar,
                        lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(table.attributes)
    cols = [[format_cell(v) for v in table.column(a)] for a in table.attributes]
    for i in range(table.n_rows):
        fields = [c[i] for c in cols]
        if len(fields) == 1 and fields[0] == "":
            # a lone empty field would otherwise be a blank line
            buf.write('""\r\n')
        else:
            try:
                writer.writerow(fields)
            except csv.Error as exc:  # NUL characters cannot be written
                raise TableError(f"row {i}: {exc}") from None
    data = buf.getvalue().encode(dialect.encoding)
    if isinstance(sink, str):
        with open(sink, "wb") as fh:
            fh.write(data)
    else:
        sink.write(data)


# -- kinds and profiles -------------------------------------------------------

class ColumnKind(str, enum.Enum):
    NUMERIC = "Numeric"
    TEXTUAL = "Textual"
    MIXED = "Mixed"


def column_kind(values: Iterable[Cell]) -> ColumnKind:
    """Classify one column.

    Numeric when every present cell is a number. Mixed when numbers and text
    share the column, or when some text value carries digits (model codes
    such as ``ZX160`` or date stamps). Everything else, including an entirely
    missing column, is Textual.
    """
    has_num = has_text = digits_in_text = False
    seen: set[str] = set()
    for v in values:
        if v is None:
            continue
        if isinstance(v, float):
            has_num = True
        else:
            has_text = True
            if v not in seen:
                seen.add(v)
                if not digits_in_text and _DIGIT_RE.search(v):
                    digits_in_text = True
        if has_num and has_text:
            return ColumnKind.MIXED
    if has_num:
        return ColumnKind.NUMERIC
    if digits_in_text:
        return ColumnKind.MIXED
    return ColumnKind.TEXTUAL


def infer_column_kinds(table: Table) -> dict[str, ColumnKind]:
    return {a: column_kind(table.column(a)) for a in table.attributes}


@dataclass
class Moments:
    mean: float
    std: float
    skewness: float | None
    kurtosis: float | None

    @property
    def defined(self) -> bool:
        return self.skewness is not None


@dataclass
class ColumnProfile:
    attr: str
    kind: ColumnKind
    n: int
    n_missing: int
    frequency_table: dict[Cell, int] = field(repr=False)
    moments: Moments | None = None

    @property
    def missing_rate(self) -> float:
        return self.n_missing / self.n if self.n else 0.0

    @property
    def unique_count(self) -> int:
        return len(self.frequency_table)


def standardized_moments(x: np.ndarray) -> Moments:
    """Mean, unbiased std, and standardized 3rd/4th moments (kurtosis is
    non-excess, so a normal sample sits near 3).

    The shape moments use the unbiased std as scale, matching the Z-scores
    used by the outlier stage. They are ``None`` when fewer than two
    distinct values exist.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if n == 0:
        return Moments(float("nan"), float("nan"), None, None)
    mean = float(x.mean())
    if n < 2:
        return Moments(mean, 0.0, None, None)
    d = x - mean
    std = float(np.sqrt(np.dot(d, d) / (n - 1)))
    if std == 0.0 or np.all(x == x[0]):
        return Moments(mean, 0.0, None, None)
    z = d / std
    z2 = z * z
    return Moments(mean, std, float(np.mean(z2 * z)), float(np.mean(z2 * z2)))


def profile_values(attr: str, values: Sequence[Cell], kind: ColumnKind | None = None) -> ColumnProfile:
    freq = Counter(v for v in values if v is not None)
    n_missing = len(values) - sum(freq.values())
    if kind is None:
        kind = column_kind(values)
    moments = None
    if kind is ColumnKind.NUMERIC and freq:
        x = np.fromiter((v for v in values if v is not None), dtype=float,
                        count=len(values) - n_missing)
        moments = standardized_moments(x)
    return ColumnProfile(attr, kind, len(values), n_missing, dict(freq), moments)


def profile_column(table: Table, attr: str) -> ColumnProfile:
    return profile_values(attr, table.column(attr))


def profile_table(table: Table) -> dict[str, ColumnProfile]:
    return {a: profile_column(table, a) for a in table.attributes}


def numeric_array(values: Sequence[Cell]) -> np.ndarray:
    """Float array with NaN where a cell is missing. Text cells raise."""
    out = np.empty(len(values), dtype=float)
    for i, v in enumerate(values):
        if v is None:
            out[i] = np.nan
        elif isinstance(v, float):
            out[i] = v
        else:
            raise TableError(f"text cell {v!r} in a numeric column")
    return out
