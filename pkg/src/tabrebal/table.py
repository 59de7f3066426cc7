"""Columnar tables with a declared schema of numeric and categorical columns.

A :class:`Table` stores numeric columns as float64 arrays and categorical
columns as int32 code arrays plus a per-column dictionary of category
strings.  Dictionaries are built in first-appearance order over the
loaded file's rows.  All arrays are read-only; row-level edits go
through :meth:`Table.filter_rows`, :func:`concat_tables`, or
:func:`from_columns`.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import (
    EmptyFileError,
    InvalidTargetError,
    MalformedRowError,
    MissingColumnError,
    NumericParseError,
    SchemaMismatchError,
    UnknownCategoryError,
    UnknownColumnError,
)

MISSING_CATEGORY = "_missing_"


class ColumnKind(str, Enum):
    NUMERIC = "numeric"
    CATEGORICAL = "categorical"


@dataclass(frozen=True)
class Schema:
    """Ordered column declarations plus the binary target.

    The text form is one ``name:kind`` line per column in order, with two
    directive lines ``target: <name>`` and ``positive_label: <value>``.
    Blank lines and lines starting with ``#`` are ignored.  The target
    column must itself be declared, with kind ``categorical``.
    """

    names: tuple[str, ...]
    kinds: tuple[ColumnKind, ...]
    target: str
    positive_label: str

    def __post_init__(self) -> None:
        if len(self.names) != len(self.kinds):
            raise ValueError("names and kinds differ in length")
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate column names")
        if self.target not in self.names:
            raise ValueError(f"target {self.target!r} not among columns")
        if self.kinds[self.names.index(self.target)] is not ColumnKind.CATEGORICAL:
            raise ValueError("target column must be categorical")
        if not self.positive_label:
            raise ValueError("positive_label must be non-empty")

    def kind_of(self, name: str) -> ColumnKind:
        try:
            return self.kinds[self.names.index(name)]
        except ValueError:
            raise UnknownColumnError(f"no column named {name!r}") from None

    @property
    def feature_names(self) -> tuple[str, ...]:
        return tuple(n for n in self.names if n != self.target)

    @property
    def numeric_features(self) -> tuple[str, ...]:
        return tuple(
            n
            for n, k in zip(self.names, self.kinds)
            if n != self.target and k is ColumnKind.NUMERIC
        )

    @property
    def categorical_features(self) -> tuple[str, ...]:
        return tuple(
            n
            for n, k in zip(self.names, self.kinds)
            if n != self.target and k is ColumnKind.CATEGORICAL
        )

    def to_text(self) -> str:
        lines = [f"{n}:{k.value}" for n, k in zip(self.names, self.kinds)]
        lines.append(f"target: {self.target}")
        lines.append(f"positive_label: {self.positive_label}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Schema":
        names: list[str] = []
        kinds: list[ColumnKind] = []
        target: str | None = None
        positive: str | None = None
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition(":")
            if not sep:
                raise ValueError(f"line {lineno}: expected name:kind, got {raw!r}")
            key = key.strip()
            value = value.strip()
            if key == "target":
                target = value
            elif key == "positive_label":
                positive = value
            else:
                try:
                    kinds.append(ColumnKind(value))
                except ValueError:
                    raise ValueError(
                        f"line {lineno}: unknown column kind {value!r}"
                    ) from None
                names.append(key)
        if target is None:
            raise ValueError("schema text is missing a target: line")
        if positive is None:
            raise ValueError("schema text is missing a positive_label: line")
        return cls(tuple(names), tuple(kinds), target, positive)

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_text())

    @classmethod
    def load(cls, path: str) -> "Schema":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_text(fh.read())


class Table:
    """Immutable columnar table bound to a :class:`Schema`."""

    def __init__(
        self,
        schema: Schema,
        columns: dict[str, np.ndarray],
        dictionaries: dict[str, tuple[str, ...]],
    ) -> None:
        self.schema = schema
        self._columns = columns
        self._dicts = dictionaries
        n = None
        for name in schema.names:
            arr = columns[name]
            if n is None:
                n = arr.shape[0]
            elif arr.shape[0] != n:
                raise ValueError("column lengths differ")
            arr.setflags(write=False)
        self._n = int(n) if n is not None else 0

    @property
    def n_rows(self) -> int:
        return self._n

    def column(self, name: str) -> np.ndarray:
        """Float values for numeric columns, int codes for categorical."""
        if name not in self._columns:
            raise UnknownColumnError(f"no column named {name!r}")
        return self._columns[name]

    def dictionary(self, name: str) -> tuple[str, ...]:
        if name not in self._dicts:
            raise UnknownColumnError(f"no categorical column named {name!r}")
        return self._dicts[name]

    def decode_column(self, name: str) -> list[str]:
        codes = self.column(name)
        d = self.dictionary(name)
        return [d[c] for c in codes]

    @property
    def y(self) -> np.ndarray:
        """1 where the target equals the positive label, else 0."""
        d = self._dicts[self.schema.target]
        codes = self._columns[self.schema.target]
        if self.schema.positive_label in d:
            pos = d.index(self.schema.positive_label)
            return (codes == pos).astype(np.int8)
        return np.zeros(self._n, dtype=np.int8)

    @property
    def positive_count(self) -> int:
        return int(self.y.sum())

    @property
    def negative_count(self) -> int:
        return self._n - self.positive_count

    def filter_rows(self, which: np.ndarray) -> "Table":
        """New table with the rows selected by a bool mask or index array."""
        which = np.asarray(which)
        cols = {n: self._columns[n][which].copy() for n in self.schema.names}
        return Table(self.schema, cols, self._dicts)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Table):
            return NotImplemented
        return (
            self.schema == other.schema
            and self._dicts == other._dicts
            and all(
                np.array_equal(self._columns[n], other._columns[n])
                for n in self.schema.names
            )
        )

    def __repr__(self) -> str:
        return f"Table({self._n} rows, {len(self.schema.names)} columns)"


def from_columns(
    schema: Schema,
    columns: dict[str, np.ndarray],
    dictionaries: dict[str, tuple[str, ...]],
) -> Table:
    """Build a table from raw arrays, validating kinds and code ranges."""
    cols: dict[str, np.ndarray] = {}
    for name, kind in zip(schema.names, schema.kinds):
        if name not in columns:
            raise MissingColumnError(f"column {name!r} not supplied")
        arr = np.asarray(columns[name])
        if kind is ColumnKind.NUMERIC:
            cols[name] = arr.astype(np.float64)
        else:
            if name not in dictionaries:
                raise MissingColumnError(f"dictionary for {name!r} not supplied")
            codes = arr.astype(np.int32)
            if codes.size and (codes.min() < 0 or codes.max() >= len(dictionaries[name])):
                raise UnknownCategoryError(f"code out of range for column {name!r}")
            cols[name] = codes
    extra = set(columns) - set(schema.names)
    if extra:
        raise UnknownColumnError(f"undeclared columns: {sorted(extra)}")
    dicts = {n: tuple(dictionaries[n]) for n in dictionaries if n in schema.names}
    return Table(schema, cols, dicts)


def load_csv(path: str, schema: Schema) -> Table:
    """Read a CSV into a table, building category dictionaries per column.

    The header must contain exactly the schema's columns (any order).
    Cells are ingested verbatim; an empty categorical cell becomes the
    ``_missing_`` category, while an empty or non-finite numeric cell is
    an error.  Category dictionaries list values in first-appearance
    order.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyFileError(f"{path}: no header row") from None
        rows = list(reader)
    if not rows:
        raise EmptyFileError(f"{path}: no data rows")

    have = set(header)
    want = set(schema.names)
    missing = want - have
    if missing:
        raise MissingColumnError(f"{path}: missing columns {sorted(missing)}")
    extra = have - want
    if extra:
        raise UnknownColumnError(f"{path}: undeclared columns {sorted(extra)}")
    if len(have) != len(header):
        raise MalformedRowError(f"{path}: duplicate column in header")

    width = len(header)
    for i, row in enumerate(rows, start=2):
        if len(row) != width:
            raise MalformedRowError(f"{path}: line {i} has {len(row)} fields, expected {width}")

    col_idx = {name: header.index(name) for name in schema.names}
    columns: dict[str, np.ndarray] = {}
    dicts: dict[str, tuple[str, ...]] = {}
    for name, kind in zip(schema.names, schema.kinds):
        j = col_idx[name]
        raw = [row[j] for row in rows]
        if kind is ColumnKind.NUMERIC:
            vals = np.empty(len(raw), dtype=np.float64)
            for i, cell in enumerate(raw):
                try:
                    vals[i] = float(cell)
                except ValueError:
                    raise NumericParseError(
                        f"{path}: column {name!r} line {i + 2}: cannot parse {cell!r}"
                    ) from None
                if not math.isfinite(vals[i]):
                    raise NumericParseError(
                        f"{path}: column {name!r} line {i + 2}: non-finite value {cell!r}"
                    )
            columns[name] = vals
        else:
            cells = [c if c != "" else MISSING_CATEGORY for c in raw]
            code_of: dict[str, int] = {}
            for c in cells:
                if c not in code_of:
                    code_of[c] = len(code_of)
            d = tuple(code_of)
            columns[name] = np.fromiter(
                (code_of[c] for c in cells), dtype=np.int32, count=len(cells)
            )
            dicts[name] = d

    tdict = dicts[schema.target]
    if len(tdict) > 2:
        raise InvalidTargetError(
            f"{path}: target {schema.target!r} has {len(tdict)} distinct values, expected at most 2"
        )
    if len(tdict) == 2 and schema.positive_label not in tdict:
        raise InvalidTargetError(
            f"{path}: positive label {schema.positive_label!r} not among target values {list(tdict)}"
        )
    return Table(schema, columns, dicts)


def write_csv(table: Table, path: str) -> None:
    """Write in schema column order; floats use shortest round-trip form."""
    schema = table.schema
    decoded: dict[str, list[str]] = {}
    for name, kind in zip(schema.names, schema.kinds):
        if kind is ColumnKind.NUMERIC:
            decoded[name] = [repr(float(v)) for v in table.column(name)]
        else:
            decoded[name] = table.decode_column(name)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(schema.names)
        for i in range(table.n_rows):
            writer.writerow([decoded[n][i] for n in schema.names])


def concat_tables(tables: list[Table]) -> Table:
    """Stack tables that share a schema and identical dictionaries."""
    if not tables:
        raise ValueError("need at least one table")
    first = tables[0]
    for t in tables[1:]:
        if t.schema != first.schema:
            raise SchemaMismatchError("tables have different schemas")
        if t._dicts != first._dicts:
            raise SchemaMismatchError("tables have different category dictionaries")
    cols = {
        n: np.concatenate([t.column(n) for t in tables])
        for n in first.schema.names
    }
    return Table(first.schema, cols, first._dicts)


@dataclass(frozen=True)
class Predicate:
    """Conjunction of per-column tests, parsed from text.

    Grammar: clauses joined by ``&``; each clause is ``column=value``.
    On a numeric column the value is either a single number or an
    inclusive range ``lo..hi``; on a categorical column it is a category
    string.  Interpretation happens against a concrete table, so the
    same predicate can be applied to several tables.
    """

    clauses: tuple[tuple[str, str], ...] = field(default_factory=tuple)
    text: str = ""

    def mask(self, table: Table) -> np.ndarray:
        out = np.ones(table.n_rows, dtype=bool)
        for column, spec in self.clauses:
            kind = table.schema.kind_of(column)
            values = table.column(column)
            if kind is ColumnKind.NUMERIC:
                if ".." in spec:
                    lo_s, _, hi_s = spec.partition("..")
                else:
                    lo_s = hi_s = spec
                try:
                    lo, hi = float(lo_s), float(hi_s)
                except ValueError:
                    raise NumericParseError(
                        f"predicate value {spec!r} is not numeric for column {column!r}"
                    ) from None
                out &= (values >= lo) & (values <= hi)
            else:
                d = table.dictionary(column)
                if spec not in d:
                    raise UnknownCategoryError(
                        f"category {spec!r} not found in column {column!r}"
                    )
                out &= values == d.index(spec)
        return out


def parse_predicate(text: str) -> Predicate:
    clauses: list[tuple[str, str]] = []
    for part in text.split("&"):
        part = part.strip()
        if not part:
            raise ValueError(f"empty clause in predicate {text!r}")
        column, sep, value = part.partition("=")
        if not sep or not column.strip():
            raise ValueError(f"clause {part!r} is not of the form column=value")
        clauses.append((column.strip(), value.strip()))
    return Predicate(tuple(clauses), text)
