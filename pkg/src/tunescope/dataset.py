"""Dataset model, CSV ingestion, and the per-level one-hot row index.

A dataset is a table of categorical parameter columns plus one numeric
target column.  Every (parameter, level) pair gets a boolean row mask so
that any combination of level constraints reduces to bitwise AND/OR over
precomputed masks instead of rescanning rows.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

# Visual-design envelope: more levels than this cannot be rendered usefully.
MAX_LEVELS_PER_PARAMETER = 64


class DatasetError(ValueError):
    """A dataset could not be built from its source."""


@dataclass(frozen=True)
class ParameterSchema:
    """One categorical parameter: its name and ordered level vocabulary.

    ``ordinal`` records whether the level order carries meaning (block
    sizes do, journal modes do not); it is metadata only and never used
    to re-sort levels.
    """

    name: str
    levels: tuple[str, ...]
    ordinal: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "levels", tuple(self.levels))
        if not self.name:
            raise DatasetError("parameter name must be non-empty")
        if len(self.levels) < 2:
            raise DatasetError(
                f"parameter {self.name!r} needs at least 2 levels, got {len(self.levels)}"
            )
        if len(self.levels) > MAX_LEVELS_PER_PARAMETER:
            raise DatasetError(
                f"parameter {self.name!r} has {len(self.levels)} levels; "
                f"limit is {MAX_LEVELS_PER_PARAMETER}"
            )
        if any(not lvl for lvl in self.levels):
            raise DatasetError(f"parameter {self.name!r} has an empty level name")
        if len(set(self.levels)) != len(self.levels):
            raise DatasetError(f"parameter {self.name!r} has duplicate level names")

    def level_index(self, level: str) -> int:
        try:
            return self.levels.index(level)
        except ValueError:
            raise DatasetError(
                f"unknown level {level!r} for parameter {self.name!r}"
            ) from None


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Dataset:
    """Immutable dataset: schema, target values, and the one-hot index.

    ``codes[p]`` holds each row's level index for parameter ``p``;
    ``masks[p][lvl]`` is the boolean row mask for that level.  Masks of one
    parameter are pairwise disjoint and union to all rows.  Safe for any
    number of concurrent readers.
    """

    parameters: tuple[ParameterSchema, ...]
    target_name: str
    target: np.ndarray
    codes: dict[str, np.ndarray] = field(repr=False)
    masks: dict[str, dict[str, np.ndarray]] = field(repr=False)

    @property
    def row_count(self) -> int:
        return int(self.target.shape[0])

    @property
    def parameter_names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.parameters)

    def parameter(self, name: str) -> ParameterSchema:
        for p in self.parameters:
            if p.name == name:
                return p
        raise DatasetError(f"unknown parameter {name!r}")

    def mask(self, parameter: str, level: str) -> np.ndarray:
        try:
            return self.masks[parameter][level]
        except KeyError:
            raise DatasetError(
                f"unknown parameter/level {parameter!r}={level!r}"
            ) from None

    def all_rows(self) -> np.ndarray:
        return _readonly(np.ones(self.row_count, dtype=bool))

    def equals(self, other: "Dataset") -> bool:
        return (
            self.parameters == other.parameters
            and self.target_name == other.target_name
            and np.array_equal(self.target, other.target)
            and all(
                np.array_equal(self.codes[p.name], other.codes[p.name])
                for p in self.parameters
            )
        )


def build_index(
    parameters: tuple[ParameterSchema, ...],
    columns: dict[str, list[str]],
    row_count: int,
) -> tuple[dict[str, np.ndarray], dict[str, dict[str, np.ndarray]]]:
    """One pass over a parsed categorical table into level codes and masks.

    Returns ``(codes, masks)``.  Raises DatasetError naming the row,
    parameter, and value when a cell holds a level absent from the schema.
    """
    codes: dict[str, np.ndarray] = {}
    masks: dict[str, dict[str, np.ndarray]] = {}
    for schema in parameters:
        lookup = {lvl: i for i, lvl in enumerate(schema.levels)}
        cells = columns[schema.name]
        col = np.empty(row_count, dtype=np.int16)
        for row, value in enumerate(cells):
            try:
                col[row] = lookup[value]
            except KeyError:
                raise DatasetError(
                    f"row {row + 1}: unknown level {value!r} "
                    f"for parameter {schema.name!r}"
                ) from None
        codes[schema.name] = _readonly(col)
        masks[schema.name] = {
            lvl: _readonly(col == i) for i, lvl in enumerate(schema.levels)
        }
    return codes, masks


def dataset_from_codes(
    parameters: tuple[ParameterSchema, ...],
    codes: dict[str, np.ndarray],
    target: np.ndarray,
    target_name: str,
) -> Dataset:
    """Assemble a Dataset from already-encoded level columns."""
    target = np.asarray(target, dtype=np.float64)
    if not np.all(np.isfinite(target)):
        raise DatasetError("target contains non-finite values")
    masks = {
        p.name: {
            lvl: _readonly(np.asarray(codes[p.name]) == i)
            for i, lvl in enumerate(p.levels)
        }
        for p in parameters
    }
    frozen = {name: _readonly(np.asarray(col, dtype=np.int16)) for name, col in codes.items()}
    return Dataset(
        parameters=tuple(parameters),
        target_name=target_name,
        target=_readonly(target),
        codes=frozen,
        masks=masks,
    )


def load_csv(source: bytes | str | io.IOBase, target_column: str) -> Dataset:
    """Parse a header-bearing CSV into a Dataset.

    Every non-target column is categorical; levels are registered in
    first-appearance order.  Cell values are compared after stripping
    surrounding whitespace and are otherwise case-sensitive.  Missing
    cells are rejected, as are columns with fewer than two distinct
    levels (they carry no information for filtering).
    """
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    else:
        raw = source.read()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw

    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DatasetError("empty file") from None
    header = [h.strip() for h in header]
    if len(set(header)) != len(header):
        dupes = sorted({h for h in header if header.count(h) > 1})
        raise DatasetError(f"duplicate header names: {', '.join(dupes)}")
    if target_column not in header:
        raise DatasetError(f"missing target column {target_column!r}")

    target_pos = header.index(target_column)
    cat_names = [h for i, h in enumerate(header) if i != target_pos]
    columns: dict[str, list[str]] = {name: [] for name in cat_names}
    level_order: dict[str, dict[str, None]] = {name: {} for name in cat_names}
    targets: list[float] = []

    for row_no, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and row[0].strip() == ""):
            continue
        if len(row) != len(header):
            raise DatasetError(
                f"row {row_no}: expected {len(header)} cells, got {len(row)}"
            )
        raw_target = row[target_pos].strip()
        try:
            value = float(raw_target)
        except ValueError:
            raise DatasetError(
                f"row {row_no}, column {target_column!r}: "
                f"non-numeric target value {raw_target!r}"
            ) from None
        if not math.isfinite(value):
            raise DatasetError(
                f"row {row_no}, column {target_column!r}: "
                f"non-finite target value {raw_target!r}"
            )
        targets.append(value)
        for i, name in enumerate(header):
            if i == target_pos:
                continue
            cell = row[i].strip()
            if not cell:
                raise DatasetError(
                    f"row {row_no}, column {name!r}: missing cell value"
                )
            columns[name].append(cell)
            if cell not in level_order[name]:
                if len(level_order[name]) >= MAX_LEVELS_PER_PARAMETER:
                    raise DatasetError(
                        f"column {name!r} exceeds {MAX_LEVELS_PER_PARAMETER} "
                        f"distinct levels"
                    )
                level_order[name][cell] = None

    parameters = tuple(
        ParameterSchema(name=name, levels=tuple(level_order[name]))
        for name in cat_names
    )
    row_count = len(targets)
    codes, masks = build_index(parameters, columns, row_count)
    target = _readonly(np.asarray(targets, dtype=np.float64))
    return Dataset(
        parameters=parameters,
        target_name=target_column,
        target=target,
        codes=codes,
        masks=masks,
    )
