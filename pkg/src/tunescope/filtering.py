"""Filter state, selection masks, and per-level / aggregate summaries.

The selection mask is an AND over enabled parameters of the OR of
their selected levels' row masks.  Per-level summaries condition on
every other parameter's constraint but never on the level's own
parameter, so deselected levels keep a comparable bar instead of going
blank.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .dataset import Dataset, DatasetError
from .stats import (
    DEFAULT_CUTS,
    DEFAULT_GRID_POINTS,
    DensityCurve,
    StatSummary,
    kde_density,
    summarize,
)


@dataclass(frozen=True)
class FilterState:
    """Per-parameter enable flag and selected-level set.

    Value object: all mutators return a new state.  Parameter order
    mirrors the dataset schema.
    """

    parameters: tuple[str, ...]
    enabled: tuple[bool, ...]
    selected: tuple[frozenset[str], ...]

    @classmethod
    def fresh(cls, dataset: Dataset) -> FilterState:
        """Unconstrained state: everything enabled, all levels selected."""
        return cls(
            parameters=dataset.parameter_names,
            enabled=(True,) * len(dataset.parameters),
            selected=tuple(frozenset(p.levels) for p in dataset.parameters),
        )

    def _index(self, parameter: str) -> int:
        try:
            return self.parameters.index(parameter)
        except ValueError:
            raise DatasetError(f"unknown parameter {parameter!r}") from None

    def is_enabled(self, parameter: str) -> bool:
        return self.enabled[self._index(parameter)]

    def selected_levels(self, parameter: str) -> frozenset[str]:
        return self.selected[self._index(parameter)]

    def with_selection(self, parameter: str, levels) -> FilterState:
        i = self._index(parameter)
        new = list(self.selected)
        new[i] = frozenset(levels)
        return replace(self, selected=tuple(new))

    def with_enabled(self, parameter: str, flag: bool) -> FilterState:
        i = self._index(parameter)
        new = list(self.enabled)
        new[i] = flag
        return replace(self, enabled=tuple(new))

    def toggle_level(self, parameter: str, level: str) -> FilterState:
        current = self.selected_levels(parameter)
        if level in current:
            return self.with_selection(parameter, current - {level})
        return self.with_selection(parameter, current | {level})

    def toggle_parameter(self, parameter: str) -> FilterState:
        return self.with_enabled(parameter, not self.is_enabled(parameter))

    def validate(self, dataset: Dataset) -> None:
        if self.parameters != dataset.parameter_names:
            raise DatasetError("filter parameters do not match the dataset schema")
        if len(self.enabled) != len(self.parameters) or len(self.selected) != len(
            self.parameters
        ):
            raise DatasetError("filter shape does not match the dataset schema")
        for schema, chosen in zip(dataset.parameters, self.selected):
            extra = chosen - frozenset(schema.levels)
            if extra:
                raise DatasetError(
                    f"unknown level {sorted(extra)[0]!r} for parameter {schema.name!r}"
                )


@dataclass(frozen=True)
class RDSummary:
    """One range-distribution bar: stats plus half-violin density for a
    single (parameter, level) group under the current filter."""

    parameter: str
    level: str
    selected: bool
    available: bool
    stats: StatSummary
    density: DensityCurve | None


@dataclass(frozen=True)
class AggregateSummary:
    """The bar for the whole current selection."""

    stats: StatSummary
    density: DensityCurve | None
    matched_rows: int

    @property
    def available(self) -> bool:
        return self.matched_rows > 0


def _constraint_arrays(dataset: Dataset, filt: FilterState) -> list[np.ndarray | None]:
    """Per-parameter OR of selected level masks, or None when the
    parameter imposes no constraint (disabled, or all levels selected)."""
    arrays: list[np.ndarray | None] = []
    for schema, on, chosen in zip(dataset.parameters, filt.enabled, filt.selected):
        if not on or len(chosen) == len(schema.levels):
            arrays.append(None)
            continue
        acc = np.zeros(dataset.row_count, dtype=bool)
        for level in schema.levels:
            if level in chosen:
                acc |= dataset.mask(schema.name, level)
        arrays.append(acc)
    return arrays


def selection_mask(dataset: Dataset, filt: FilterState) -> np.ndarray:
    """Rows matching the filter: AND over enabled parameters of the OR
    of their selected levels.  An enabled parameter with nothing
    selected matches no rows."""
    filt.validate(dataset)
    acc = np.ones(dataset.row_count, dtype=bool)
    for constraint in _constraint_arrays(dataset, filt):
        if constraint is not None:
            acc &= constraint
    acc.flags.writeable = False
    return acc


def explorer_summaries(
    dataset: Dataset,
    filt: FilterState,
    sample: np.ndarray | None = None,
    cuts: tuple[float, ...] = DEFAULT_CUTS,
    grid_points: int | None = DEFAULT_GRID_POINTS,
) -> list[RDSummary]:
    """One RDSummary per (parameter, level), grouped by parameter.

    Each level's rows are sample AND every other parameter's constraint
    AND the level's own mask; the level's own parameter never
    constrains its bars.  grid_points=None skips density estimation.
    """
    filt.validate(dataset)
    base = dataset.all_rows() if sample is None else sample
    constraints = _constraint_arrays(dataset, filt)

    # Exclude-own-axis products via prefix/suffix ANDs: one pass instead
    # of re-ANDing all constraints per parameter.
    active = [(i, c) for i, c in enumerate(constraints) if c is not None]
    prefix: list[np.ndarray] = [base]
    for _, c in active:
        prefix.append(prefix[-1] & c)
    suffix: list[np.ndarray] = [np.ones(dataset.row_count, dtype=bool)]
    for _, c in reversed(active):
        suffix.append(suffix[-1] & c)
    suffix.reverse()
    everything = prefix[-1]
    exclude_at = {idx: prefix[pos] & suffix[pos + 1] for pos, (idx, _) in enumerate(active)}

    out: list[RDSummary] = []
    for i, schema in enumerate(dataset.parameters):
        context = exclude_at.get(i, everything)
        chosen = filt.selected[i]
        for level in schema.levels:
            rows = context & dataset.mask(schema.name, level)
            values = dataset.target[rows]
            stats = summarize(values, cuts)
            density = None
            if grid_points is not None and stats.count > 0:
                density = kde_density(values, grid_points)
            out.append(
                RDSummary(
                    parameter=schema.name,
                    level=level,
                    selected=level in chosen,
                    available=stats.count > 0,
                    stats=stats,
                    density=density,
                )
            )
    return out


def aggregate_summary(
    dataset: Dataset,
    filt: FilterState,
    sample: np.ndarray | None = None,
    cuts: tuple[float, ...] = DEFAULT_CUTS,
    grid_points: int | None = DEFAULT_GRID_POINTS,
) -> AggregateSummary:
    """Summary over sample AND selection_mask: the distribution reachable
    with the currently selected levels."""
    rows = selection_mask(dataset, filt)
    if sample is not None:
        rows = rows & sample
    values = dataset.target[rows]
    stats = summarize(values, cuts)
    density = None
    if grid_points is not None and stats.count > 0:
        density = kde_density(values, grid_points)
    return AggregateSummary(stats=stats, density=density, matched_rows=stats.count)
