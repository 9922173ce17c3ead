"""Dataset-backed black-box configuration search.

The measured dataset is the evaluation oracle: a configuration's
objective is computed from the target values of its matching rows, and
configurations with no rows are infeasible.  Searchers only interact
with an evaluator object, so a live-system backend can replace the
dataset lookup without touching the algorithms.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Protocol

import numpy as np

from .dataset import Dataset, DatasetError

OBJECTIVES = ("maximize_mean", "maximize_max", "minimize_range")
DEFAULT_SPACE_CAP = 1_000_000
DEFAULT_ALPHA = 0.95
_START_ATTEMPTS = 100
_LIVELOCK_LIMIT = 10

Configuration = dict[str, str]


@dataclass(frozen=True)
class SearchStep:
    step: int
    configuration: Configuration
    value: float | None
    feasible: bool
    best_value: float | None
    # Move acceptance, where the algorithm has that notion (simulated
    # annealing); None for independent draws and infeasible records.
    accepted: bool | None = None


@dataclass(frozen=True)
class SearchTrace:
    """Per-step search record; best_value stays monotone in the
    objective's improving direction."""

    algorithm: str
    objective: str
    budget: int
    seed: int | None
    steps: tuple[SearchStep, ...]
    best_configuration: Configuration | None
    best_value: float | None
    total_evaluations: int
    wall_time_s: float


def _direction(objective: str) -> int:
    if objective not in OBJECTIVES:
        raise ValueError(f"unknown objective {objective!r}; expected one of {OBJECTIVES}")
    return -1 if objective == "minimize_range" else 1


class ConfigTable:
    """Grouped target statistics per observed configuration.

    Rows are keyed by a mixed-radix configuration index (parameters in
    schema order, last parameter varying fastest) so ascending index
    order is exactly full-factorial enumeration order.
    """

    def __init__(self, dataset: Dataset) -> None:
        self.dataset = dataset
        self.radices = [len(p.levels) for p in dataset.parameters]
        self.space_size = math.prod(self.radices) if self.radices else 0
        self.strides = [1] * len(self.radices)
        for i in range(len(self.radices) - 2, -1, -1):
            self.strides[i] = self.strides[i + 1] * self.radices[i + 1]

        row_idx = np.zeros(dataset.row_count, dtype=np.int64)
        for schema, stride in zip(dataset.parameters, self.strides):
            row_idx += dataset.codes[schema.name].astype(np.int64) * stride
        order = np.argsort(row_idx, kind="stable")
        sorted_idx = row_idx[order]
        sorted_target = dataset.target[order]
        if len(sorted_idx):
            starts = np.r_[0, np.flatnonzero(sorted_idx[1:] != sorted_idx[:-1]) + 1]
            self.indices = sorted_idx[starts]
            self.counts = np.diff(np.r_[starts, len(sorted_idx)])
            self.sums = np.add.reduceat(sorted_target, starts)
            self.mins = np.minimum.reduceat(sorted_target, starts)
            self.maxs = np.maximum.reduceat(sorted_target, starts)
        else:
            self.indices = np.empty(0, dtype=np.int64)
            self.counts = np.empty(0, dtype=np.int64)
            self.sums = self.mins = self.maxs = np.empty(0, dtype=np.float64)

    def index_of(self, config: Configuration) -> int:
        idx = 0
        for schema, stride in zip(self.dataset.parameters, self.strides):
            try:
                level = config[schema.name]
            except KeyError:
                raise DatasetError(f"configuration misses parameter {schema.name!r}") from None
            idx += schema.level_index(level) * stride
        return idx

    def config_at(self, index: int) -> Configuration:
        out: Configuration = {}
        for schema, stride in zip(self.dataset.parameters, self.strides):
            code, index = divmod(index, stride)
            out[schema.name] = schema.levels[code]
        return out

    def slot_of(self, config: Configuration) -> int | None:
        idx = self.index_of(config)
        slot = int(np.searchsorted(self.indices, idx))
        if slot < len(self.indices) and self.indices[slot] == idx:
            return slot
        return None

    def values(self, objective: str) -> np.ndarray:
        """Objective value for every observed configuration, in
        enumeration order."""
        _direction(objective)
        if objective == "maximize_mean":
            return self.sums / self.counts
        if objective == "maximize_max":
            return self.maxs.copy()
        return self.maxs - self.mins


class Evaluator(Protocol):
    """What a searcher needs: the parameter space and a feasibility-aware
    objective lookup (None means infeasible)."""

    @property
    def parameters(self): ...

    def evaluate(self, config: Configuration) -> float | None: ...


class DatasetEvaluator:
    """Evaluator backed by measured rows via a ConfigTable."""

    def __init__(self, dataset: Dataset, objective: str) -> None:
        self.direction = _direction(objective)
        self.objective = objective
        self.table = ConfigTable(dataset)
        self._values = self.table.values(objective) if len(self.table.indices) else None

    @property
    def parameters(self):
        return self.table.dataset.parameters

    def evaluate(self, config: Configuration) -> float | None:
        slot = self.table.slot_of(config)
        if slot is None or self._values is None:
            return None
        return float(self._values[slot])


def exhaustive_best(
    dataset: Dataset, objective: str, space_cap: int = DEFAULT_SPACE_CAP
) -> tuple[Configuration, float]:
    """Evaluate every feasible configuration; ties go to the earliest in
    enumeration order (levels in schema order, last parameter fastest)."""
    direction = _direction(objective)
    table = ConfigTable(dataset)
    if table.space_size > space_cap:
        raise ValueError(
            f"configuration space has {table.space_size} points, over the cap {space_cap}"
        )
    if len(table.indices) == 0:
        raise ValueError("no feasible configuration: dataset has no rows")
    values = table.values(objective)
    slot = int(np.argmax(values)) if direction > 0 else int(np.argmin(values))
    return table.config_at(int(table.indices[slot])), float(values[slot])


class _TraceRecorder:
    def __init__(self, direction: int, on_step: Callable | None) -> None:
        self.direction = direction
        self.on_step = on_step
        self.steps: list[SearchStep] = []
        self.best_value: float | None = None
        self.best_config: Configuration | None = None

    def record(
        self, config: Configuration, value: float | None, accepted: bool | None = None
    ) -> None:
        if value is not None and (
            self.best_value is None or self.direction * (value - self.best_value) > 0
        ):
            self.best_value = value
            self.best_config = dict(config)
        step = SearchStep(
            step=len(self.steps) + 1,
            configuration=dict(config),
            value=value,
            feasible=value is not None,
            best_value=self.best_value,
            accepted=accepted,
        )
        self.steps.append(step)
        if self.on_step is not None:
            self.on_step(step)


def _uniform_config(rng: np.random.Generator, parameters) -> Configuration:
    return {p.name: p.levels[int(rng.integers(len(p.levels)))] for p in parameters}


def random_search(
    dataset: Dataset,
    objective: str,
    budget: int,
    seed: int,
    on_step: Callable[[SearchStep], None] | None = None,
) -> SearchTrace:
    """Independent uniform draws over the configuration cross-product;
    infeasible draws consume budget and are recorded as such."""
    if budget < 1:
        raise ValueError("budget must be >= 1")
    evaluator = DatasetEvaluator(dataset, objective)
    rng = np.random.default_rng(seed)
    recorder = _TraceRecorder(evaluator.direction, on_step)
    started = time.perf_counter()
    for _ in range(budget):
        config = _uniform_config(rng, evaluator.parameters)
        recorder.record(config, evaluator.evaluate(config))
    return SearchTrace(
        algorithm="random",
        objective=objective,
        budget=budget,
        seed=seed,
        steps=tuple(recorder.steps),
        best_configuration=recorder.best_config,
        best_value=recorder.best_value,
        total_evaluations=len(recorder.steps),
        wall_time_s=time.perf_counter() - started,
    )


def simulated_annealing(
    dataset: Dataset,
    objective: str,
    budget: int,
    seed: int,
    t0: float | None = None,
    alpha: float = DEFAULT_ALPHA,
    on_step: Callable[[SearchStep], None] | None = None,
) -> SearchTrace:
    """Simulated annealing over the categorical space.

    A neighbor re-draws one parameter's level among its other levels.
    Infeasible neighbors are rejected without consuming the move, but a
    run of 10 consecutive rejections books one budget evaluation (as an
    infeasible step) so holes in the measured space cannot livelock the
    search.  Temperature decays geometrically per feasible evaluation,
    starting at one standard deviation of the target.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if t0 is not None and t0 <= 0:
        raise ValueError("t0 must be positive")
    evaluator = DatasetEvaluator(dataset, objective)
    parameters = evaluator.parameters
    if t0 is None:
        sd = float(np.std(dataset.target)) if dataset.row_count else 0.0
        t0 = sd if sd > 0 else 1.0
    rng = np.random.default_rng(seed)
    recorder = _TraceRecorder(evaluator.direction, on_step)
    started = time.perf_counter()

    current = None
    for _ in range(_START_ATTEMPTS):
        candidate = _uniform_config(rng, parameters)
        value = evaluator.evaluate(candidate)
        if value is not None:
            current, current_value = candidate, value
            break
    if current is None:
        raise ValueError(f"no feasible starting configuration in {_START_ATTEMPTS} draws")
    recorder.record(current, current_value, accepted=True)

    temperature = t0
    evaluations = 1
    rejections = 0
    while evaluations < budget:
        neighbor = dict(current)
        schema = parameters[int(rng.integers(len(parameters)))]
        others = [lvl for lvl in schema.levels if lvl != current[schema.name]]
        neighbor[schema.name] = others[int(rng.integers(len(others)))]
        value = evaluator.evaluate(neighbor)
        if value is None:
            rejections += 1
            if rejections >= _LIVELOCK_LIMIT:
                recorder.record(neighbor, None)
                evaluations += 1
                rejections = 0
            continue
        rejections = 0
        evaluations += 1
        gain = evaluator.direction * (value - current_value)
        # temperature can decay to exact zero on very long runs; treat
        # that as the hill-climbing limit instead of dividing by zero.
        accept = gain >= 0 or (
            temperature > 0.0 and rng.random() < math.exp(gain / temperature)
        )
        recorder.record(neighbor, value, accepted=accept)
        if accept:
            current, current_value = neighbor, value
        temperature *= alpha
    return SearchTrace(
        algorithm="simulated_annealing",
        objective=objective,
        budget=budget,
        seed=seed,
        steps=tuple(recorder.steps),
        best_configuration=recorder.best_config,
        best_value=recorder.best_value,
        total_evaluations=len(recorder.steps),
        wall_time_s=time.perf_counter() - started,
    )
