"""Parameter importance scores and sample-size recovery experiments.

The score is the between-group fraction of target variance when rows
are grouped by one parameter's levels: the gain of the best possible
single split on that parameter, which is what a depth-one regression
tree would use.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, DatasetError

DEFAULT_RECOVERY_REPEATS = 1000


@dataclass(frozen=True)
class RecoveryPoint:
    """Per sample fraction: probability over repeats that the sampled
    ranking's first 1/2/3 entries match the full-data ranking."""

    fraction: float
    top1: float
    top2: float
    top3: float


@dataclass(frozen=True)
class ImportanceReport:
    """Importance scores with ranking, plus recovery curves when a
    recovery experiment produced them."""

    parameters: tuple[str, ...]
    scores: tuple[float, ...]
    ranking: tuple[str, ...]
    recovery: tuple[RecoveryPoint, ...] | None = None

    def score_of(self, parameter: str) -> float:
        return self.scores[self.parameters.index(parameter)]


def _variance_scores(
    dataset: Dataset, rows: np.ndarray, parameters: tuple[str, ...]
) -> list[float]:
    values = dataset.target[rows]
    if len(values) < 2:
        raise DatasetError("importance needs at least 2 sampled rows")
    grand = float(values.mean())
    total = float(((values - grand) ** 2).sum())
    scores: list[float] = []
    for name in parameters:
        codes = dataset.codes[name][rows]
        n_levels = len(dataset.parameter(name).levels)
        counts = np.bincount(codes, minlength=n_levels)
        if np.count_nonzero(counts) < 2:
            warnings.warn(
                f"parameter {name!r} has a single level in the sample; score set to 0",
                stacklevel=3,
            )
            scores.append(0.0)
            continue
        if total <= 0:
            scores.append(0.0)
            continue
        sums = np.bincount(codes, weights=values, minlength=n_levels)
        present = counts > 0
        means = sums[present] / counts[present]
        between = float((counts[present] * (means - grand) ** 2).sum())
        scores.append(between / total)
    return scores


def _sample_rows(dataset: Dataset, fraction: float, seed: int) -> np.ndarray:
    if not 0 < fraction <= 1:
        raise ValueError("sample_fraction must lie in (0, 1]")
    n = dataset.row_count
    if fraction == 1:
        return np.arange(n)
    rng = np.random.default_rng(seed)
    size = max(min(round(fraction * n), n), 1)
    return rng.choice(n, size=size, replace=False)


def rank_parameters(
    dataset: Dataset,
    sample_fraction: float = 1.0,
    seed: int = 0,
    parameters: tuple[str, ...] | None = None,
) -> ImportanceReport:
    """Score parameters by between-group variance fraction on a uniform
    row sample; rank descending, ties by schema order."""
    if parameters is None:
        parameters = dataset.parameter_names
    else:
        parameters = tuple(parameters)
        for name in parameters:
            dataset.parameter(name)
    rows = _sample_rows(dataset, sample_fraction, seed)
    scores = _variance_scores(dataset, rows, parameters)
    order = np.argsort(-np.asarray(scores), kind="stable")
    return ImportanceReport(
        parameters=parameters,
        scores=tuple(scores),
        ranking=tuple(parameters[i] for i in order),
    )


def recovery_experiment(
    dataset: Dataset,
    fractions: tuple[float, ...],
    repeats: int = DEFAULT_RECOVERY_REPEATS,
    seed: int = 0,
) -> ImportanceReport:
    """How reliably small samples reproduce the full-data ranking.

    The full-data ranking is the ground truth; each repeat draws a
    fresh sample per fraction (repeat r uses seed+r across fractions,
    so curves share their random draws) and checks whether the first
    1, 2, and 3 ranked parameters match.
    """
    if not fractions:
        raise ValueError("recovery experiment needs at least one fraction")
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    full = rank_parameters(dataset)
    n_params = len(full.parameters)
    points: list[RecoveryPoint] = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for fraction in fractions:
            hits = [0, 0, 0]
            for r in range(repeats):
                ranking = rank_parameters(dataset, fraction, seed + r).ranking
                for k in range(3):
                    depth = min(k + 1, n_params)
                    if ranking[:depth] == full.ranking[:depth]:
                        hits[k] += 1
            points.append(
                RecoveryPoint(
                    fraction=fraction,
                    top1=hits[0] / repeats,
                    top2=hits[1] / repeats,
                    top3=hits[2] / repeats,
                )
            )
    return ImportanceReport(
        parameters=full.parameters,
        scores=full.scores,
        ranking=full.ranking,
        recovery=tuple(points),
    )


def incremental_pipeline(
    dataset: Dataset,
    batch_size: int,
    rounds: int,
    seed: int = 0,
    sample_fraction: float = 0.01,
) -> list[ImportanceReport]:
    """Explore parameters in batches: rank the first batch_size
    parameters on a small sample, then widen by batch_size each round
    and re-rank the union.

    Rounds past the point where every parameter is explored repeat the
    final report unchanged.
    """
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    names = dataset.parameter_names
    reports: list[ImportanceReport] = []
    previous_count = 0
    round_seed = seed
    for r in range(rounds):
        count = min((r + 1) * batch_size, len(names))
        if count != previous_count:
            round_seed = seed + r
        previous_count = count
        reports.append(
            rank_parameters(
                dataset,
                sample_fraction=sample_fraction,
                seed=round_seed,
                parameters=names[:count],
            )
        )
    return reports
