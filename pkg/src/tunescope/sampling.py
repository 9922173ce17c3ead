"""Row sampling and automatic sample-size selection.

Datasets under 20k rows are used whole.  Larger ones walk a ladder of
fractions, keeping the first whose sampled target distribution is
indistinguishable from the full one (two-sample KS p-value at or above
the threshold).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .dataset import Dataset
from .stats import KSResult, ks_two_sample

FULL_DATA_THRESHOLD = 20_000
DEFAULT_LADDER: tuple[float, ...] = (0.05, 0.10, 0.15, 0.20, 0.30, 0.50)
DEFAULT_THRESHOLD = 0.5


class SampleReason(str, Enum):
    FULL_SMALL_DATASET = "full_small_dataset"
    THRESHOLD_MET = "threshold_met"
    LADDER_EXHAUSTED = "ladder_exhausted"


@dataclass(frozen=True)
class SamplePlan:
    """A chosen sample: fraction, seed, row subset, and the KS result
    that justified it (absent when no KS test was run)."""

    fraction: float
    seed: int
    row_subset: np.ndarray
    ks: KSResult | None
    reason: SampleReason

    @property
    def sampled_rows(self) -> int:
        return int(np.count_nonzero(self.row_subset))


def draw_sample(dataset: Dataset, fraction: float, seed: int) -> np.ndarray:
    """Uniform sample without replacement as a row mask; size is
    round(fraction * N) capped at N, deterministic per seed."""
    if not 0 < fraction <= 1:
        raise ValueError("sample fraction must lie in (0, 1]")
    n = dataset.row_count
    if fraction == 1:
        return dataset.all_rows()
    size = min(round(fraction * n), n)
    rng = np.random.default_rng(seed)
    mask = np.zeros(n, dtype=bool)
    mask[rng.choice(n, size=size, replace=False)] = True
    mask.flags.writeable = False
    return mask


def choose_sample_size(
    dataset: Dataset,
    ladder: tuple[float, ...] = DEFAULT_LADDER,
    threshold: float = DEFAULT_THRESHOLD,
    seed: int = 0,
) -> SamplePlan:
    """Pick the smallest ladder fraction whose sample passes the KS test.

    Small datasets (< 20k rows) short-circuit to the full data with no
    KS evaluation.  If no ladder fraction reaches the threshold the
    full data is used and marked ladder_exhausted.
    """
    _validate_ladder(ladder)
    if dataset.row_count < FULL_DATA_THRESHOLD:
        return SamplePlan(
            fraction=1.0,
            seed=seed,
            row_subset=dataset.all_rows(),
            ks=None,
            reason=SampleReason.FULL_SMALL_DATASET,
        )
    for fraction, mask, ks in _ladder_walk(dataset, ladder, seed):
        if ks.p_value >= threshold:
            return SamplePlan(
                fraction=fraction,
                seed=seed,
                row_subset=mask,
                ks=ks,
                reason=SampleReason.THRESHOLD_MET,
            )
    full = dataset.all_rows()
    return SamplePlan(
        fraction=1.0,
        seed=seed,
        row_subset=full,
        ks=ks_two_sample(dataset.target, dataset.target),
        reason=SampleReason.LADDER_EXHAUSTED,
    )


def sample_diagnostics(
    dataset: Dataset, ladder: tuple[float, ...] = DEFAULT_LADDER, seed: int = 0
) -> list[tuple[float, KSResult]]:
    """KS result for every ladder fraction (no early stop); the same
    draws choose_sample_size would make, for diagnostic tables."""
    _validate_ladder(ladder)
    return [(fraction, ks) for fraction, _, ks in _ladder_walk(dataset, ladder, seed)]


def _ladder_walk(dataset: Dataset, ladder: tuple[float, ...], seed: int):
    for fraction in ladder:
        mask = draw_sample(dataset, fraction, seed)
        ks = ks_two_sample(dataset.target[mask], dataset.target)
        yield fraction, mask, ks


def _validate_ladder(ladder: tuple[float, ...]) -> None:
    if not ladder:
        raise ValueError("sampling ladder must not be empty")
    if any(not 0 < f <= 1 for f in ladder):
        raise ValueError("ladder fractions must lie in (0, 1]")
    if any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise ValueError("ladder fractions must be strictly increasing")
