"""Synthetic dataset generation with planted effects and sidecar truth.

Each parameter gets an additive effect on the target, spread evenly
and decreasing across its levels (level 0 carries the full magnitude,
the last level zero).  The generator also returns what it planted: the
best generated configuration and the exact noiseless importance
ranking, so search and ranking code can be tested against an
independent oracle.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset, DatasetError, ParameterSchema, dataset_from_codes

# Sampling configuration indices without replacement materializes a
# range(K) permutation; cap where that stays cheap (~128 MB of int64).
_SUBSET_WITHOUT_REPLACEMENT_CAP = 1 << 24


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for a generated dataset.

    ``effects`` holds one magnitude per parameter, aligned with
    ``parameters``.  ``rows`` is the requested row count; each generated
    configuration is measured ``repeat_runs`` times with independent
    noise, mimicking repeated benchmark runs.
    """

    parameters: tuple[ParameterSchema, ...]
    rows: int
    effects: tuple[float, ...]
    noise_sd: float = 0.0
    repeat_runs: int = 1
    base: float = 0.0
    target_name: str = "target"

    def __post_init__(self) -> None:
        if not self.parameters:
            raise DatasetError("synthetic spec needs at least one parameter")
        if len(self.effects) != len(self.parameters):
            raise DatasetError(
                "synthetic spec needs exactly one effect magnitude per parameter"
            )
        for value in (*self.effects, self.noise_sd, self.base):
            if not math.isfinite(value):
                raise DatasetError("synthetic spec values must be finite")
        if self.noise_sd < 0:
            raise DatasetError("noise_sd must be >= 0")
        if self.repeat_runs < 1:
            raise DatasetError("repeat_runs must be >= 1")
        if self.rows < self.repeat_runs:
            raise DatasetError("rows must allow at least one configuration")

    @property
    def space_size(self) -> int:
        return math.prod(len(p.levels) for p in self.parameters)


@dataclass(frozen=True)
class GroundTruth:
    """What the generator planted, for use as a test oracle.

    ``best_config`` is the noiseless-best configuration among those
    actually generated (ties broken by enumeration order).  Importance
    scores are the between-group variance fractions of the noiseless
    targets, so they are exact, not estimates.
    """

    best_config: dict[str, str]
    best_value: float
    importance_scores: tuple[float, ...] = field(default=())
    importance_ranking: tuple[str, ...] = field(default=())


def level_effects(schema: ParameterSchema, magnitude: float) -> np.ndarray:
    """Additive effect per level: magnitude at level 0, 0 at the last,
    evenly spaced in between."""
    n = len(schema.levels)
    steps = np.arange(n, dtype=np.float64)
    return magnitude * (n - 1 - steps) / (n - 1)


def _decode_configs(indices: np.ndarray, radices: list[int]) -> list[np.ndarray]:
    """Mixed-radix decode; the last parameter varies fastest, matching
    itertools.product enumeration order."""
    codes: list[np.ndarray] = []
    rest = indices.astype(np.int64, copy=True)
    for radix in reversed(radices):
        codes.append(rest % radix)
        rest //= radix
    codes.reverse()
    return codes


def generate_synthetic(spec: SyntheticSpec, seed: int) -> tuple[Dataset, GroundTruth]:
    """Build a dataset from the spec, deterministically for a given seed.

    Configurations cycle the full factorial when the row budget covers
    it; otherwise they are a random subset (without replacement while
    the space is small enough to permute, with replacement beyond
    that).  Targets are base + planted level effects + Gaussian noise.
    """
    rng = np.random.default_rng(seed)
    n_slots = spec.rows // spec.repeat_runs
    if spec.rows % spec.repeat_runs != 0:
        warnings.warn(
            f"rows {spec.rows} not divisible by repeat_runs {spec.repeat_runs}; "
            f"generating {n_slots * spec.repeat_runs} rows",
            stacklevel=2,
        )
    radices = [len(p.levels) for p in spec.parameters]
    space = spec.space_size

    if n_slots >= space:
        config_idx = np.arange(n_slots, dtype=np.int64) % space
        slot_codes = _decode_configs(config_idx, radices)
    elif space <= _SUBSET_WITHOUT_REPLACEMENT_CAP:
        config_idx = rng.choice(space, size=n_slots, replace=False)
        slot_codes = _decode_configs(config_idx, radices)
    else:
        # Space too large to permute; independent per-parameter draws
        # are exactly a uniform with-replacement draw over the product.
        slot_codes = [rng.integers(0, radix, size=n_slots) for radix in radices]

    codes = {
        schema.name: per_slot.repeat(spec.repeat_runs).astype(np.int16)
        for schema, per_slot in zip(spec.parameters, slot_codes)
    }

    n_rows = n_slots * spec.repeat_runs
    noiseless = np.full(n_rows, spec.base, dtype=np.float64)
    for schema, magnitude in zip(spec.parameters, spec.effects):
        noiseless += level_effects(schema, magnitude)[codes[schema.name]]
    target = noiseless
    if spec.noise_sd > 0:
        target = noiseless + rng.normal(0.0, spec.noise_sd, size=n_rows)

    dataset = dataset_from_codes(spec.parameters, codes, target, spec.target_name)
    truth = _ground_truth(spec, dataset, noiseless)
    return dataset, truth


def _ground_truth(
    spec: SyntheticSpec, dataset: Dataset, noiseless: np.ndarray
) -> GroundTruth:
    # Best generated configuration by noiseless value.  Rows sharing a
    # configuration share the value, so scanning rows suffices; ties go
    # to the earliest configuration in enumeration order.
    strides = _strides([len(p.levels) for p in spec.parameters])
    row_idx = np.zeros(dataset.row_count, dtype=np.int64)
    for schema, stride in zip(spec.parameters, strides):
        row_idx += dataset.codes[schema.name].astype(np.int64) * stride
    best_value = float(noiseless.max())
    candidates = row_idx[noiseless == best_value]
    best_row = int(np.argmax(row_idx == candidates.min()))
    best_config = {
        p.name: p.levels[dataset.codes[p.name][best_row]] for p in spec.parameters
    }

    grand = float(noiseless.mean())
    total_ss = float(((noiseless - grand) ** 2).sum())
    scores = []
    for schema in spec.parameters:
        c = dataset.codes[schema.name]
        counts = np.bincount(c, minlength=len(schema.levels))
        sums = np.bincount(c, weights=noiseless, minlength=len(schema.levels))
        nonzero = counts > 0
        means = sums[nonzero] / counts[nonzero]
        between = float((counts[nonzero] * (means - grand) ** 2).sum())
        scores.append(between / total_ss if total_ss > 0 else 0.0)
    order = np.argsort(-np.asarray(scores), kind="stable")
    ranking = tuple(spec.parameters[i].name for i in order)
    return GroundTruth(
        best_config=best_config,
        best_value=best_value,
        importance_scores=tuple(scores),
        importance_ranking=ranking,
    )


def _strides(radices: list[int]) -> list[int]:
    strides = [1] * len(radices)
    for i in range(len(radices) - 2, -1, -1):
        strides[i] = strides[i + 1] * radices[i + 1]
    return strides


def parse_spec_text(text: str) -> SyntheticSpec:
    """Parse the key/value synthetic spec document.

    Lines are ``key = value``; blank lines and ``#`` comments are
    skipped.  Scalar keys: rows, repeat_runs, noise_sd, base, target.
    Per-parameter keys: ``levels.<name> = a, b, c``,
    ``effect.<name> = 4``, ``ordinal.<name> = true``.  Parameter order
    follows the first appearance of each ``levels.`` line.
    """
    scalars: dict[str, str] = {}
    levels: dict[str, tuple[str, ...]] = {}
    effects: dict[str, float] = {}
    ordinals: dict[str, bool] = {}
    order: list[str] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise DatasetError(f"spec line {lineno}: expected key = value")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key.startswith("levels."):
            name = key[len("levels.") :]
            if name in levels:
                raise DatasetError(f"spec line {lineno}: duplicate levels for {name!r}")
            levels[name] = tuple(v.strip() for v in value.split(","))
            order.append(name)
        elif key.startswith("effect."):
            effects[key[len("effect.") :]] = _parse_float(value, lineno)
        elif key.startswith("ordinal."):
            ordinals[key[len("ordinal.") :]] = _parse_bool(value, lineno)
        elif key in ("rows", "repeat_runs", "noise_sd", "base", "target"):
            scalars[key] = value
        else:
            raise DatasetError(f"spec line {lineno}: unknown key {key!r}")

    if "rows" not in scalars:
        raise DatasetError("spec is missing required key 'rows'")
    if not order:
        raise DatasetError("spec declares no parameters (no levels.<name> lines)")
    for name in (*effects, *ordinals):
        if name not in levels:
            raise DatasetError(f"spec references undeclared parameter {name!r}")

    parameters = tuple(
        ParameterSchema(name, levels[name], ordinal=ordinals.get(name, False))
        for name in order
    )
    return SyntheticSpec(
        parameters=parameters,
        rows=_parse_int(scalars["rows"], "rows"),
        effects=tuple(effects.get(name, 0.0) for name in order),
        noise_sd=float(scalars.get("noise_sd", "0")),
        repeat_runs=_parse_int(scalars.get("repeat_runs", "1"), "repeat_runs"),
        base=float(scalars.get("base", "0")),
        target_name=scalars.get("target", "target"),
    )


def _parse_float(value: str, lineno: int) -> float:
    try:
        return float(value)
    except ValueError:
        raise DatasetError(f"spec line {lineno}: {value!r} is not a number") from None


def _parse_int(value: str, key: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise DatasetError(f"spec key {key}: {value!r} is not an integer") from None


def _parse_bool(value: str, lineno: int) -> bool:
    low = value.lower()
    if low in ("true", "1", "yes"):
        return True
    if low in ("false", "0", "no"):
        return False
    raise DatasetError(f"spec line {lineno}: {value!r} is not a boolean")
