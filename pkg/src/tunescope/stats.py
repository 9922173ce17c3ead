"""Order statistics, kernel density curves, and the two-sample KS test.

All functions are pure over immutable inputs and safe to call
concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

DEFAULT_CUTS: tuple[float, ...] = (5.0, 25.0, 50.0, 75.0, 95.0)
DEFAULT_GRID_POINTS = 64

# Chunk size for kernel evaluation; bounds peak memory at ~8 MB per curve.
_KDE_CHUNK = 16_384


@dataclass(frozen=True)
class StatSummary:
    """Count, extremes, mean, and percentile cuts of one value multiset.

    Percentiles use the nearest-rank rule: the sorted value at 1-based
    index ceil(q/100 * n).  This picks actual sample values, so the
    summary is exactly equivariant under positive affine transforms.
    An empty input yields count=0 and no numeric fields ("unavailable").
    """

    count: int
    min: float | None = None
    max: float | None = None
    mean: float | None = None
    percentile_cuts: tuple[float, ...] = ()
    percentile_values: tuple[float, ...] = ()

    @property
    def available(self) -> bool:
        return self.count > 0

    @property
    def range(self) -> float | None:
        if self.count == 0:
            return None
        return self.max - self.min


@dataclass(frozen=True)
class DensityCurve:
    """Gaussian KDE evaluated on an even grid spanning [min, max].

    Densities are renormalized so the trapezoidal integral over the grid
    is 1 (a raw Gaussian KDE leaks mass outside the data span).  A
    zero-variance input collapses to a single spike marker:
    positions=[v], densities=[1], bandwidth=0.
    """

    positions: np.ndarray
    densities: np.ndarray
    bandwidth: float

    @property
    def is_spike(self) -> bool:
        return len(self.positions) == 1


@dataclass(frozen=True)
class KSResult:
    """Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value."""

    statistic: float
    p_value: float
    n1: int
    n2: int


def _validate_cuts(cuts: tuple[float, ...]) -> None:
    if any(not 0 < q < 100 for q in cuts):
        raise ValueError("percentile cuts must lie strictly inside (0, 100)")
    if any(b <= a for a, b in zip(cuts, cuts[1:])):
        raise ValueError("percentile cuts must be strictly increasing")


def nearest_rank(sorted_values: np.ndarray, cut: float) -> float:
    """Sorted value at 1-based index ceil(q/100 * n).

    The rank is computed with exact rational arithmetic over the cut's
    decimal notation, so e.g. q=95 on n=20000 never lands one rank off
    from binary rounding.
    """
    n = len(sorted_values)
    rank = math.ceil(Fraction(str(cut)) * n / 100)
    return float(sorted_values[max(rank, 1) - 1])


def summarize(values, cuts: tuple[float, ...] = DEFAULT_CUTS) -> StatSummary:
    """Summarize a value multiset: count, min/max, mean, percentiles.

    Empty input is a defined result (count 0, unavailable), not an error.
    """
    cuts = tuple(float(q) for q in cuts)
    _validate_cuts(cuts)
    arr = np.asarray(values, dtype=np.float64)
    n = int(arr.size)
    if n == 0:
        return StatSummary(count=0, percentile_cuts=cuts)
    s = np.sort(arr)
    lo = float(s[0])
    hi = float(s[-1])
    # Clamp: summation rounding must not push the mean outside [min, max].
    mean = min(max(float(np.mean(s)), lo), hi)
    pct = tuple(nearest_rank(s, q) for q in cuts)
    return StatSummary(
        count=n,
        min=lo,
        max=hi,
        mean=mean,
        percentile_cuts=cuts,
        percentile_values=pct,
    )


def silverman_bandwidth(values: np.ndarray) -> float:
    """h = 0.9 * min(sd, IQR/1.34) * n^(-1/5), falling back to sd alone
    when the IQR degenerates to zero on heavy-tied data."""
    n = len(values)
    sd = float(np.std(values))
    q75, q25 = np.percentile(values, [75, 25])
    spread = min(sd, float(q75 - q25) / 1.34)
    if spread <= 0:
        spread = sd
    return 0.9 * spread * n ** (-1 / 5)


def kde_density(values, grid_points: int = DEFAULT_GRID_POINTS) -> DensityCurve | None:
    """Gaussian KDE with Silverman bandwidth on an even [min, max] grid.

    Returns None for empty input.  All-identical values produce the
    single-point spike representation rather than a zero-bandwidth curve.
    """
    if grid_points < 2:
        raise ValueError("grid_points must be at least 2")
    arr = np.asarray(values, dtype=np.float64)
    n = int(arr.size)
    if n == 0:
        return None
    lo = float(arr.min())
    hi = float(arr.max())
    if lo == hi:
        return DensityCurve(
            positions=_frozen(np.array([lo])),
            densities=_frozen(np.array([1.0])),
            bandwidth=0.0,
        )
    h = silverman_bandwidth(arr)
    grid = np.linspace(lo, hi, grid_points)
    dens = np.zeros(grid_points)
    for start in range(0, n, _KDE_CHUNK):
        chunk = arr[start : start + _KDE_CHUNK]
        z = (grid[:, None] - chunk[None, :]) / h
        dens += np.exp(-0.5 * z * z).sum(axis=1)
    dens /= n * h * math.sqrt(2.0 * math.pi)
    area = float(np.trapezoid(dens, grid))
    dens /= area
    return DensityCurve(positions=_frozen(grid), densities=_frozen(dens), bandwidth=h)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def kolmogorov_q(lam: float, tol: float = 1e-10, max_terms: int = 100_000) -> float:
    """Asymptotic Kolmogorov survival function Q(lambda).

    Q(lam) = 2 * sum_{k>=1} (-1)^(k-1) * exp(-2 k^2 lam^2), truncated once
    a term falls below ``tol``.  The limit for lam -> 0 is 1; if the
    series has not converged after ``max_terms`` the limit value is
    returned.  Result clamped to [0, 1].
    """
    if lam <= 0:
        return 1.0
    total = 0.0
    sign = 1.0
    for k in range(1, max_terms + 1):
        term = 2.0 * math.exp(-2.0 * k * k * lam * lam)
        total += sign * term
        if term < tol:
            return min(max(total, 0.0), 1.0)
        sign = -sign
    return 1.0


def ks_two_sample(a, b) -> KSResult:
    """Two-sample KS test: D over empirical CDFs, asymptotic p-value.

    D is the supremum over all observed values of |F_a(x) - F_b(x)|.
    The p-value uses lambda = (sqrt(n_e) + 0.12 + 0.11/sqrt(n_e)) * D
    with n_e = n1*n2/(n1+n2).
    """
    xa = np.sort(np.asarray(a, dtype=np.float64))
    xb = np.sort(np.asarray(b, dtype=np.float64))
    n1 = int(xa.size)
    n2 = int(xb.size)
    if n1 == 0 or n2 == 0:
        raise ValueError("ks_two_sample requires two non-empty samples")
    points = np.concatenate([xa, xb])
    fa = np.searchsorted(xa, points, side="right") / n1
    fb = np.searchsorted(xb, points, side="right") / n2
    d = float(np.max(np.abs(fa - fb)))
    if d == 0.0:
        return KSResult(statistic=0.0, p_value=1.0, n1=n1, n2=n2)
    ne = n1 * n2 / (n1 + n2)
    lam = (math.sqrt(ne) + 0.12 + 0.11 / math.sqrt(ne)) * d
    return KSResult(statistic=d, p_value=kolmogorov_q(lam), n1=n1, n2=n2)
