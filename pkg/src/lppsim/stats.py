"""Empirical distribution tools: ECDF summaries, Kolmogorov-Smirnov
tests, and the centering/scaling transforms for passage-time limits.

Thresholds use the asymptotic KS distribution. All acceptance runs
operate at sample sizes (>= 4000) where the asymptotic is accurate;
small-sample exactness is out of scope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import ParameterError, ValidationError

ArrayLike = Union[Sequence[float], np.ndarray]


def standard_normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


@dataclass(frozen=True)
class EcdfSummary:
    """Sorted sample with first two moments.

    The ECDF is the right-continuous step function with jumps 1/n at
    the sample points; `evaluate` implements exactly that convention.
    """

    sample: np.ndarray
    n: int
    mean: float
    variance: float

    def evaluate(self, x: float) -> float:
        return float(np.searchsorted(self.sample, x, side="right")) / self.n

    def quantile(self, p: float) -> float:
        """Left-continuous inverse of the ECDF (order statistic)."""
        if not 0.0 < p <= 1.0:
            raise ParameterError(f"quantile level must be in (0, 1], got {p}")
        idx = int(math.ceil(p * self.n)) - 1
        return float(self.sample[max(idx, 0)])

    @property
    def stderr(self) -> float:
        return math.sqrt(self.variance / self.n)


def ecdf_summary(values: ArrayLike) -> EcdfSummary:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValidationError("sample must be a nonempty 1-d array")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("sample contains non-finite values")
    srt = np.sort(arr)
    n = srt.size
    mean = float(np.mean(srt))
    # unbiased variance; a single observation carries no spread estimate
    variance = float(np.var(srt, ddof=1)) if n > 1 else 0.0
    return EcdfSummary(sample=srt, n=n, mean=mean, variance=variance)


@dataclass(frozen=True)
class KSResult:
    """Kolmogorov-Smirnov decision record.

    `n2` is None for the one-sample test (reference CDF is exact, so
    the second sample size is infinite); serialized as JSON null.
    """

    statistic: float
    n1: int
    n2: Optional[int]
    alpha: float
    threshold: float
    reject: bool

    def as_record(self) -> dict:
        return {
            "statistic": self.statistic,
            "n1": self.n1,
            "n2": self.n2,
            "alpha": self.alpha,
            "threshold": self.threshold,
            "reject": self.reject,
        }


def ks_critical_coefficient(alpha: float) -> float:
    """c(alpha) with threshold = c(alpha) * sqrt((n1+n2)/(n1*n2)).

    c(0.05) = 1.358 to three decimals.
    """
    if not 0.0 < alpha < 1.0:
        raise ParameterError(f"alpha must be in (0, 1), got {alpha}")
    return math.sqrt(-0.5 * math.log(alpha / 2.0))


def _validated_sample(values: ArrayLike, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValidationError(f"{name} must be a nonempty 1-d array")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite values")
    return arr


def ks_one_sample(sample: ArrayLike, cdf: Callable[[float], float],
                  alpha: float = 0.05) -> KSResult:
    """Sup-distance between the sample ECDF and a reference CDF.

    D = max_i max(|i/n - F(x_i)|, |(i-1)/n - F(x_i)|) over the sorted
    sample, which is the exact sup over the whole line.
    """
    xs = np.sort(_validated_sample(sample, "sample"))
    n = xs.size
    coeff = ks_critical_coefficient(alpha)
    fvals = np.fromiter((cdf(float(x)) for x in xs), dtype=np.float64, count=n)
    if fvals.min() < -1e-12 or fvals.max() > 1.0 + 1e-12:
        raise ParameterError("cdf returned values outside [0, 1]")
    grid_hi = np.arange(1, n + 1, dtype=np.float64) / n
    grid_lo = np.arange(0, n, dtype=np.float64) / n
    d = float(np.max(np.maximum(np.abs(grid_hi - fvals),
                                np.abs(grid_lo - fvals))))
    threshold = coeff / math.sqrt(n)
    return KSResult(statistic=d, n1=n, n2=None, alpha=alpha,
                    threshold=threshold, reject=d > threshold)


def ks_two_sample(a: ArrayLike, b: ArrayLike, alpha: float = 0.05) -> KSResult:
    """Sup-distance between two sample ECDFs by a sorted merge scan.

    Ties across samples are handled by evaluating both ECDFs
    right-continuously at every pooled data point, which agrees with
    the brute-force sup exactly.
    """
    xa = np.sort(_validated_sample(a, "first sample"))
    xb = np.sort(_validated_sample(b, "second sample"))
    coeff = ks_critical_coefficient(alpha)
    n1, n2 = xa.size, xb.size
    pooled = np.concatenate([xa, xb])
    ca = np.searchsorted(xa, pooled, side="right") / n1
    cb = np.searchsorted(xb, pooled, side="right") / n2
    d = float(np.max(np.abs(ca - cb)))
    threshold = coeff * math.sqrt((n1 + n2) / (n1 * n2))
    return KSResult(statistic=d, n1=n1, n2=n2, alpha=alpha,
                    threshold=threshold, reject=d > threshold)


def _check_shape_params(n_cols: int, n_rows: int) -> None:
    if n_cols < 1 or n_rows < 1:
        raise ParameterError(
            f"grid dimensions must be >= 1, got ({n_cols}, {n_rows})")


def center_scale_last_passage(value, n_cols: int, n_rows: int,
                              mu: float, sigma: float,
                              kind: str = "last"):
    """Affine normalization of path-form passage times.

    kind="last":  (value - mu*(N+k-1) - 2*sigma*sqrt(N*k)) / (sigma * k^(-1/6) * sqrt(N))
    kind="first": same denominator, centering mu*(N+k-1) - 2*sigma*sqrt(N*k).

    Accepts scalars or arrays (the transform is affine in value).
    """
    _check_shape_params(n_cols, n_rows)
    if sigma <= 0:
        raise ParameterError(f"sigma must be positive, got {sigma}")
    if kind not in ("last", "first"):
        raise ParameterError(f"kind must be 'last' or 'first', got {kind!r}")
    big_n, k = float(n_cols), float(n_rows)
    spread = 2.0 * sigma * math.sqrt(big_n * k)
    center = mu * (big_n + k - 1.0) + (spread if kind == "last" else -spread)
    denom = sigma * k ** (-1.0 / 6.0) * math.sqrt(big_n)
    out = (np.asarray(value, dtype=np.float64) - center) / denom
    return float(out) if out.ndim == 0 else out


def center_scale_theorem_form(value, n_cols: int, n_rows: int,
                              kind: str = "last"):
    """Normalization of disjoint-segment passage times.

    kind="last":  (value / sqrt(N) - 2*sqrt(k)) * k^(1/6)
    kind="first": (-value / sqrt(N) - 2*sqrt(k)) * k^(1/6)
    """
    _check_shape_params(n_cols, n_rows)
    if kind not in ("last", "first"):
        raise ParameterError(f"kind must be 'last' or 'first', got {kind!r}")
    big_n, k = float(n_cols), float(n_rows)
    arr = np.asarray(value, dtype=np.float64)
    signed = arr if kind == "last" else -arr
    out = (signed / math.sqrt(big_n) - 2.0 * math.sqrt(k)) * k ** (1.0 / 6.0)
    return float(out) if out.ndim == 0 else out
