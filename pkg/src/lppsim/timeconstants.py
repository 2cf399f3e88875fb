"""Law-of-large-numbers checks for passage times.

Two exactly known square-shape constants (exponential and geometric
weights) and the thin-rectangle normalization whose limit is twice
the weight standard deviation.  Finite-size corrections decay like
n^(-1/3), so series of shape points are extrapolated with a
two-parameter fit in n^(-1/3).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ParameterError
from .percolation import last_passage_path_form, sample_weight_matrix
from .weights import RngStream, WeightDistribution

MIN_REPLICATES = 30


@dataclass(frozen=True)
class ShapePoint:
    """Monte Carlo estimate of a normalized passage-time statistic.

    For square shapes mean_ratio is the sample mean of
    L(floor(x*n), floor(y*n)) / n.  For thin rectangles x, y record
    (N, k), n = N, and mean_ratio is the mean of (L - mu*N)/sqrt(N*k).
    """

    x: float
    y: float
    n: int
    mean_ratio: float
    stderr: float

    def __post_init__(self):
        if self.x <= 0 or self.y <= 0:
            raise ParameterError("shape coordinates must be positive")
        if self.stderr < 0:
            raise ParameterError("stderr must be >= 0")


def predicted_constant_exponential(x: float, y: float) -> float:
    """Square-shape constant (sqrt(x) + sqrt(y))^2 for rate-1
    exponential weights."""
    if x <= 0 or y <= 0:
        raise ParameterError(f"shape coordinates must be positive, got ({x}, {y})")
    return (math.sqrt(x) + math.sqrt(y)) ** 2


def predicted_constant_geometric(x: float, y: float, q: float) -> float:
    """Square-shape constant (q(x+y) + 2 sqrt(qxy)) / (1-q) for
    geometric weights on {0, 1, 2, ...} with parameter q."""
    if x <= 0 or y <= 0:
        raise ParameterError(f"shape coordinates must be positive, got ({x}, {y})")
    if not 0.0 < q < 1.0:
        raise ParameterError(f"q must be in (0, 1), got {q}")
    return (q * (x + y) + 2.0 * math.sqrt(q * x * y)) / (1.0 - q)


def _replicate_stats(values: np.ndarray) -> tuple[float, float]:
    mean = float(np.mean(values))
    stderr = float(np.std(values, ddof=1) / math.sqrt(values.size))
    return mean, stderr


def square_shape_point(dist: WeightDistribution, x: float, y: float, n: int,
                       replicates: int, stream: RngStream) -> ShapePoint:
    """Sample mean of L(floor(x*n), floor(y*n)) / n over replicates.

    Replicates use consecutive substreams of `stream`, so the result
    is independent of any parallel scheduling of the replicate loop.
    """
    if x <= 0 or y <= 0:
        raise ParameterError(f"shape coordinates must be positive, got ({x}, {y})")
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    if replicates < MIN_REPLICATES:
        raise ParameterError(
            f"need >= {MIN_REPLICATES} replicates, got {replicates}")
    n_cols = int(math.floor(x * n))
    n_rows = int(math.floor(y * n))
    if n_cols < 1 or n_rows < 1:
        raise ParameterError(
            f"floor(x*n), floor(y*n) must be >= 1, got ({n_cols}, {n_rows})")
    vals = np.empty(replicates, dtype=np.float64)
    for i in range(replicates):
        w = sample_weight_matrix(dist, n_cols, n_rows, stream.substream(i))
        vals[i] = last_passage_path_form(w).value / n
    mean, stderr = _replicate_stats(vals)
    return ShapePoint(x=float(x), y=float(y), n=n, mean_ratio=mean,
                      stderr=stderr)


def thin_rectangle_constant(dist: WeightDistribution, n_cols: int,
                            n_rows: int, replicates: int,
                            stream: RngStream) -> ShapePoint:
    """Mean of (L - mu*N) / sqrt(N*k) for a thin N x k rectangle.

    The statistic approaches twice the weight standard deviation as N
    grows with k = o(N); the thin regime k <= N^(1/3) is enforced.
    """
    if n_cols < 1 or n_rows < 1:
        raise ParameterError(
            f"grid dimensions must be >= 1, got ({n_cols}, {n_rows})")
    if replicates < MIN_REPLICATES:
        raise ParameterError(
            f"need >= {MIN_REPLICATES} replicates, got {replicates}")
    if n_rows > n_cols ** (1.0 / 3.0) + 1e-9:
        raise ParameterError(
            f"thin regime requires k <= N^(1/3): k={n_rows}, N^(1/3)="
            f"{n_cols ** (1.0 / 3.0):.3f}")
    mu = dist.mean
    scale = math.sqrt(float(n_cols) * float(n_rows))
    vals = np.empty(replicates, dtype=np.float64)
    for i in range(replicates):
        w = sample_weight_matrix(dist, n_cols, n_rows, stream.substream(i))
        vals[i] = (last_passage_path_form(w).value - mu * n_cols) / scale
    mean, stderr = _replicate_stats(vals)
    return ShapePoint(x=float(n_cols), y=float(n_rows), n=n_cols,
                      mean_ratio=mean, stderr=stderr)


def extrapolate_inverse_cuberoot(points: Sequence[ShapePoint]) -> float:
    """Least-squares limit of mean_ratio under the model
    mean_ratio(n) = limit + amplitude * n^(-1/3)."""
    if len(points) < 2:
        raise ParameterError("extrapolation needs at least two shape points")
    ns = np.array([p.n for p in points], dtype=np.float64)
    if np.unique(ns).size < 2:
        raise ParameterError("extrapolation needs at least two distinct n")
    ys = np.array([p.mean_ratio for p in points], dtype=np.float64)
    design = np.column_stack([np.ones_like(ns), ns ** (-1.0 / 3.0)])
    coef, *_ = np.linalg.lstsq(design, ys, rcond=None)
    return float(coef[0])


def write_shape_points_csv(points: Sequence[ShapePoint],
                           predicted: Sequence[float], fileobj) -> None:
    if len(points) != len(predicted):
        raise ParameterError("one predicted value per shape point required")
    fileobj.write("x,y,n,mean_ratio,stderr,predicted\n")
    for p, pred in zip(points, predicted):
        fileobj.write(f"{p.x!r},{p.y!r},{p.n},{p.mean_ratio!r},"
                      f"{p.stderr!r},{pred!r}\n")
