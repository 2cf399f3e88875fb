"""GUE extreme-eigenvalue sampling in the density-with-weight-exp(-x^2/2)
normalization: joint eigenvalue density proportional to
prod |xi_i - xi_j|^2 * prod exp(-xi_j^2 / 2).

Sampling goes through the equivalent symmetric tridiagonal beta=2 model
(standard normal diagonal, chi-distributed off-diagonal), and eigenvalues
come from a from-scratch bisection solver on the Sturm negative-pivot
count. Dense samplers and dense eigensolvers exist only in the test tree
as oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit

from .errors import ValidationError
from .weights import RngStream


@dataclass(frozen=True)
class TridiagonalMatrix:
    diagonal: np.ndarray
    off_diagonal: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diagonal, dtype=np.float64)
        e = np.asarray(self.off_diagonal, dtype=np.float64)
        if d.ndim != 1 or d.size < 1:
            raise ValidationError(f"diagonal must be a nonempty vector, got shape {d.shape}")
        if e.shape != (d.size - 1,):
            raise ValidationError(
                f"off-diagonal must have length {d.size - 1}, got shape {e.shape}")
        if e.size and not np.all(e >= 0):
            raise ValidationError("off-diagonal entries must be nonnegative")
        object.__setattr__(self, "diagonal", d)
        object.__setattr__(self, "off_diagonal", e)

    @property
    def dimension(self) -> int:
        return self.diagonal.size


@dataclass(frozen=True)
class EigenSample:
    k: int
    lambda_max: float
    lambda_min: float
    spectrum: Optional[np.ndarray] = None


def sample_gue_tridiagonal(k: int, stream: RngStream) -> TridiagonalMatrix:
    """One tridiagonal draw whose spectrum has the target density.

    Diagonal entries are iid N(0,1). The off-diagonal entry m positions
    from the bottom is chi_{2m}/sqrt(2), drawn as sqrt(Gamma(m, 1)); the
    scale is pinned by the k=1 reduction to a single N(0,1) entry.
    """
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    rng = stream.generator
    d = rng.standard_normal(k)
    if k == 1:
        return TridiagonalMatrix(d, np.empty(0))
    shapes = np.arange(k - 1, 0, -1, dtype=np.float64)
    e = np.sqrt(rng.gamma(shape=shapes, scale=1.0))
    return TridiagonalMatrix(d, e)


@njit(cache=True, nogil=True)
def _bisect_extremes(d, e2, abs_tol):
    """(lambda_min, lambda_max) for a batch of tridiagonals.

    d: (n, k) diagonals; e2: (n, k-1) squared off-diagonals. Bisection on
    the count of negative pivots in the shifted LDL^T recurrence; the
    iteration count depends only on each sample's own Gershgorin bracket,
    so results are independent of batch composition.
    """
    n, k = d.shape
    out = np.empty((n, 2))
    for s in range(n):
        lo = d[s, 0]
        hi = d[s, 0]
        for i in range(k):
            r = 0.0
            if i > 0:
                r += math.sqrt(e2[s, i - 1])
            if i < k - 1:
                r += math.sqrt(e2[s, i])
            if d[s, i] - r < lo:
                lo = d[s, i] - r
            if d[s, i] + r > hi:
                hi = d[s, i] + r
        # pivot guard keeps the count well defined when a shift lands on
        # an exact pivot zero
        pivmin = 1e-300
        for i in range(k - 1):
            g = e2[s, i] * 1e-30
            if g > pivmin:
                pivmin = g
        width = hi - lo
        iters = 2
        while width > abs_tol and iters < 200:
            width *= 0.5
            iters += 1
        for which in range(2):
            a = lo
            b = hi
            for _ in range(iters):
                mid = 0.5 * (a + b)
                count = 0
                piv = d[s, 0] - mid
                if abs(piv) < pivmin:
                    piv = -pivmin
                if piv < 0.0:
                    count += 1
                for i in range(1, k):
                    piv = (d[s, i] - mid) - e2[s, i - 1] / piv
                    if abs(piv) < pivmin:
                        piv = -pivmin
                    if piv < 0.0:
                        count += 1
                if which == 0:
                    # smallest eigenvalue: first shift with any pivot below
                    if count >= 1:
                        b = mid
                    else:
                        a = mid
                else:
                    # largest eigenvalue: first shift with all pivots below
                    if count >= k:
                        b = mid
                    else:
                        a = mid
            out[s, which] = 0.5 * (a + b)
    return out


@njit(cache=True, nogil=True)
def _bisect_index(d, e2, index, abs_tol):
    """Eigenvalue of one tridiagonal by order index (0 = smallest)."""
    k = d.shape[0]
    lo = d[0]
    hi = d[0]
    for i in range(k):
        r = 0.0
        if i > 0:
            r += math.sqrt(e2[i - 1])
        if i < k - 1:
            r += math.sqrt(e2[i])
        if d[i] - r < lo:
            lo = d[i] - r
        if d[i] + r > hi:
            hi = d[i] + r
    pivmin = 1e-300
    for i in range(k - 1):
        g = e2[i] * 1e-30
        if g > pivmin:
            pivmin = g
    width = hi - lo
    iters = 2
    while width > abs_tol and iters < 200:
        width *= 0.5
        iters += 1
    a = lo
    b = hi
    for _ in range(iters):
        mid = 0.5 * (a + b)
        count = 0
        piv = d[0] - mid
        if abs(piv) < pivmin:
            piv = -pivmin
        if piv < 0.0:
            count += 1
        for i in range(1, k):
            piv = (d[i] - mid) - e2[i - 1] / piv
            if abs(piv) < pivmin:
                piv = -pivmin
            if piv < 0.0:
                count += 1
        if count >= index + 1:
            b = mid
        else:
            a = mid
    return 0.5 * (a + b)


ABS_TOL = 1e-10


def extreme_eigenvalues(t: TridiagonalMatrix, full_spectrum: bool = False) -> EigenSample:
    """Largest and smallest eigenvalues to absolute tolerance 1e-10;
    optionally the full sorted spectrum (one bisection per index)."""
    d = t.diagonal.reshape(1, -1)
    e2 = (t.off_diagonal ** 2).reshape(1, -1)
    res = _bisect_extremes(d, e2, ABS_TOL)
    spectrum = None
    if full_spectrum:
        spectrum = np.array([
            _bisect_index(t.diagonal, t.off_diagonal ** 2, i, ABS_TOL)
            for i in range(t.dimension)
        ])
    return EigenSample(t.dimension, float(res[0, 1]), float(res[0, 0]), spectrum)


def sample_extremes(k: int, n_samples: int, stream: RngStream) -> np.ndarray:
    """(n_samples, 2) array of (lambda_min, lambda_max) draws.

    Draws each tridiagonal sequentially from the stream (so sample i's
    matrix never depends on n_samples), then solves the batch at once.
    """
    if n_samples < 1:
        raise ValidationError(f"n_samples must be >= 1, got {n_samples}")
    d = np.empty((n_samples, k))
    e2 = np.empty((n_samples, max(k - 1, 1)))
    if k == 1:
        e2[:] = 0.0
    for i in range(n_samples):
        t = sample_gue_tridiagonal(k, stream)
        d[i] = t.diagonal
        if k > 1:
            e2[i] = t.off_diagonal ** 2
    if k == 1:
        lam = d[:, 0]
        return np.stack([lam, lam], axis=1)
    return _bisect_extremes(d, e2, ABS_TOL)


def scaled_edge_sample(k: int, n_samples: int, stream: RngStream) -> np.ndarray:
    """n_samples iid draws of (lambda_max - 2 sqrt(k)) k^(1/6)."""
    lam = sample_extremes(k, n_samples, stream)[:, 1]
    return (lam - 2.0 * np.sqrt(k)) * k ** (1.0 / 6.0)
