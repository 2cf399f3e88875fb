"""Discretized path space: the sup/inf passage functionals, the min/max
convolution operations, and the recursive path transform built from them.

Paths are piecewise linear on a uniform grid over [0,1] and start at 0.
For such paths every inf/sup below is attained at a grid vertex, so the
grid-restricted optimum is the continuum optimum, exactly.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DimensionError, ValidationError
from .weights import RngStream


@dataclass(frozen=True)
class DiscretePath:
    """Piecewise-linear function on [0,1]: values[m] at t = m/M, values[0]=0."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1 or v.size < 2:
            raise ValidationError(f"path needs at least 2 grid values, got shape {v.shape}")
        if v[0] != 0.0:
            raise ValidationError(f"paths start at 0, got values[0] = {v[0]}")
        if not np.all(np.isfinite(v)):
            raise ValidationError("path values must all be finite")
        object.__setattr__(self, "values", v)

    @property
    def m_steps(self) -> int:
        return self.values.size - 1

    @property
    def grid(self) -> np.ndarray:
        return np.arange(self.values.size) / self.m_steps

    def __call__(self, t: float) -> float:
        """Piecewise-linear evaluation at t in [0,1]."""
        if not 0.0 <= t <= 1.0:
            raise ValidationError(f"t must lie in [0,1], got {t}")
        return float(np.interp(t, self.grid, self.values))


@dataclass(frozen=True)
class PathEnsemble:
    """k paths on a common grid."""

    paths: tuple

    def __post_init__(self):
        if len(self.paths) < 1:
            raise ValidationError("ensemble needs at least one path")
        m = self.paths[0].m_steps
        if any(p.m_steps != m for p in self.paths):
            raise DimensionError("ensemble paths must share one grid")
        object.__setattr__(self, "paths", tuple(self.paths))

    @property
    def k(self) -> int:
        return len(self.paths)

    @property
    def m_steps(self) -> int:
        return self.paths[0].m_steps

    def values(self) -> np.ndarray:
        """(k, M+1) array of grid values."""
        return np.stack([p.values for p in self.paths])

    def increments(self) -> np.ndarray:
        """(k, M) array of grid-cell increments."""
        return np.diff(self.values(), axis=1)

    @staticmethod
    def from_values(values: np.ndarray) -> "PathEnsemble":
        values = np.asarray(values, dtype=np.float64)
        if values.ndim != 2:
            raise DimensionError(f"expected a (k, M+1) array, got shape {values.shape}")
        return PathEnsemble(tuple(DiscretePath(row) for row in values))


def brownian_path(stream: RngStream, m_steps: int) -> DiscretePath:
    """Standard Brownian motion sampled on the grid: increments g/sqrt(M)."""
    if m_steps < 1:
        raise ValidationError(f"m_steps must be >= 1, got {m_steps}")
    inc = stream.generator.standard_normal(m_steps) / np.sqrt(m_steps)
    values = np.concatenate(([0.0], np.cumsum(inc)))
    return DiscretePath(values)


def brownian_ensemble(stream: RngStream, k: int, m_steps: int) -> PathEnsemble:
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    return PathEnsemble(tuple(brownian_path(stream, m_steps) for _ in range(k)))


def otimes(f: DiscretePath, g: DiscretePath) -> DiscretePath:
    """(f otimes g)(t) = inf_{s<=t} [f(s) + g(t) - g(s)], the queueing
    (min) convolution; O(M) running minimum."""
    if f.m_steps != g.m_steps:
        raise DimensionError("operand paths must share one grid")
    out = g.values + np.minimum.accumulate(f.values - g.values)
    return DiscretePath(out)


def odot(f: DiscretePath, g: DiscretePath) -> DiscretePath:
    """(f odot g)(t) = sup_{s<=t} [f(s) + g(t) - g(s)], the max counterpart."""
    if f.m_steps != g.m_steps:
        raise DimensionError("operand paths must share one grid")
    out = g.values + np.maximum.accumulate(f.values - g.values)
    return DiscretePath(out)


def gamma_k(ensemble: PathEnsemble) -> PathEnsemble:
    """The recursive transform: coordinate 1 is the full min-convolution
    f_1 ox f_2 ox ... ox f_k (left to right); the remaining coordinates are
    the transform of (f_2 odot f_1, f_3 odot (f_1 ox f_2), ...,
    f_k odot (f_1 ox ... ox f_{k-1})).

    Conserves the coordinate sum pointwise; on Brownian ensembles the
    output endpoints are ordered bottom to top.
    """
    if ensemble.k < 2:
        raise ValidationError(f"transform needs k >= 2 coordinates, got k={ensemble.k}")
    return PathEnsemble(tuple(_gamma_rec(list(ensemble.paths))))


def _gamma_rec(fs: list) -> list:
    if len(fs) == 1:
        return fs
    prefix = fs[0]
    rest = []
    for f in fs[1:]:
        rest.append(odot(f, prefix))
        prefix = otimes(prefix, f)
    return [prefix] + _gamma_rec(rest)


def g_sup(ensemble: PathEnsemble) -> float:
    """sup over 0=t_0<=t_1<=...<=t_k=1 of sum_j (f_j(t_j) - f_j(t_{j-1})).

    Exact for the piecewise-linear ensemble: the optimum is attained at
    grid vertices, and on the grid this is the theorem-form passage DP
    applied to the increment matrix.
    """
    return float(_kernels.theorem_last(ensemble.increments()))


def g_inf(ensemble: PathEnsemble) -> float:
    """inf analogue of g_sup; equals -g_sup of the negated ensemble."""
    return float(_kernels.theorem_first(ensemble.increments()))


def negate(ensemble: PathEnsemble) -> PathEnsemble:
    return PathEnsemble.from_values(-ensemble.values())


def sup_norm_distance(a: PathEnsemble, b: PathEnsemble) -> float:
    """Sum over coordinates of the sup over grid points of |a_j - b_j|."""
    av, bv = a.values(), b.values()
    if av.shape != bv.shape:
        raise DimensionError(f"ensemble shapes differ: {av.shape} vs {bv.shape}")
    return float(np.abs(av - bv).max(axis=1).sum())


def write_ensemble_csv(ensemble: PathEnsemble, fileobj) -> None:
    writer = csv.writer(fileobj, lineterminator="\n")
    k, m = ensemble.k, ensemble.m_steps
    writer.writerow(["t"] + [f"f{j}" for j in range(1, k + 1)])
    vals = ensemble.values()
    for i in range(m + 1):
        writer.writerow([repr(i / m)] + [repr(float(x)) for x in vals[:, i]])
