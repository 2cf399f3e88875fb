"""Directed passage values on an N x k weight lattice.

Four functionals, two families:

* theorem form L / R: optimize over nondecreasing column partitions
  0 = i_0 <= ... <= i_k = N, row j summing the disjoint segment
  (i_{j-1}, i_j]; rows may be skipped entirely.
* path form L_last / L_first: optimize over up/right lattice paths from
  (1,1) to (N,k); junction columns are shared between adjacent rows.

The DP kernels fold weights in a fixed sequential order so results match
the brute-force oracle bit for bit; see _kernels for the contract.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Optional

import numpy as np

from . import _kernels
from .errors import OracleScopeError, ValidationError
from .weights import RngStream, WeightDistribution, from_config

KINDS = ("L", "R", "L_last", "L_first")

ORACLE_MAX_N = 10
ORACLE_MAX_K = 5


@dataclass(frozen=True)
class WeightMatrix:
    """Realized weights. values[j, i] is the weight of column i+1 at level
    j+1 (shape (n_rows, n_cols) = (k, N)); provenance remembers how the
    matrix was drawn."""

    values: np.ndarray
    provenance: tuple = (None, None, None)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise ValidationError(f"weight matrix must be 2-d and nonempty, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValidationError("weight matrix entries must all be finite")
        object.__setattr__(self, "values", v)

    @property
    def n_cols(self) -> int:
        return self.values.shape[1]

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    def transpose(self) -> "WeightMatrix":
        return WeightMatrix(self.values.T.copy(), self.provenance)


def sample_weight_matrix(dist: WeightDistribution, n_cols: int, n_rows: int,
                         stream: RngStream) -> WeightMatrix:
    draws = dist.sample(stream, n_cols * n_rows)
    values = draws.reshape(n_rows, n_cols)
    return WeightMatrix(values, (dist.to_config(), stream.seed, stream.stream_id))


@dataclass(frozen=True)
class PassageResult:
    value: float
    kind: str
    optimal_partition: Optional[tuple] = None


def last_passage_theorem_form(w: WeightMatrix, recover: bool = False) -> PassageResult:
    if recover:
        return _theorem_recover(w, maximize=True)
    return PassageResult(float(_kernels.theorem_last(w.values)), "L")


def first_passage_theorem_form(w: WeightMatrix, recover: bool = False) -> PassageResult:
    if recover:
        return _theorem_recover(w, maximize=False)
    return PassageResult(float(_kernels.theorem_first(w.values)), "R")


def last_passage_path_form(w: WeightMatrix, recover: bool = False) -> PassageResult:
    if recover:
        return _path_recover(w, maximize=True)
    return PassageResult(float(_kernels.path_last(w.values)), "L_last")


def first_passage_path_form(w: WeightMatrix, recover: bool = False) -> PassageResult:
    if recover:
        return _path_recover(w, maximize=False)
    return PassageResult(float(_kernels.path_first(w.values)), "L_first")


def evaluate_theorem_partition(w: WeightMatrix, partition) -> float:
    """Objective of a theorem-form partition, folded in the DP's order."""
    part = tuple(int(p) for p in partition)
    k, N = w.n_rows, w.n_cols
    if len(part) != k + 1 or part[0] != 0 or part[-1] != N or any(
            part[j] > part[j + 1] for j in range(k)):
        raise ValidationError(f"not a valid theorem-form partition for {N}x{k}: {part}")
    X = w.values
    acc = 0.0
    for j in range(k):
        for i in range(part[j], part[j + 1]):
            acc = acc + X[j, i]
    return acc


def evaluate_path_partition(w: WeightMatrix, partition) -> float:
    """Objective of a path-form junction partition 1=i_0<=...<=i_k=N,
    row j covering columns [i_{j-1}, i_j], folded in path order."""
    part = tuple(int(p) for p in partition)
    k, N = w.n_rows, w.n_cols
    if len(part) != k + 1 or part[0] != 1 or part[-1] != N or any(
            part[j] > part[j + 1] for j in range(k)):
        raise ValidationError(f"not a valid path-form partition for {N}x{k}: {part}")
    X = w.values
    acc = 0.0
    for j in range(k):
        for i in range(part[j], part[j + 1] + 1):
            acc = acc + X[j, i - 1]
    return acc


def _theorem_recover(w: WeightMatrix, maximize: bool) -> PassageResult:
    # full table plus a feasibility sweep over the tie DAG; the greedy
    # forward walk then takes the earliest feasible row switch, which is
    # the lexicographically smallest optimal partition
    X = w.values
    k, N = w.n_rows, w.n_cols
    T = _kernels.theorem_table(X, maximize)
    reach = np.zeros((N + 1, k + 1), dtype=bool)
    reach[N, k] = True
    for j in range(k, -1, -1):
        for m in range(N, -1, -1):
            if reach[m, j]:
                continue
            ok = False
            if m < N and j >= 1 and reach[m + 1, j] and T[m + 1, j] == T[m, j] + X[j - 1, m]:
                ok = True
            if not ok and j < k and reach[m, j + 1] and T[m, j + 1] == T[m, j]:
                ok = True
            reach[m, j] = ok
    part = [0]
    m, j = 0, 0
    while (m, j) != (N, k):
        if j < k and T[m, j + 1] == T[m, j] and reach[m, j + 1]:
            if j >= 1:
                part.append(m)
            j += 1
        elif m < N and j >= 1 and T[m + 1, j] == T[m, j] + X[j - 1, m] and reach[m + 1, j]:
            m += 1
        else:  # pragma: no cover - the DP guarantees a feasible walk
            raise AssertionError("recovery walk stuck; inconsistent DP tables")
    part.append(N)
    kind = "L" if maximize else "R"
    return PassageResult(float(T[N, k]), kind, tuple(part))


def _path_recover(w: WeightMatrix, maximize: bool) -> PassageResult:
    X = w.values
    k, N = w.n_rows, w.n_cols
    G = _kernels.path_table(X, maximize)
    reach = np.zeros((N, k), dtype=bool)
    reach[N - 1, k - 1] = True
    for j in range(k - 1, -1, -1):
        for i in range(N - 1, -1, -1):
            if reach[i, j]:
                continue
            ok = False
            if i + 1 < N and reach[i + 1, j] and G[i + 1, j] == X[j, i + 1] + G[i, j]:
                ok = True
            if not ok and j + 1 < k and reach[i, j + 1] and G[i, j + 1] == X[j + 1, i] + G[i, j]:
                ok = True
            reach[i, j] = ok
    part = [1]
    i, j = 0, 0
    while (i, j) != (N - 1, k - 1):
        if j + 1 < k and reach[i, j + 1] and G[i, j + 1] == X[j + 1, i] + G[i, j]:
            part.append(i + 1)
            j += 1
        elif i + 1 < N and reach[i + 1, j] and G[i + 1, j] == X[j, i + 1] + G[i, j]:
            i += 1
        else:  # pragma: no cover
            raise AssertionError("recovery walk stuck; inconsistent DP tables")
    part.append(N)
    kind = "L_last" if maximize else "L_first"
    return PassageResult(float(G[N - 1, k - 1]), kind, tuple(part))


def brute_force_oracle(w: WeightMatrix, kind: str) -> PassageResult:
    """Exhaustive enumeration of partitions/paths; the exact optimum with
    the lexicographically smallest witness. Small instances only."""
    if kind not in KINDS:
        raise ValidationError(f"kind must be one of {KINDS}, got {kind!r}")
    k, N = w.n_rows, w.n_cols
    if N > ORACLE_MAX_N or k > ORACLE_MAX_K:
        raise OracleScopeError(
            f"oracle limited to N<={ORACLE_MAX_N}, k<={ORACLE_MAX_K}; got N={N}, k={k}")
    maximize = kind in ("L", "L_last")
    theorem = kind in ("L", "R")
    if theorem:
        candidates = combinations_with_replacement(range(N + 1), k - 1)
        evaluate = evaluate_theorem_partition
        bounds = (0, N)
    else:
        candidates = combinations_with_replacement(range(1, N + 1), k - 1)
        evaluate = evaluate_path_partition
        bounds = (1, N)
    best = None
    best_part = None
    for inner in candidates:
        part = (bounds[0],) + inner + (bounds[1],)
        val = evaluate(w, part)
        if best is None or (val > best if maximize else val < best):
            best = val
            best_part = part
    return PassageResult(best, kind, best_part)


def selection_bounds(w: WeightMatrix) -> tuple[float, float]:
    """(min, max) over nondecreasing selections 1<=i_1<=...<=i_{k-1}<=N of
    sum_j X_{i_j}^{j+1}; for k=1 both are 0. L_last - L never exceeds the
    max; it is bounded below by the min only when some optimal
    disjoint-segment partition keeps row 1 nonempty (a partition that
    skips a leading block of rows has no junction counterpart, so the
    two-sided bound can fail; see the pinned test instance)."""
    X = w.values
    k, N = w.n_rows, w.n_cols
    if k == 1:
        return 0.0, 0.0
    lo = X[1].copy()
    hi = X[1].copy()
    for j in range(2, k):
        lo = np.minimum.accumulate(lo) + X[j]
        hi = np.maximum.accumulate(hi) + X[j]
    return float(lo.min()), float(hi.max())


def write_weight_matrix_csv(w: WeightMatrix, fileobj) -> None:
    writer = csv.writer(fileobj, lineterminator="\n")
    writer.writerow(["n_cols", "n_rows", "distribution", "seed", "stream_id"])
    dist, seed, stream_id = w.provenance
    writer.writerow([w.n_cols, w.n_rows,
                     json.dumps(dist) if dist is not None else "",
                     "" if seed is None else seed,
                     "" if stream_id is None else stream_id])
    for row in w.values:
        writer.writerow([repr(float(x)) for x in row])


def read_weight_matrix_csv(fileobj) -> WeightMatrix:
    reader = csv.reader(fileobj)
    header = next(reader, None)
    if header != ["n_cols", "n_rows", "distribution", "seed", "stream_id"]:
        raise ValidationError("not a weight-matrix CSV: bad header")
    meta = next(reader, None)
    if meta is None or len(meta) != 5:
        raise ValidationError("not a weight-matrix CSV: bad metadata row")
    n_cols, n_rows = int(meta[0]), int(meta[1])
    dist = json.loads(meta[2]) if meta[2] else None
    seed = int(meta[3]) if meta[3] else None
    stream_id = int(meta[4]) if meta[4] else None
    rows = [[float(x) for x in row] for row in reader if row]
    values = np.array(rows, dtype=np.float64)
    if values.shape != (n_rows, n_cols):
        raise ValidationError(
            f"value grid shape {values.shape} does not match header ({n_rows}, {n_cols})")
    if dist is not None:
        from_config(dist)  # validate the descriptor round-trips
    return WeightMatrix(values, (dist, seed, stream_id))
