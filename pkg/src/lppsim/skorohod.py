"""Brownian embedding of mean-zero discrete laws.

The construction is the randomized exit-interval embedding: pick a
pair (u, v) with u < 0 < v from a joint law proportional to
(v - u) * mu(u) * mu(v), then stop Brownian motion at the first exit
from (u, v).  Gambler's-ruin exit probabilities make the stopped
value reproduce mu exactly, which is checked in closed form at build
time.  An atom at 0 stops immediately and is carried separately.

Exit times are simulated by Euler steps with a Brownian-bridge
crossing correction, which removes the O(sqrt(dt)) bias of naive
barrier detection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from numba import njit

from .errors import NumericalConsistencyError, ParameterError, ValidationError
from .weights import RngStream, WeightDistribution

_MEAN_TOL = 1e-12
_MARGINAL_TOL = 1e-12
# block sizes are fixed constants: changing them would change which
# generator draws each path consumes, breaking reproducibility
_NORMAL_BLOCK = 16384
_UNIFORM_BLOCK = 4096
_BRIDGE_LOG_CUTOFF = -30.0


@dataclass(frozen=True)
class ExitIntervalLaw:
    """Randomizing measure over exit intervals for one target law.

    negative/positive hold the strictly negative and strictly positive
    atoms with their target probabilities.  joint[r, s] is the
    probability of selecting interval (negative[r], positive[s]),
    normalized to sum to 1 - p_zero together with the zero atom.
    """

    negative: np.ndarray
    negative_prob: np.ndarray
    positive: np.ndarray
    positive_prob: np.ndarray
    joint: np.ndarray
    p_zero: float
    # cumulative over (p_zero, joint.ravel()) used for selection
    selection_cdf: np.ndarray

    @property
    def n_intervals(self) -> int:
        return self.joint.size


@dataclass(frozen=True)
class StoppingRecord:
    """One embedding draw: the selected interval and the stopped path.

    For the zero atom the record is degenerate by convention:
    interval (0.0, 0.0), tau 0.0, b_tau 0.0.  All other records have
    u < 0 < v, b_tau in {u, v}, and tau > 0.
    """

    interval: tuple
    tau: float
    b_tau: float


AtomSpec = Union[WeightDistribution, Sequence]


def _atom_list(target: AtomSpec) -> list:
    if isinstance(target, WeightDistribution):
        atoms = target.atoms()
        if atoms is None:
            raise ValidationError(
                f"target {target.variant!r} is not a finite discrete law; "
                "only finitely supported targets can be embedded")
        return atoms
    atoms = [(float(x), float(p)) for x, p in target]
    return atoms


def build_exit_law(target: AtomSpec) -> ExitIntervalLaw:
    """Construct the exit-interval law for a finite mean-zero target.

    Accepts a WeightDistribution with finite support or an explicit
    [(value, prob), ...] list.  The closed-form marginal of the
    construction is compared against the target atom by atom; any
    discrepancy beyond 1e-12 raises a numerical-consistency error.
    """
    atoms = _atom_list(target)
    if not atoms:
        raise ValidationError("target has no atoms")
    values = np.array([a[0] for a in atoms], dtype=np.float64)
    probs = np.array([a[1] for a in atoms], dtype=np.float64)
    if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-9:
        raise ValidationError("atom probabilities must be >= 0 and sum to 1")
    if values.size != np.unique(values).size:
        raise ValidationError("duplicate atoms in target")
    mean = float(np.dot(values, probs))
    if abs(mean) > _MEAN_TOL:
        raise ParameterError(
            f"target must have mean 0, got mean {mean:.3e}")

    neg = values < 0
    pos = values > 0
    zero = ~neg & ~pos
    p_zero = float(probs[zero].sum())
    u = values[neg]
    a = probs[neg]
    v = values[pos]
    b = probs[pos]
    if u.size == 0 or v.size == 0:
        if p_zero == 1.0:
            # point mass at 0: embedding stops immediately
            sel = np.array([1.0])
            return ExitIntervalLaw(
                negative=u, negative_prob=a, positive=v, positive_prob=b,
                joint=np.zeros((0, 0)), p_zero=1.0, selection_cdf=sel)
        raise ValidationError(
            "mean-zero target needs atoms on both sides of 0")

    # joint weight (v - u) * mu(u) * mu(v); its total mass is
    # m_plus * (mass(neg) + mass(pos)) with m_plus = sum(v * mu(v))
    diff = v[None, :] - u[:, None]
    raw = diff * a[:, None] * b[None, :]
    joint = raw / raw.sum() * (1.0 - p_zero)

    # closed-form marginal: P(B_tau = u_r) must equal mu(u_r) exactly
    hit_low = joint * (v[None, :] / diff)
    hit_high = joint * (-u[:, None] / diff)
    err_low = np.max(np.abs(hit_low.sum(axis=1) - a))
    err_high = np.max(np.abs(hit_high.sum(axis=0) - b))
    if max(err_low, err_high) > _MARGINAL_TOL:
        raise NumericalConsistencyError(
            "exit-interval marginals do not reproduce the target: "
            f"max atom error {max(err_low, err_high):.3e}")

    sel = np.concatenate([[p_zero], p_zero + np.cumsum(joint.ravel())])
    sel[-1] = 1.0
    return ExitIntervalLaw(
        negative=u, negative_prob=a, positive=v, positive_prob=b,
        joint=joint, p_zero=p_zero, selection_cdf=sel)


@njit(cache=True, nogil=True)
def _exit_walk_kernel(u, v, dt, fstate, istate, normals, uniforms):
    """Resumable Euler walk on (u, v) with bridge crossing correction.

    fstate: [x]; istate: [n_steps, i_norm, i_unif].  Returns 0 when
    the walk stopped (fstate[0] is the exit barrier), 1 when the
    normal block is exhausted, 2 when the uniform block is exhausted.
    The caller refills the exhausted block and calls again.
    """
    x = fstate[0]
    n_steps = istate[0]
    i_n = istate[1]
    i_u = istate[2]
    n_norm = normals.shape[0]
    n_unif = uniforms.shape[0]
    sqrt_dt = np.sqrt(dt)
    status = 0
    while True:
        if i_n >= n_norm:
            status = 1
            break
        if i_u + 2 > n_unif:
            # a step can need two bridge uniforms; refill before drawing
            status = 2
            break
        x_new = x + sqrt_dt * normals[i_n]
        i_n += 1
        n_steps += 1
        if x_new >= v:
            x = v
            break
        if x_new <= u:
            x = u
            break
        # bridge correction, upper barrier then lower barrier
        log_p_up = -2.0 * (v - x) * (v - x_new) / dt
        if log_p_up > _BRIDGE_LOG_CUTOFF:
            hit = uniforms[i_u] < np.exp(log_p_up)
            i_u += 1
            if hit:
                x = v
                break
        log_p_dn = -2.0 * (x - u) * (x_new - u) / dt
        if log_p_dn > _BRIDGE_LOG_CUTOFF:
            hit = uniforms[i_u] < np.exp(log_p_dn)
            i_u += 1
            if hit:
                x = u
                break
        x = x_new
    fstate[0] = x
    istate[0] = n_steps
    istate[1] = i_n
    istate[2] = i_u
    return status


def _select_interval(law: ExitIntervalLaw, sel: float) -> tuple:
    idx = int(np.searchsorted(law.selection_cdf, sel, side="right")) - 1
    idx = min(max(idx, 0), law.n_intervals - 1)
    r, s = divmod(idx, law.positive.size)
    return float(law.negative[r]), float(law.positive[s])


def simulate_embedding(law: ExitIntervalLaw, stream: RngStream,
                       dt: float = 1e-4) -> StoppingRecord:
    """Draw one (tau, B_tau) pair from the embedding."""
    if not 0.0 < dt <= 1e-4:
        raise ParameterError(f"dt must be in (0, 1e-4], got {dt}")
    gen = stream.generator
    sel = float(gen.random())
    if sel < law.p_zero or law.n_intervals == 0:
        return StoppingRecord(interval=(0.0, 0.0), tau=0.0, b_tau=0.0)
    u, v = _select_interval(law, sel)

    fstate = np.zeros(1, dtype=np.float64)
    istate = np.zeros(3, dtype=np.int64)
    normals = gen.standard_normal(_NORMAL_BLOCK)
    uniforms = gen.random(_UNIFORM_BLOCK)
    while True:
        status = _exit_walk_kernel(u, v, dt, fstate, istate, normals, uniforms)
        if status == 0:
            break
        if status == 1:
            normals = gen.standard_normal(_NORMAL_BLOCK)
            istate[1] = 0
        else:
            uniforms = gen.random(_UNIFORM_BLOCK)
            istate[2] = 0
    return StoppingRecord(interval=(u, v),
                          tau=float(istate[0]) * dt,
                          b_tau=float(fstate[0]))


def embedded_walk(law: ExitIntervalLaw, stream: RngStream, n: int,
                  dt: float = 1e-4) -> np.ndarray:
    """Cumulative sums of n independent embedding draws.

    Distributionally equal to the n-step random walk of the target law.
    """
    if n < 1:
        raise ParameterError(f"walk length must be >= 1, got {n}")
    increments = np.empty(n, dtype=np.float64)
    for i in range(n):
        increments[i] = simulate_embedding(law, stream, dt).b_tau
    return np.cumsum(increments)


def write_stopping_records_csv(records: Sequence[StoppingRecord],
                               fileobj) -> None:
    fileobj.write("tau,b_tau\n")
    for rec in records:
        fileobj.write(f"{rec.tau!r},{rec.b_tau!r}\n")
