"""Weight distributions with exact moment metadata and reproducible
counter-based sampling streams.

Every distribution here has a finite fourth moment and knows its mean,
variance and fourth central moment in closed form, so downstream
centering/scaling never estimates what is analytically available.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .errors import ParameterError, ValidationError


class RngStream:
    """Counter-based random stream: (seed, stream_id) fully determine the
    output sequence, independent of scheduling or worker placement.

    Backed by Philox with key = (seed, stream_id). Distinct stream_ids give
    statistically independent streams; equal pairs give identical bytes.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        if not (0 <= int(seed) < 2**64):
            raise ParameterError(f"seed must be a 64-bit unsigned integer, got {seed}")
        if not (0 <= int(stream_id) < 2**64):
            raise ParameterError(f"stream_id must be a 64-bit unsigned integer, got {stream_id}")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        self._bitgen = np.random.Philox(key=key)
        self.generator = np.random.Generator(self._bitgen)

    @property
    def state(self) -> dict:
        """Current counter state (advances as draws are consumed)."""
        return self._bitgen.state

    def substream(self, index: int) -> "RngStream":
        """Deterministic child stream: jump 2^128 * (index+1) draws ahead.

        Children never overlap each other or the parent's own consumption;
        used for per-draw independence inside a single sample.
        """
        if index < 0:
            raise ParameterError("substream index must be nonnegative")
        child = RngStream.__new__(RngStream)
        child.seed = self.seed
        child.stream_id = self.stream_id
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        child._bitgen = np.random.Philox(key=key).jumped(index + 1)
        child.generator = np.random.Generator(child._bitgen)
        return child

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


_VARIANTS = ("gaussian", "exponential", "geometric", "rademacher", "uniform", "two_point")


@dataclass(frozen=True)
class WeightDistribution:
    """A sampleable iid weight law with analytically known moments.

    variant: one of gaussian / exponential / geometric / rademacher /
    uniform / two_point.  params holds the variant's own parameters;
    mean, variance, fourth_central_moment are derived at construction.
    """

    variant: str
    params: tuple
    mean: float = field(init=False)
    variance: float = field(init=False)
    fourth_central_moment: float = field(init=False)

    def __post_init__(self):
        if self.variant not in _VARIANTS:
            raise ParameterError(f"unknown distribution variant {self.variant!r}")
        m, v, m4 = _moments(self.variant, self.params)
        object.__setattr__(self, "mean", m)
        object.__setattr__(self, "variance", v)
        object.__setattr__(self, "fourth_central_moment", m4)

    @property
    def stddev(self) -> float:
        return float(np.sqrt(self.variance))

    def standardize(self) -> tuple[float, float]:
        """(mu, sigma) such that (X - mu)/sigma has mean 0 and variance 1."""
        return self.mean, self.stddev

    def sample(self, stream: RngStream, n: int) -> np.ndarray:
        return sample(self, stream, n)

    def atoms(self) -> list[tuple[float, float]] | None:
        """Finite atom list [(value, prob), ...] for discrete laws with
        finite support, else None."""
        if self.variant == "rademacher":
            return [(-1.0, 0.5), (1.0, 0.5)]
        if self.variant == "two_point":
            x1, p1, x2 = self.params
            return [(float(x1), float(p1)), (float(x2), 1.0 - float(p1))]
        return None

    def to_config(self) -> dict:
        keys = {
            "gaussian": ("mean", "stddev"),
            "exponential": ("rate",),
            "geometric": ("q",),
            "rademacher": (),
            "uniform": ("a", "b"),
            "two_point": ("x1", "p1", "x2"),
        }[self.variant]
        rec = {"type": self.variant}
        rec.update(zip(keys, self.params))
        return rec


def _moments(variant: str, params: tuple) -> tuple[float, float, float]:
    # validation happens here, at construction, so sampling can assume
    # well-formed parameters
    if variant == "gaussian":
        m, s = params
        if not s > 0:
            raise ParameterError(f"gaussian stddev must be > 0, got {s}")
        return float(m), float(s) ** 2, 3.0 * float(s) ** 4
    if variant == "exponential":
        (rate,) = params
        if not rate > 0:
            raise ParameterError(f"exponential rate must be > 0, got {rate}")
        return 1.0 / rate, 1.0 / rate**2, 9.0 / rate**4
    if variant == "geometric":
        # support {0,1,2,...}, P(X=n) = (1-q) q^n
        (q,) = params
        if not 0 < q < 1:
            raise ParameterError(f"geometric q must lie in (0,1), got {q}")
        p = 1.0 - q
        return q / p, q / p**2, q * (9.0 * q + p**2) / p**4
    if variant == "rademacher":
        if params:
            raise ParameterError("rademacher takes no parameters")
        return 0.0, 1.0, 1.0
    if variant == "uniform":
        a, b = params
        if not a < b:
            raise ParameterError(f"uniform interval needs a < b, got [{a}, {b}]")
        w = float(b) - float(a)
        return (float(a) + float(b)) / 2.0, w**2 / 12.0, w**4 / 80.0
    if variant == "two_point":
        x1, p1, x2 = params
        if not 0 < p1 < 1:
            raise ParameterError(f"two_point p1 must lie in (0,1), got {p1}")
        if x1 == x2:
            raise ParameterError("two_point needs x1 != x2")
        m = p1 * x1 + (1 - p1) * x2
        var = p1 * (x1 - m) ** 2 + (1 - p1) * (x2 - m) ** 2
        m4 = p1 * (x1 - m) ** 4 + (1 - p1) * (x2 - m) ** 4
        return float(m), float(var), float(m4)
    raise ParameterError(f"unknown distribution variant {variant!r}")


def gaussian(mean: float = 0.0, stddev: float = 1.0) -> WeightDistribution:
    return WeightDistribution("gaussian", (float(mean), float(stddev)))


def exponential(rate: float = 1.0) -> WeightDistribution:
    return WeightDistribution("exponential", (float(rate),))


def geometric(q: float) -> WeightDistribution:
    return WeightDistribution("geometric", (float(q),))


def rademacher() -> WeightDistribution:
    return WeightDistribution("rademacher", ())


def uniform_interval(a: float, b: float) -> WeightDistribution:
    return WeightDistribution("uniform", (float(a), float(b)))


def two_point(x1: float, p1: float, x2: float) -> WeightDistribution:
    return WeightDistribution("two_point", (float(x1), float(p1), float(x2)))


def sample(dist: WeightDistribution, stream: RngStream, n: int) -> np.ndarray:
    """n iid draws from dist, as float64; deterministic given the stream."""
    if n < 1:
        raise ValidationError(f"sample size must be >= 1, got {n}")
    rng = stream.generator
    v = dist.variant
    if v == "gaussian":
        m, s = dist.params
        return m + s * rng.standard_normal(n)
    if v == "exponential":
        (rate,) = dist.params
        return rng.exponential(scale=1.0 / rate, size=n)
    if v == "geometric":
        (q,) = dist.params
        # numpy counts trials on {1,2,...}; shift to failures on {0,1,...}
        return (rng.geometric(p=1.0 - q, size=n) - 1).astype(np.float64)
    if v == "rademacher":
        return (rng.integers(0, 2, size=n) * 2 - 1).astype(np.float64)
    if v == "uniform":
        a, b = dist.params
        return rng.uniform(a, b, size=n)
    if v == "two_point":
        x1, p1, x2 = dist.params
        return np.where(rng.random(n) < p1, x1, x2)
    raise ParameterError(f"unknown distribution variant {v!r}")


def from_config(record: dict) -> WeightDistribution:
    """Build a distribution from a tagged config record,
    e.g. {"type": "exponential", "rate": 1.0}."""
    if not isinstance(record, dict) or "type" not in record:
        raise ValidationError(f"distribution record must be a dict with a 'type' key, got {record!r}")
    kind = record["type"]
    extra = {k: v for k, v in record.items() if k != "type"}
    try:
        if kind == "gaussian":
            return gaussian(extra.pop("mean", 0.0), extra.pop("stddev", 1.0))
        if kind == "exponential":
            return exponential(extra.pop("rate", 1.0))
        if kind == "geometric":
            return geometric(extra.pop("q"))
        if kind == "rademacher":
            return rademacher()
        if kind == "uniform":
            return uniform_interval(extra.pop("a"), extra.pop("b"))
        if kind == "two_point":
            return two_point(extra.pop("x1"), extra.pop("p1"), extra.pop("x2"))
    except KeyError as exc:
        raise ValidationError(f"distribution record {record!r} missing parameter {exc}") from None
    finally:
        if extra and kind in _VARIANTS:
            raise ValidationError(f"unknown parameters {sorted(extra)} for distribution {kind!r}")
    raise ValidationError(f"unknown distribution type {kind!r}")
