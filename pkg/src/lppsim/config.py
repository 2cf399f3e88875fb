"""Experiment configuration: a frozen, JSON-round-trippable record.

Every randomized quantity in an experiment is derived from (seed,
stream id), so a config plus the library version pins all emitted
numerics bit-exactly regardless of worker count.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

from .errors import ParameterError, ValidationError
from .weights import from_config

EXPERIMENT_KINDS = (
    "clt_theorem_form",
    "clt_corollary",
    "gue_edge",
    "gamma_transform",
    "time_constant",
    "tw_table",
    "skorohod_check",
)

_DEFAULT_DIST = {"type": "gaussian", "mean": 0.0, "stddev": 1.0}


@dataclass(frozen=True)
class ExperimentConfig:
    """Inputs of one experiment run.

    k_schedule holds one or more row counts (and doubles as the
    n-schedule for square-shape time-constant runs).  variant selects
    a kind-specific mode: "last"/"first" for the CLT kinds,
    "square"/"thin" for time_constant.  seed has no default: runs
    must be reproducible, so entropy-source seeding is not allowed.
    """

    kind: str
    seed: int
    distribution: dict = field(default_factory=lambda: dict(_DEFAULT_DIST))
    n_cols: int = 1
    k_schedule: tuple = (1,)
    samples: int = 1
    path_grid: int = 512
    workers: int = 1
    alpha: float = 0.05
    variant: str = ""
    dt: float = 1e-4
    output_path: Optional[str] = None
    quick: bool = False

    def __post_init__(self):
        if self.kind not in EXPERIMENT_KINDS:
            raise ValidationError(
                f"unknown experiment kind {self.kind!r}; "
                f"expected one of {EXPERIMENT_KINDS}")
        if not isinstance(self.seed, int):
            raise ValidationError("seed must be set explicitly as an integer")
        if self.seed < 0:
            raise ValidationError(f"seed must be >= 0, got {self.seed}")
        if self.n_cols < 1:
            raise ValidationError(f"n_cols must be >= 1, got {self.n_cols}")
        ks = tuple(int(k) for k in self.k_schedule)
        if not ks or any(k < 1 for k in ks):
            raise ValidationError(
                f"k_schedule must be nonempty with entries >= 1, got {ks}")
        object.__setattr__(self, "k_schedule", ks)
        if self.samples < 1:
            raise ValidationError(f"samples must be >= 1, got {self.samples}")
        if self.path_grid < 1:
            raise ValidationError(
                f"path_grid must be >= 1, got {self.path_grid}")
        if self.workers < 1:
            raise ValidationError(f"workers must be >= 1, got {self.workers}")
        if not 0.0 < self.alpha < 1.0:
            raise ValidationError(f"alpha must be in (0, 1), got {self.alpha}")
        if not 0.0 < self.dt <= 1e-4:
            raise ValidationError(f"dt must be in (0, 1e-4], got {self.dt}")
        from_config(self.distribution)  # validates the descriptor

    def regime_exponents(self) -> dict:
        """log k / log N per scheduled k, for thin-regime bookkeeping."""
        if self.n_cols <= 1:
            return {str(k): None for k in self.k_schedule}
        return {str(k): math.log(k) / math.log(self.n_cols) if k > 1 else 0.0
                for k in self.k_schedule}

    def to_json_dict(self) -> dict:
        rec = asdict(self)
        rec["k_schedule"] = list(self.k_schedule)
        return rec

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2)


def config_from_dict(record: dict) -> ExperimentConfig:
    if not isinstance(record, dict):
        raise ValidationError("config must be a JSON object")
    known = set(ExperimentConfig.__dataclass_fields__)
    unknown = set(record) - known
    if unknown:
        raise ValidationError(f"unknown config keys: {sorted(unknown)}")
    if "kind" not in record or "seed" not in record:
        raise ValidationError("config requires 'kind' and 'seed'")
    rec = dict(record)
    if "k_schedule" in rec:
        sched = rec["k_schedule"]
        if isinstance(sched, int):
            sched = [sched]
        rec["k_schedule"] = tuple(sched)
    try:
        return ExperimentConfig(**rec)
    except TypeError as exc:
        raise ValidationError(f"malformed config: {exc}") from exc


def config_from_json(text: str) -> ExperimentConfig:
    try:
        record = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config is not valid JSON: {exc}") from exc
    return config_from_dict(record)


def apply_overrides(config: ExperimentConfig, **overrides) -> ExperimentConfig:
    """New config with the given fields replaced (None values ignored)."""
    rec = config.to_json_dict()
    for key, value in overrides.items():
        if value is None:
            continue
        if key not in rec:
            raise ParameterError(f"unknown config field {key!r}")
        rec[key] = value
    return config_from_dict(rec)
