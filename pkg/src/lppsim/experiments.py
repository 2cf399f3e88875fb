"""Experiment pipelines: deterministic parallel Monte Carlo runs that
sample a passage functional, normalize it, and compare it against a
reference law, persisting a versioned JSON report.

Reproducibility scheme: every random object is drawn from a stream
keyed by (seed, stream id), with stream ids allocated in disjoint
purpose blocks of 2^32 and per-sample offsets equal to the sample
index.  Worker counts change scheduling only, never which stream a
sample reads, so reruns are byte-identical except for wall-clock.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from io import StringIO
from pathlib import Path
from typing import Callable, List, Optional

import numpy as np

from . import __version__
from .config import ExperimentConfig
from .errors import JobError, ParameterError, ValidationError
from .paths import brownian_ensemble, g_sup
from .percolation import (first_passage_path_form, first_passage_theorem_form,
                          last_passage_path_form, last_passage_theorem_form,
                          sample_weight_matrix)
from .rmt import sample_extremes, scaled_edge_sample
from .skorohod import build_exit_law, simulate_embedding, write_stopping_records_csv
from .stats import (center_scale_last_passage, center_scale_theorem_form,
                    ecdf_summary, ks_one_sample, ks_two_sample,
                    standard_normal_cdf)
from .timeconstants import (extrapolate_inverse_cuberoot,
                            predicted_constant_exponential,
                            predicted_constant_geometric, square_shape_point,
                            thin_rectangle_constant, write_shape_points_csv)
from .tracy_widom import default_table, f_gue, table_mean_variance, write_tw_table_csv
from .weights import RngStream, from_config

FORMAT_VERSION = 1

# stream-id purpose blocks; sample index is added within a block
_LPP_BLOCK = 1 << 32
_GUE_BLOCK = 2 << 32
_BROWNIAN_BLOCK = 3 << 32
_SKOROHOD_BLOCK = 4 << 32
_TIME_CONSTANT_BLOCK = 5 << 32
# schedule entries get sub-blocks so k-values never share streams
_SCHEDULE_STRIDE = 1 << 24


@dataclass
class ExperimentReport:
    """Result record; canonical bytes exclude wall-clock so reruns
    with identical configs compare byte-equal."""

    config: dict
    results: dict
    regime: dict
    library_version: str = __version__
    format_version: int = FORMAT_VERSION
    samples_csv: Optional[str] = None
    invalid: bool = False
    failure: Optional[str] = None
    non_acceptance: bool = False
    wall_clock_seconds: float = 0.0
    _csv_payload: Optional[str] = field(default=None, repr=False, compare=False)

    def _payload(self, canonical: bool) -> dict:
        config = self.config
        if canonical:
            # drop execution details that cannot change the numerics
            config = {k: v for k, v in config.items()
                      if k not in ("workers", "output_path")}
        rec = {
            "format_version": self.format_version,
            "library_version": self.library_version,
            "config": config,
            "regime": self.regime,
            "results": self.results,
            "invalid": self.invalid,
            "failure": self.failure,
            "non_acceptance": self.non_acceptance,
        }
        if not canonical:
            # the side-file name derives from output_path, so it is an
            # execution detail just like the path itself
            rec["samples_csv"] = self.samples_csv
            rec["wall_clock_seconds"] = self.wall_clock_seconds
        return rec

    def canonical_bytes(self) -> bytes:
        """Report bytes with wall-clock and scheduling details removed;
        reruns of one experiment compare equal on exactly these bytes."""
        return json.dumps(self._payload(True), sort_keys=True,
                          indent=2).encode("utf-8")

    def to_json(self) -> str:
        return json.dumps(self._payload(False), sort_keys=True, indent=2)


def report_from_json(text: str) -> ExperimentReport:
    try:
        rec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"report is not valid JSON: {exc}") from exc
    version = rec.get("format_version")
    if version != FORMAT_VERSION:
        raise ValidationError(
            f"unsupported report format version {version!r}; "
            f"this library reads version {FORMAT_VERSION}")
    return ExperimentReport(
        config=rec["config"], results=rec["results"], regime=rec["regime"],
        library_version=rec["library_version"], format_version=version,
        samples_csv=rec.get("samples_csv"), invalid=rec.get("invalid", False),
        failure=rec.get("failure"),
        non_acceptance=rec.get("non_acceptance", False),
        wall_clock_seconds=rec.get("wall_clock_seconds", 0.0))


def parallel_map(n_samples: int, workers: int, job: Callable) -> List:
    """Ordered [job(0), ..., job(n_samples-1)] over a thread pool.

    Content and order are identical to sequential execution; the
    worker count affects wall-clock only.  The first failing sample
    index (in index order) aborts the map as a JobError.
    """
    if workers < 1:
        raise ParameterError(f"workers must be >= 1, got {workers}")
    if n_samples < 0:
        raise ParameterError(f"n_samples must be >= 0, got {n_samples}")
    if n_samples == 0:
        return []
    if workers == 1:
        out = []
        for i in range(n_samples):
            try:
                out.append(job(i))
            except Exception as exc:
                raise JobError(i, exc) from exc
        return out
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(job, i) for i in range(n_samples)]
        out = []
        try:
            for i, fut in enumerate(futures):
                try:
                    out.append(fut.result())
                except Exception as exc:
                    raise JobError(i, exc) from exc
        finally:
            for fut in futures:
                fut.cancel()
    return out


def _summary_record(values: np.ndarray) -> dict:
    s = ecdf_summary(values)
    return {"n": s.n, "mean": s.mean, "variance": s.variance}


def _csv_from_rows(header: str, rows) -> str:
    buf = StringIO()
    buf.write(header + "\n")
    for row in rows:
        buf.write(",".join(repr(x) if isinstance(x, float) else str(x)
                           for x in row) + "\n")
    return buf.getvalue()


def _effective_samples(config: ExperimentConfig) -> int:
    if config.quick:
        return max(config.samples // 10, 1)
    return config.samples


def _clt_variant(config: ExperimentConfig) -> str:
    variant = config.variant or "last"
    if variant not in ("last", "first"):
        raise ValidationError(
            f"CLT experiments take variant 'last' or 'first', got {variant!r}")
    return variant


def _run_clt(config: ExperimentConfig, theorem_form: bool) -> tuple[dict, str]:
    dist = from_config(config.distribution)
    variant = _clt_variant(config)
    n = _effective_samples(config)
    big_n = config.n_cols
    results = {"per_k": []}
    rows = []
    for j, k in enumerate(config.k_schedule):
        lpp_base = _LPP_BLOCK + j * _SCHEDULE_STRIDE

        if theorem_form:
            passage = (last_passage_theorem_form if variant == "last"
                       else first_passage_theorem_form)
        else:
            passage = (last_passage_path_form if variant == "last"
                       else first_passage_path_form)

        def job(i: int, k=k, passage=passage, base=lpp_base) -> float:
            w = sample_weight_matrix(dist, big_n, k,
                                     RngStream(config.seed, base + i))
            return passage(w).value

        raw = np.array(parallel_map(n, config.workers, job))
        if theorem_form:
            scaled = center_scale_theorem_form(raw, big_n, k, kind=variant)
        else:
            mu, sigma = dist.standardize()
            scaled = center_scale_last_passage(raw, big_n, k, mu, sigma,
                                               kind=variant)
            # minimizing passage matches the edge law after reflection
            if variant == "first":
                scaled = -scaled
        gue = scaled_edge_sample(
            k, n, RngStream(config.seed, _GUE_BLOCK + j * _SCHEDULE_STRIDE))
        ks = ks_two_sample(scaled, gue, config.alpha)
        results["per_k"].append({
            "k": k,
            "variant": variant,
            "reflected": bool(not theorem_form and variant == "first"),
            "lpp_summary": _summary_record(scaled),
            "gue_summary": _summary_record(gue),
            "ks": ks.as_record(),
        })
        rows.extend((k, i, float(raw[i]), float(scaled[i]), float(gue[i]))
                    for i in range(n))
    csv_text = _csv_from_rows("k,index,raw,scaled,gue_scaled", rows)
    return results, csv_text


def _run_gue_edge(config: ExperimentConfig) -> tuple[dict, str]:
    n = _effective_samples(config)
    table = default_table()
    results = {"per_k": []}
    rows = []
    for j, k in enumerate(config.k_schedule):
        stream = RngStream(config.seed, _GUE_BLOCK + j * _SCHEDULE_STRIDE)
        lam = sample_extremes(k, n, stream)[:, 1]
        if k == 1:
            # a 1x1 ensemble is a standard normal entry
            ks = ks_one_sample(lam, standard_normal_cdf, config.alpha)
            scaled = lam
            reference = "standard_normal"
        else:
            scaled = (lam - 2.0 * np.sqrt(k)) * k ** (1.0 / 6.0)
            ks = ks_one_sample(scaled, lambda s: f_gue(s, table), config.alpha)
            reference = "tracy_widom"
        results["per_k"].append({
            "k": k,
            "reference": reference,
            "summary": _summary_record(scaled),
            "ks": ks.as_record(),
        })
        rows.extend((k, i, float(lam[i]), float(scaled[i])) for i in range(n))
    csv_text = _csv_from_rows("k,index,lambda_max,scaled", rows)
    return results, csv_text


def _run_gamma_transform(config: ExperimentConfig) -> tuple[dict, str]:
    n = _effective_samples(config)
    m = config.path_grid
    results = {"per_k": [], "path_grid": m}
    rows = []
    for j, k in enumerate(config.k_schedule):
        base = _BROWNIAN_BLOCK + j * _SCHEDULE_STRIDE

        def job(i: int, k=k, base=base) -> float:
            ens = brownian_ensemble(RngStream(config.seed, base + i), k, m)
            return g_sup(ens)

        gbar = np.array(parallel_map(n, config.workers, job))
        lam = sample_extremes(
            k, n,
            RngStream(config.seed, _GUE_BLOCK + j * _SCHEDULE_STRIDE))[:, 1]
        ks = ks_two_sample(gbar, lam, config.alpha)
        results["per_k"].append({
            "k": k,
            "sup_summary": _summary_record(gbar),
            "gue_summary": _summary_record(lam),
            "ks": ks.as_record(),
        })
        rows.extend((k, i, float(gbar[i]), float(lam[i])) for i in range(n))
    csv_text = _csv_from_rows("k,index,g_sup,lambda_max", rows)
    return results, csv_text


def _predicted_square_constant(dist) -> Optional[float]:
    if dist.variant == "exponential" and abs(dist.params[0] - 1.0) < 1e-12:
        return predicted_constant_exponential(1.0, 1.0)
    if dist.variant == "geometric":
        return predicted_constant_geometric(1.0, 1.0, dist.params[0])
    return None


def _run_time_constant(config: ExperimentConfig) -> tuple[dict, str]:
    dist = from_config(config.distribution)
    variant = config.variant or "square"
    replicates = _effective_samples(config)
    if variant == "square":
        points = []
        for j, n in enumerate(config.k_schedule):
            stream = RngStream(config.seed,
                               _TIME_CONSTANT_BLOCK + j * _SCHEDULE_STRIDE)
            points.append(square_shape_point(dist, 1.0, 1.0, n, replicates,
                                             stream))
        predicted = _predicted_square_constant(dist)
        extrapolated = (extrapolate_inverse_cuberoot(points)
                        if len(points) >= 2 else None)
        results = {
            "variant": "square",
            "points": [{"x": p.x, "y": p.y, "n": p.n,
                        "mean_ratio": p.mean_ratio, "stderr": p.stderr}
                       for p in points],
            "extrapolated": extrapolated,
            "predicted": predicted,
        }
    elif variant == "thin":
        k = config.k_schedule[0]
        stream = RngStream(config.seed, _TIME_CONSTANT_BLOCK)
        point = thin_rectangle_constant(dist, config.n_cols, k, replicates,
                                        stream)
        points = [point]
        predicted = 2.0 * dist.stddev
        results = {
            "variant": "thin",
            "points": [{"x": point.x, "y": point.y, "n": point.n,
                        "mean_ratio": point.mean_ratio,
                        "stderr": point.stderr}],
            "extrapolated": None,
            "predicted": predicted,
        }
    else:
        raise ValidationError(
            f"time_constant takes variant 'square' or 'thin', got {variant!r}")
    buf = StringIO()
    preds = [predicted if predicted is not None else float("nan")] * len(points)
    write_shape_points_csv(points, preds, buf)
    return results, buf.getvalue()


def _run_tw_table(config: ExperimentConfig) -> tuple[dict, str]:
    table = default_table()
    mean, variance = table_mean_variance(table)
    results = {
        "grid_size": int(table.grid.size),
        "grid_min": float(table.grid[0]),
        "grid_max": float(table.grid[-1]),
        "mean": mean,
        "variance": variance,
        "cdf_at": {repr(s): f_gue(s, table)
                   for s in (-3.0, -2.0, -1.0, 0.0, 1.0, 2.0)},
    }
    buf = StringIO()
    write_tw_table_csv(table, buf)
    return results, buf.getvalue()


def _run_skorohod(config: ExperimentConfig) -> tuple[dict, str]:
    dist = from_config(config.distribution)
    law = build_exit_law(dist)
    n = _effective_samples(config)

    def job(i: int):
        rec = simulate_embedding(
            law, RngStream(config.seed, _SKOROHOD_BLOCK + i), config.dt)
        return rec

    records = parallel_map(n, config.workers, job)
    taus = np.array([r.tau for r in records])
    values = np.array([r.b_tau for r in records])
    freq = {repr(float(v)): float(np.mean(values == v))
            for v in np.unique(values)}
    results = {
        "n": n,
        "dt": config.dt,
        "tau_summary": _summary_record(taus),
        "tau_sq_summary": _summary_record(taus ** 2),
        "target_variance": dist.variance,
        "fourth_moment_bound": 4.0 * dist.fourth_central_moment,
        "value_frequencies": freq,
    }
    buf = StringIO()
    write_stopping_records_csv(records, buf)
    return results, buf.getvalue()


_RUNNERS = {
    "clt_theorem_form": lambda c: _run_clt(c, theorem_form=True),
    "clt_corollary": lambda c: _run_clt(c, theorem_form=False),
    "gue_edge": _run_gue_edge,
    "gamma_transform": _run_gamma_transform,
    "time_constant": _run_time_constant,
    "tw_table": _run_tw_table,
    "skorohod_check": _run_skorohod,
}


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Execute the configured pipeline and build its report.

    A JobError marks the report invalid and records the failing
    sample; all other errors propagate to the caller.
    """
    start = time.perf_counter()
    runner = _RUNNERS[config.kind]
    samples_csv_name = None
    if config.output_path is not None:
        samples_csv_name = Path(config.output_path).stem + "_samples.csv"
    try:
        results, csv_text = runner(config)
        report = ExperimentReport(
            config=config.to_json_dict(),
            results=results,
            regime=config.regime_exponents(),
            samples_csv=samples_csv_name,
            non_acceptance=config.quick,
        )
        report._csv_payload = csv_text
    except JobError as exc:
        report = ExperimentReport(
            config=config.to_json_dict(),
            results={},
            regime=config.regime_exponents(),
            samples_csv=None,
            invalid=True,
            failure=f"job failed on sample {exc.sample_index}",
            non_acceptance=config.quick,
        )
    report.wall_clock_seconds = time.perf_counter() - start
    return report


def write_report(report: ExperimentReport, output_path: str) -> None:
    """Persist the JSON report plus its CSV side file (if any)."""
    path = Path(output_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.to_json() + "\n", encoding="utf-8")
    if report.samples_csv is not None and report._csv_payload is not None:
        (path.parent / report.samples_csv).write_text(
            report._csv_payload, encoding="utf-8")
