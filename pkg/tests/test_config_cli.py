"""Configuration records and the command-line front end.

CLI behavior is exercised in process through main(argv) so exit codes
and outputs are cheap to assert; one subprocess test checks the
installed console script end to end.
"""

import json
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from lppsim.cli import main
from lppsim.config import (
    EXPERIMENT_KINDS,
    ExperimentConfig,
    apply_overrides,
    config_from_dict,
    config_from_json,
)
from lppsim.errors import ParameterError, ValidationError
from lppsim.paths import brownian_ensemble, g_inf, g_sup
from lppsim.percolation import (
    first_passage_theorem_form,
    last_passage_path_form,
    sample_weight_matrix,
)
from lppsim.rmt import sample_extremes
from lppsim.weights import RngStream, gaussian


class TestExperimentConfig:
    def test_defaults(self):
        config = config_from_dict({"kind": "gue_edge", "seed": 5})
        assert config.kind == "gue_edge"
        assert config.seed == 5
        assert config.distribution == {"type": "gaussian", "mean": 0.0,
                                       "stddev": 1.0}
        assert config.k_schedule == (1,)
        assert config.samples == 1
        assert config.workers == 1
        assert config.alpha == 0.05
        assert config.quick is False

    def test_json_round_trip(self):
        config = config_from_dict({
            "kind": "clt_corollary", "seed": 9, "n_cols": 500,
            "k_schedule": [2, 6], "samples": 40, "variant": "first",
            "alpha": 0.01,
        })
        assert config_from_json(config.to_json()) == config

    def test_scalar_k_schedule_coerced(self):
        config = config_from_dict({"kind": "gue_edge", "seed": 1,
                                   "k_schedule": 4})
        assert config.k_schedule == (4,)

    def test_unknown_keys_rejected(self):
        with pytest.raises(ValidationError, match="unknown config keys"):
            config_from_dict({"kind": "gue_edge", "seed": 1, "n_rows": 3})

    def test_requires_kind_and_seed(self):
        with pytest.raises(ValidationError, match="'kind' and 'seed'"):
            config_from_dict({"kind": "gue_edge"})
        with pytest.raises(ValidationError, match="'kind' and 'seed'"):
            config_from_dict({"seed": 3})

    def test_seed_must_be_integer(self):
        with pytest.raises(ValidationError, match="seed"):
            config_from_dict({"kind": "gue_edge", "seed": "7"})
        with pytest.raises(ValidationError, match="seed"):
            config_from_dict({"kind": "gue_edge", "seed": -1})

    @pytest.mark.parametrize("field,value", [
        ("kind", "nonsense"),
        ("n_cols", 0),
        ("k_schedule", []),
        ("k_schedule", [2, 0]),
        ("samples", 0),
        ("path_grid", 0),
        ("workers", 0),
        ("alpha", 0.0),
        ("alpha", 1.0),
        ("dt", 0.0),
        ("dt", 2e-4),
        ("distribution", {"type": "nonsense"}),
    ])
    def test_field_validation(self, field, value):
        record = {"kind": "gue_edge", "seed": 1, field: value}
        with pytest.raises(ValidationError):
            config_from_dict(record)

    def test_not_a_dict(self):
        with pytest.raises(ValidationError):
            config_from_dict([1, 2])
        with pytest.raises(ValidationError, match="not valid JSON"):
            config_from_json("{broken")

    def test_frozen(self):
        config = config_from_dict({"kind": "gue_edge", "seed": 1})
        with pytest.raises(Exception):
            config.seed = 2

    def test_regime_exponents(self):
        config = config_from_dict({"kind": "gue_edge", "seed": 1,
                                   "n_cols": 1000, "k_schedule": [10, 1]})
        exps = config.regime_exponents()
        assert exps["10"] == pytest.approx(
            math.log(10) / math.log(1000), rel=1e-12)
        assert exps["1"] == 0.0

    def test_regime_exponents_degenerate_n(self):
        config = config_from_dict({"kind": "gue_edge", "seed": 1,
                                   "k_schedule": [3]})
        assert config.regime_exponents() == {"3": None}

    def test_apply_overrides(self):
        base = config_from_dict({"kind": "gue_edge", "seed": 1})
        out = apply_overrides(base, samples=50, workers=None, seed=2)
        assert out.samples == 50
        assert out.seed == 2
        assert out.workers == base.workers
        assert base.samples == 1

    def test_apply_overrides_unknown_field(self):
        base = config_from_dict({"kind": "gue_edge", "seed": 1})
        with pytest.raises(ParameterError, match="unknown config field"):
            apply_overrides(base, n_rows=3)

    def test_apply_overrides_revalidates(self):
        base = config_from_dict({"kind": "gue_edge", "seed": 1})
        with pytest.raises(ValidationError):
            apply_overrides(base, samples=-4)

    def test_kind_catalogue(self):
        for kind in EXPERIMENT_KINDS:
            assert config_from_dict({"kind": kind, "seed": 0}).kind == kind


def _read_csv(path):
    lines = path.read_text(encoding="utf-8").split("\n")
    assert lines[-1] == ""
    return lines[0], [line.split(",") for line in lines[1:-1]]


class TestSampleCommands:
    def test_sample_lpp_matches_library(self, tmp_path):
        out = tmp_path / "lpp.csv"
        rv = main(["sample-lpp", "--n-cols", "4", "--n-rows", "3",
                   "--samples", "5", "--seed", "11", "--out", str(out)])
        assert rv == 0
        header, rows = _read_csv(out)
        assert header == "index,value"
        assert len(rows) == 5
        dist = gaussian(0.0, 1.0)
        for i, row in enumerate(rows):
            w = sample_weight_matrix(dist, 4, 3, RngStream(11, i))
            assert int(row[0]) == i
            assert float(row[1]) == last_passage_path_form(w).value

    def test_sample_lpp_rerun_is_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        argv = ["sample-lpp", "--n-cols", "6", "--n-rows", "2",
                "--samples", "4", "--seed", "3", "--dist", "exponential"]
        assert main(argv + ["--out", str(a)]) == 0
        assert main(argv + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_sample_lpp_kind_selects_functional(self, tmp_path):
        out = tmp_path / "first.csv"
        rv = main(["sample-lpp", "--n-cols", "5", "--n-rows", "3",
                   "--samples", "3", "--seed", "7",
                   "--kind", "theorem-first", "--out", str(out)])
        assert rv == 0
        _, rows = _read_csv(out)
        dist = gaussian(0.0, 1.0)
        for i, row in enumerate(rows):
            w = sample_weight_matrix(dist, 5, 3, RngStream(7, i))
            assert float(row[1]) == first_passage_theorem_form(w).value

    def test_sample_gue_scaled_column(self, tmp_path):
        out = tmp_path / "gue.csv"
        rv = main(["sample-gue", "--k", "3", "--samples", "4",
                   "--seed", "2", "--scaled", "--out", str(out)])
        assert rv == 0
        header, rows = _read_csv(out)
        assert header == "index,lambda_min,lambda_max,scaled"
        ext = sample_extremes(3, 4, RngStream(2, 0))
        for i, row in enumerate(rows):
            assert float(row[1]) == ext[i, 0]
            assert float(row[2]) == ext[i, 1]
            expected = (ext[i, 1] - 2.0 * np.sqrt(3)) * 3 ** (1.0 / 6.0)
            assert float(row[3]) == float(expected)

    def test_sample_gue_unscaled_header(self, tmp_path):
        out = tmp_path / "gue.csv"
        assert main(["sample-gue", "--k", "2", "--samples", "2",
                     "--seed", "2", "--out", str(out)]) == 0
        header, rows = _read_csv(out)
        assert header == "index,lambda_min,lambda_max"
        assert len(rows[0]) == 3

    def test_gamma_matches_library(self, tmp_path):
        out = tmp_path / "gamma.csv"
        rv = main(["gamma", "--k", "2", "--grid", "64", "--samples", "3",
                   "--seed", "5", "--out", str(out)])
        assert rv == 0
        header, rows = _read_csv(out)
        assert header == "index,g_sup,g_inf"
        for i, row in enumerate(rows):
            ens = brownian_ensemble(RngStream(5, i), 2, 64)
            assert float(row[1]) == g_sup(ens)
            assert float(row[2]) == g_inf(ens)
            assert float(row[1]) >= float(row[2])


class TestTwTableCommand:
    def test_default_matches_golden_fixture(self, tmp_path, tw_table):
        out = tmp_path / "table.csv"
        assert main(["tw-table", "--out", str(out)]) == 0
        golden = Path(__file__).parent / "data" / "tw_table_golden.csv"
        assert out.read_bytes() == golden.read_bytes()

    def test_unstable_seed_point_exits_3(self, capsys):
        rv = main(["tw-table", "--x-start", "6.0"])
        assert rv == 3
        err = capsys.readouterr().err
        assert "numerical-consistency error" in err


class TestKsCommand:
    def _write_values(self, path, values):
        path.write_text("value\n" + "".join(f"{v!r}\n" for v in values),
                        encoding="utf-8")

    def test_one_sample_normal_null(self, tmp_path, capsys):
        rng = np.random.default_rng(42)
        data = tmp_path / "normal.csv"
        self._write_values(data, rng.standard_normal(400).tolist())
        rv = main(["ks", "--mode", "one", "--input", str(data),
                   "--cdf", "normal"])
        assert rv == 0
        record = json.loads(capsys.readouterr().out)
        assert record["n2"] is None
        assert record["reject"] is False
        assert 0.0 < record["statistic"] < record["threshold"]

    def test_one_sample_shifted_rejects(self, tmp_path, capsys):
        rng = np.random.default_rng(43)
        data = tmp_path / "shifted.csv"
        self._write_values(data, (rng.standard_normal(400) + 1.0).tolist())
        rv = main(["ks", "--mode", "one", "--input", str(data),
                   "--cdf", "normal"])
        assert rv == 0
        record = json.loads(capsys.readouterr().out)
        assert record["reject"] is True

    def test_two_sample(self, tmp_path, capsys):
        rng = np.random.default_rng(44)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        self._write_values(a, rng.standard_normal(300).tolist())
        self._write_values(b, rng.standard_normal(300).tolist())
        rv = main(["ks", "--mode", "two", "--input", str(a),
                   "--input-b", str(b)])
        assert rv == 0
        record = json.loads(capsys.readouterr().out)
        assert record["n1"] == 300 and record["n2"] == 300
        assert record["reject"] is False

    def test_two_sample_requires_second_input(self, tmp_path, capsys):
        data = tmp_path / "a.csv"
        self._write_values(data, [0.1, 0.2])
        rv = main(["ks", "--mode", "two", "--input", str(data)])
        assert rv == 2
        assert "error:" in capsys.readouterr().err

    def test_missing_file_exits_2(self, tmp_path, capsys):
        rv = main(["ks", "--mode", "one", "--cdf", "normal",
                   "--input", str(tmp_path / "absent.csv")])
        assert rv == 2

    def test_non_numeric_body_exits_2(self, tmp_path, capsys):
        data = tmp_path / "bad.csv"
        data.write_text("value\n1.5\noops\n", encoding="utf-8")
        rv = main(["ks", "--mode", "one", "--cdf", "normal",
                   "--input", str(data)])
        assert rv == 2
        assert "non-numeric" in capsys.readouterr().err

    def test_headerless_input_accepted(self, tmp_path, capsys):
        data = tmp_path / "plain.csv"
        data.write_text("0.5\n-0.25\n1.5\n", encoding="utf-8")
        rv = main(["ks", "--mode", "one", "--cdf", "normal",
                   "--input", str(data)])
        assert rv == 0
        record = json.loads(capsys.readouterr().out)
        assert record["n1"] == 3


class TestValidationExits:
    def test_bad_distribution_name(self, tmp_path, capsys):
        rv = main(["sample-lpp", "--dist", "nonsense", "--n-cols", "2",
                   "--n-rows", "2", "--samples", "1", "--seed", "0",
                   "--out", str(tmp_path / "x.csv")])
        assert rv == 2
        assert "error:" in capsys.readouterr().err

    def test_malformed_distribution_json(self, tmp_path, capsys):
        rv = main(["sample-lpp", "--dist", "{broken", "--n-cols", "2",
                   "--n-rows", "2", "--samples", "1", "--seed", "0",
                   "--out", str(tmp_path / "x.csv")])
        assert rv == 2

    def test_bad_matrix_shape(self, tmp_path, capsys):
        rv = main(["sample-lpp", "--n-cols", "0", "--n-rows", "2",
                   "--samples", "1", "--seed", "0",
                   "--out", str(tmp_path / "x.csv")])
        assert rv == 2

    def test_experiment_without_kind_or_config(self, capsys):
        rv = main(["experiment", "--seed", "4"])
        assert rv == 2
        assert "--kind and --seed" in capsys.readouterr().err

    def test_experiment_unreadable_config(self, tmp_path, capsys):
        rv = main(["experiment", "--config", str(tmp_path / "none.json")])
        assert rv == 2


class TestConsoleScript:
    def test_installed_entry_point(self, tmp_path):
        out = tmp_path / "cli.csv"
        proc = subprocess.run(
            [sys.executable, "-m", "lppsim.cli", "sample-lpp",
             "--n-cols", "3", "--n-rows", "2", "--samples", "2",
             "--seed", "1", "--out", str(out)],
            capture_output=True, text=True)
        assert proc.returncode == 0
        header, rows = _read_csv(out)
        assert header == "index,value"
        assert len(rows) == 2

    def test_version_flag(self):
        proc = subprocess.run(
            [sys.executable, "-m", "lppsim.cli", "--version"],
            capture_output=True, text=True)
        assert proc.returncode == 0
        assert proc.stdout.strip()
