"""Tests for the galband command line"""

import json

import numpy as np
import pandas as pd
import pytest

import main
from main import EXIT_CONFIG, EXIT_FAILURE, EXIT_OK, build_parser, load_run_config
from modules.catalog import QESCatalog
from pipeline.processor import VerificationProcessor
from schema import CriterionResult


def run_cli(*argv) -> int:
    return main.main([str(arg) for arg in argv])


class TestEval:

    def test_writes_potential_samples(self, tmp_path):
        target = tmp_path / "v.csv"
        assert run_cli("eval", "--a", 1, "--m", 0.5, "--grid", 16, "-o", target) == EXIT_OK
        frame = pd.read_csv(target)
        assert list(frame.columns) == ["x", "V_re", "V_im"]
        assert len(frame) == 16

    def test_output_is_deterministic(self, tmp_path):
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        run_cli("eval", "--a", 2, "--g", 1, "--m", 0.3, "--grid", 32, "-o", first)
        run_cli("eval", "--a", 2, "--g", 1, "--m", 0.3, "--grid", 32, "-o", second)
        assert first.read_bytes() == second.read_bytes()

    def test_json_format(self, tmp_path):
        target = tmp_path / "v.json"
        assert run_cli("eval", "--a", 1, "--grid", 8, "--format", "json", "-o", target) == EXIT_OK
        rows = json.loads(target.read_text())
        assert len(rows) == 8 and set(rows[0]) == {"x", "V_re", "V_im"}

    def test_stdout_stays_clean(self, capsys):
        assert run_cli("eval", "--a", 1, "--grid", 8) == EXIT_OK
        captured = capsys.readouterr()
        assert captured.out.splitlines()[0] == "x,V_re,V_im"
        assert "POTENTIAL SAMPLES" in captured.err


class TestConfiguration:

    def test_modulus_out_of_range(self):
        assert run_cli("eval", "--a", 1, "--m", 1.5) == EXIT_CONFIG

    def test_singular_beta(self):
        assert run_cli("eval", "--a", 1, "--beta", 0.0) == EXIT_CONFIG

    def test_unknown_config_key(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"a": 1.0, "colour": "blue"}))
        assert run_cli("eval", "--config", path) == EXIT_CONFIG

    def test_unreadable_config(self, tmp_path):
        assert run_cli("eval", "--config", tmp_path / "missing.json") == EXIT_CONFIG

    def test_flags_override_config_file(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"a": 2.0, "m": 0.3, "grid": 64}))
        args = build_parser().parse_args(["eval", "--config", str(path), "--m", "0.7"])
        run_config = load_run_config(args)
        assert run_config.m == 0.7
        assert run_config.a == 2.0 and run_config.grid == 64
        assert run_config.rtol == 1e-10

    @pytest.mark.parametrize("suite", [99, "one"])
    def test_unknown_suite(self, suite):
        assert run_cli("verify", "--suite", suite) == EXIT_CONFIG

    def test_state_index_out_of_range(self, tmp_path):
        assert run_cli("heun", "--a", 1, "--state", 7, "-o", tmp_path / "h.csv") == EXIT_CONFIG

    def test_susy_without_exact_states(self, monkeypatch, capsys):
        monkeypatch.setattr(QESCatalog, "states", lambda self, spec: [])
        assert run_cli("susy", "--a", 1, "--m", 0.5) == EXIT_FAILURE
        assert "no exact state" in capsys.readouterr().err


class TestCatalogAndHeun:

    def test_associated_lame_catalog(self, tmp_path):
        target = tmp_path / "states.csv"
        assert run_cli("catalog", "--a", 2, "--g", 1, "--m", 0.5, "-o", target) == EXIT_OK
        frame = pd.read_csv(target)
        assert (frame["energy_re"] + 6.0).abs().min() < 1e-12
        assert frame["residual"].max() < 1e-8

    def test_heun_table(self, tmp_path):
        target = tmp_path / "heun.csv"
        assert run_cli("heun", "--a", 2, "--m", 0.5, "-o", target) == EXIT_OK
        frame = pd.read_csv(target)
        assert len(frame) == 5
        assert frame["constraint_residual"].max() < 1e-14
        assert frame["heun_residual"].max() < 1e-8


class TestVerify:

    def test_failed_criterion_exits_one(self, monkeypatch):
        failure = CriterionResult(id=1, name="elliptic identities", passed=False, detail="forced")
        monkeypatch.setattr(VerificationProcessor, "run_suite", lambda self, criteria: [failure])
        assert run_cli("verify", "--suite", 1) == EXIT_FAILURE

    @pytest.mark.parametrize("error", [ValueError("x must be increasing"), np.linalg.LinAlgError("singular")])
    def test_numerical_error_is_not_a_config_error(self, monkeypatch, capsys, error):
        def fail(self, criteria):
            raise error

        monkeypatch.setattr(VerificationProcessor, "run_suite", fail)
        assert run_cli("verify", "--suite", 1) == EXIT_FAILURE
        assert "configuration error" not in capsys.readouterr().err

    def test_passing_criterion_exits_zero(self, tmp_path, capsys):
        target = tmp_path / "verify.csv"
        assert run_cli("verify", "--suite", 1, "-o", target) == EXIT_OK
        assert "PASS" in capsys.readouterr().out
        assert bool(pd.read_csv(target)["passed"].iloc[0])


def test_subcommand_is_required():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])
