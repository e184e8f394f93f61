"""
Tests for the command-line front end.
"""
import json
from unittest.mock import patch

import pytest

from src.cli.main import (
    EXIT_OK,
    EXIT_RUNTIME,
    EXIT_USAGE,
    EXIT_VALIDATION_FAILED,
    parse_and_dispatch,
    resolve_seed,
)
from src.core.experiments import CampaignResult
from src.core.file_manager import load_result_rows, save_result_rows
from src.core.models import BudgetEntry, CampaignError, ResultRow


@pytest.fixture
def run(tmp_path):
    """Invoke the CLI with logs kept under tmp_path."""
    def _run(*argv):
        return parse_and_dispatch([*argv, "--log-dir", str(tmp_path / "logs")])
    return _run


def _echo(config, jobs=1):
    return CampaignResult(config=config)


class TestUsageErrors:
    """Tests for arguments that map to exit code 2."""

    def test_unknown_target(self, run):
        assert run("reproduce", "fig9") == EXIT_USAGE

    def test_unknown_family(self, run):
        assert run("validate", "cauchy") == EXIT_USAGE

    def test_missing_subcommand(self):
        assert parse_and_dispatch([]) == EXIT_USAGE

    def test_help(self):
        assert parse_and_dispatch(["--help"]) == EXIT_OK

    def test_vacuous_budget(self, run):
        assert run("validate", "laplace", "--gamma", "0.3") == EXIT_USAGE

    def test_side_condition(self, run):
        assert run("validate", "gaussian", "--beta", "0.00001", "--n", "1000000") == EXIT_USAGE

    def test_simulate_needs_kind(self, run, tmp_path):
        assert run("simulate", "--out", str(tmp_path / "out")) == EXIT_USAGE

    def test_missing_config_file(self, run, tmp_path):
        assert run("simulate", "--config", str(tmp_path / "absent.json")) == EXIT_USAGE

    def test_bad_jobs(self, run):
        assert run("reproduce", "fig1", "--jobs", "0") == EXIT_USAGE

    def test_schema_violation(self, run, tmp_path):
        assert run("simulate", "--kind", "Fig1Sweep", "--trials", "0", "--out", str(tmp_path / "out")) == EXIT_USAGE


class TestConfigResolution:
    """Tests for config merging and seed precedence."""

    def test_seed_precedence(self, monkeypatch):
        monkeypatch.delenv("IMB_SEED", raising=False)
        assert resolve_seed(None) == 0
        monkeypatch.setenv("IMB_SEED", "42")
        assert resolve_seed(None) == 42
        assert resolve_seed(None, 9) == 9
        assert resolve_seed(3, 9) == 3
        monkeypatch.setenv("IMB_SEED", "abc")
        with pytest.raises(ValueError):
            resolve_seed(None)
        assert resolve_seed(3) == 3

    def test_malformed_environment_is_usage_error(self, run, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("IMB_SEED", "abc")
        with patch("src.cli.main.run_experiment", side_effect=_echo) as runner:
            assert run("reproduce", "fig1", "--jobs", "1", "--out", str(tmp_path / "out")) == EXIT_USAGE
        runner.assert_not_called()
        assert "IMB_SEED" in capsys.readouterr().err
        monkeypatch.delenv("IMB_SEED")
        monkeypatch.setenv("IMB_JOBS", "many")
        assert run("reproduce", "fig1", "--out", str(tmp_path / "out")) == EXIT_USAGE

    def test_env_seed_reaches_config(self, run, tmp_path, monkeypatch):
        monkeypatch.setenv("IMB_SEED", "42")
        with patch("src.cli.main.run_experiment", side_effect=_echo) as runner:
            assert run("reproduce", "fig1", "--jobs", "1", "--out", str(tmp_path / "out")) == EXIT_OK
        assert runner.call_args.args[0].seed == 42

    def test_config_file_with_overrides(self, run, tmp_path):
        config_path = tmp_path / "config.json"
        config_path.write_text(json.dumps({"kind": "Fig1Sweep", "n": 100, "beta": 0.1, "trials": 2, "seed": 5}))
        out = tmp_path / "out"
        with patch("src.cli.main.run_experiment", side_effect=_echo) as runner:
            code = run("simulate", "--config", str(config_path), "--trials", "3", "--jobs", "2", "--out", str(out))
        assert code == EXIT_OK
        config, jobs = runner.call_args.args
        assert (config.n, config.trials, config.seed, jobs) == (100, 3, 5, 2)
        saved = json.loads((out / "config.json").read_text(encoding="utf-8"))
        assert saved["trials"] == 3
        assert (out / "results.csv").exists()

    def test_reproduce_overrides(self, run, tmp_path):
        with patch("src.cli.main.run_experiment", side_effect=_echo) as runner:
            run("reproduce", "fig3", "--family", "normal,Fréchet", "--dims", "1,5", "--seed", "7",
                "--jobs", "1", "--out", str(tmp_path / "out"))
        config = runner.call_args.args[0]
        assert [f.value for f in config.families] == ["gaussian", "frechet"]
        assert config.dims == [1, 5]
        assert config.seed == 7

    def test_validate_uses_preset_budget(self, run, tmp_path):
        with patch("src.cli.main.run_experiment", side_effect=_echo) as runner:
            run("validate", "gaussian", "--trials", "100", "--jobs", "1", "--out", str(tmp_path / "out"))
        config = runner.call_args.args[0]
        assert config.kind == "TheoremCampaign"
        assert (config.budgets[0].beta, config.budgets[0].n) == (0.05, 1_000_000)


class TestOutcomes:
    """Tests for exit codes of completed and failed runs."""

    def test_failed_validation(self, run, tmp_path):
        def failing(config, jobs=1):
            entry = BudgetEntry(family="laplace")
            return CampaignResult(config=config, errors=[CampaignError(family="laplace", entry=entry, error="rejected")])

        with patch("src.cli.main.run_experiment", side_effect=failing):
            code = run("validate", "laplace", "--jobs", "1", "--out", str(tmp_path / "out"))
        assert code == EXIT_VALIDATION_FAILED
        assert (tmp_path / "out" / "reports.json").exists()

    def test_runtime_error(self, run, tmp_path, capsys):
        out = tmp_path / "out"
        with patch("src.cli.main.run_experiment", side_effect=RuntimeError("boom")):
            assert run("reproduce", "fig1", "--jobs", "1", "--out", str(out)) == EXIT_RUNTIME
        record = json.loads((out / "error.json").read_text(encoding="utf-8"))
        assert record == {"command": "Fig1Sweep", "error": "RuntimeError", "message": "boom"}
        assert "boom" in capsys.readouterr().err

    def test_inspect(self, run, tmp_path, capsys):
        row = ResultRow(kind="Fig1Sweep", family="gaussian", classifier="hard-svm", dim=1, mu=3.0,
                        n=100, beta=0.1, stat="avg_err", mean=0.01, std=0.002, trials=5)
        path = save_result_rows([row], tmp_path / "results.csv")
        assert run("inspect", str(path)) == EXIT_OK
        assert "avg_err" in capsys.readouterr().out

    def test_inspect_missing(self, run, tmp_path):
        assert run("inspect", str(tmp_path / "absent.csv")) == EXIT_RUNTIME

    def test_inspect_lists_runs(self, run, tmp_path, capsys):
        results = tmp_path / "results"
        for date, name in (("2024-01-01", "Fig1Sweep_101010"), ("2024-01-02", "Fig3Grid_090000")):
            (results / date / name).mkdir(parents=True)
        assert run("inspect", "--out", str(results)) == EXIT_OK
        out = capsys.readouterr().out
        assert "Fig3Grid_090000" in out
        assert out.index("2024-01-02") < out.index("2024-01-01")

    def test_inspect_no_runs(self, run, tmp_path, capsys):
        assert run("inspect", "--out", str(tmp_path / "empty")) == EXIT_OK
        assert "No runs" in capsys.readouterr().out

    def test_end_to_end_sweep(self, run, tmp_path):
        out = tmp_path / "out"
        code = run("reproduce", "fig1", "--n", "100", "--beta", "0.1", "--trials", "2", "--grid-size", "3",
                   "--seed", "7", "--jobs", "1", "--out", str(out))
        assert code == EXIT_OK
        rows = load_result_rows(out / "results.csv")
        assert {r.stat for r in rows} == {"wce", "avg_err"}
        assert json.loads((out / "config.json").read_text(encoding="utf-8"))["seed"] == 7

    def test_end_to_end_validate(self, run, tmp_path):
        code = run("validate", "laplace", "--n", "10000", "--beta", "0.01", "--trials", "100",
                   "--seed", "7", "--jobs", "1", "--out", str(tmp_path / "out"))
        assert code == EXIT_OK

    @pytest.mark.slow
    def test_validate_full_scale(self, run, tmp_path):
        code = run("validate", "laplace", "--epsilon", "0.1", "--delta", "0.1", "--gamma", "0.1",
                   "--beta", "0.01", "--n", "1000000", "--trials", "2000", "--seed", "7", "--out", str(tmp_path / "out"))
        assert code == EXIT_OK
