import json

import pandas as pd
import pytest
from click.testing import CliRunner
from pydantic import ValidationError

from app import qdec
from qdec import experiments
from qdec.experiments import SEED_ENV, ExperimentConfig, RunResult, run
from qdec.randomness import SeededSampler


@pytest.fixture(autouse=True)
def no_env_seed(monkeypatch):
    monkeypatch.delenv(SEED_ENV, raising=False)


def _moments(out, **extra):
    config = {"command": "moments", "seed": 1, "samples": 10, "out": str(out),
              "options": {"dim": 2, "sampler": "clifford", "matrices": 2}}
    config.update(extra)
    return config


def test_stochastic_commands_need_a_seed():
    with pytest.raises(ValidationError):
        ExperimentConfig(command="decouple")
    with pytest.raises(ValidationError):
        ExperimentConfig(command="rate", options={"kind": "ea-opt"})
    assert ExperimentConfig(command="rate", options={"kind": "marton"}).seed is None
    assert ExperimentConfig(command="entropy").seed is None


def test_seed_falls_back_to_the_environment(monkeypatch):
    monkeypatch.setenv(SEED_ENV, "12")
    assert ExperimentConfig(command="lock").seed == 12
    assert ExperimentConfig(command="lock", seed=3).seed == 3


def test_option_casts_to_the_default_type():
    config = ExperimentConfig(command="entropy", options={"dim_a": "3", "kind": "h2"})
    assert config.option("dim_a", 2) == 3
    assert config.option("dim_b", 2) == 2
    assert config.option("kind", "hmin") == "h2"


def test_entropy_run_without_artifacts():
    result = run({"command": "entropy", "options": {"kind": "hmin"}}, write=False)
    assert result.exit_code == 0
    assert result.payload["kind"] == "min"
    assert result.payload["of"] == ["A"] and result.payload["given"] == ["B"]
    assert result.artifacts == []


def test_malformed_input_exits_with_two(tmp_path):
    missing = run({"command": "entropy", "inputs": {"state": str(tmp_path / "missing.json")}}, write=False)
    assert missing.exit_code == 2
    assert missing.error
    assert run({"command": "decouple"}, write=False).exit_code == 2
    assert run({"command": "suite", "seed": 1, "options": {"only": "everything"}}, write=False).exit_code == 2


def test_failed_checks_and_exhausted_searches_exit_with_one(monkeypatch, tmp_path):
    monkeypatch.setitem(experiments.HANDLERS, "moments", lambda config: RunResult("moments", {}, {"exact": False}))
    assert run(_moments(tmp_path), write=False).exit_code == 1

    def exhausted(config):
        raise RuntimeError("budget not met after 256 samples")

    monkeypatch.setitem(experiments.HANDLERS, "moments", exhausted)
    result = run(_moments(tmp_path), write=False)
    assert result.exit_code == 1
    assert "budget" in result.error


def test_clifford_moments_write_reproducible_artifacts(tmp_path):
    first = run(_moments(tmp_path / "a"))
    second = run(_moments(tmp_path / "b"))
    assert first.exit_code == 0
    assert first.checks == {"exact_design": True}
    assert [p.rsplit("/", 1)[-1] for p in first.artifacts] == ["result.json", "samples.csv"]
    assert (tmp_path / "a" / "samples.csv").read_bytes() == (tmp_path / "b" / "samples.csv").read_bytes()

    summary = json.loads((tmp_path / "a" / "result.json").read_text())
    assert summary["passed"] and summary["dim"] == 2
    assert summary["config"]["seed"] == 1


def test_csv_summary(tmp_path):
    result = run(_moments(tmp_path, format="csv"))
    frame = pd.read_csv(tmp_path / "result.csv")
    assert result.exit_code == 0
    assert len(frame) == 1
    assert bool(frame["checks.exact_design"].iloc[0])


def test_decoupling_plot_is_byte_stable(tmp_path):
    config = {"command": "decouple", "seed": 5, "samples": 20, "plot": True,
              "options": {"corollary": "merge", "dim_a": 4, "dim_e": 2}}
    first = run(dict(config, out=str(tmp_path / "a")))
    run(dict(config, out=str(tmp_path / "b")))
    assert first.checks["within_bound"]
    assert first.artifacts[-1].endswith("plot.svg")
    assert (tmp_path / "a" / "plot.svg").read_bytes() == (tmp_path / "b" / "plot.svg").read_bytes()


def test_marton_run_checks_the_sum_rate_identity():
    result = run({"command": "rate", "options": {"kind": "marton"}}, write=False)
    assert result.exit_code == 0
    assert result.checks == {"sum_rate_identity": True}


def test_moment_table_validation():
    with pytest.raises(ValueError):
        experiments.moment_table(3, "clifford", 1, 1, SeededSampler(0))
    with pytest.raises(ValueError):
        experiments.moment_table(2, "design", 1, 1, SeededSampler(0))


def test_suite_subset():
    result = run({"command": "suite", "seed": 3, "options": {"only": "uhlmann"}}, write=False)
    assert list(result.checks) == ["uhlmann"]
    assert result.exit_code == 0
    assert list(result.table.columns) == ["check", "passed", "detail"]


def test_cli_moments(tmp_path):
    runner = CliRunner(mix_stderr=False)
    outcome = runner.invoke(qdec, ["moments", "--seed", "1", "--sampler", "clifford", "--matrices", "2",
                                   "--samples", "10", "--out", str(tmp_path)])
    assert outcome.exit_code == 0
    summary = json.loads(outcome.stdout)
    assert summary["checks"] == {"exact_design": True}
    assert (tmp_path / "samples.csv").exists()


def test_cli_reports_malformed_input(tmp_path):
    runner = CliRunner(mix_stderr=False)
    outcome = runner.invoke(qdec, ["entropy", "--state", str(tmp_path / "missing.json"), "--out", str(tmp_path)])
    assert outcome.exit_code == 2
    assert "Error:" in outcome.stderr
    outcome = runner.invoke(qdec, ["decouple", "--out", str(tmp_path)])
    assert outcome.exit_code == 2


def test_suite_compares_haar_and_clifford_sampling():
    result = run({"command": "suite", "seed": 4, "options": {"only": "samplers"}}, write=False)
    assert list(result.checks) == ["samplers"]
    assert result.exit_code == 0
