"""Tests for the Typer command-line interface."""

import importlib
import json
import pkgutil

import pytest
from typer.testing import CliRunner

import thinprice
from thinprice.cli.app import app
from thinprice.errors import EXIT_CONFIG, EXIT_DATA, EXIT_OK

runner = CliRunner()


@pytest.fixture
def config_file(tmp_path):
    payload = {
        "input": {"synthetic": {"synth": {"n_fsu": 40, "within_fsu_price_jitter": 0.0}}},
        "repetitions": 10,
        "master_seed": 5,
        "output_dir": str(tmp_path / "out"),
        "threads": 1,
    }
    path = tmp_path / "study.json"
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


def invoke(*args):
    return runner.invoke(app, [str(a) for a in args])


class TestCommands:
    def test_version(self):
        result = invoke("version")
        assert result.exit_code == EXIT_OK
        assert thinprice.__version__ in result.stdout

    def test_info(self):
        result = invoke("info")
        assert result.exit_code == EXIT_OK
        assert "thinprice" in result.stdout

    def test_run(self, config_file, tmp_path):
        result = invoke("run", "--config", config_file)
        assert result.exit_code == EXIT_OK, result.stdout
        assert (tmp_path / "out" / "manifest.json").is_file()
        assert "accept" in result.stdout

    def test_screen(self, config_file, tmp_path):
        result = invoke("screen", "-c", config_file)
        assert result.exit_code == EXIT_OK
        assert (tmp_path / "out" / "screening.json").is_file()
        assert not (tmp_path / "out" / "prevalence.csv").exists()

    def test_prevalence_with_output_override(self, config_file, tmp_path):
        result = invoke("prevalence", "-c", config_file, "--output", tmp_path / "other")
        assert result.exit_code == EXIT_OK
        assert (tmp_path / "other" / "prevalence_table.csv").is_file()

    def test_analyze_with_items_and_seed(self, config_file, tmp_path):
        result = invoke(
            "analyze", "-c", config_file, "--items", "101", "--seed", "9", "--threads", "2"
        )
        assert result.exit_code == EXIT_OK
        manifest = json.loads((tmp_path / "out" / "manifest.json").read_text(encoding="utf-8"))
        assert manifest["master_seed"] == 9
        assert manifest["config"]["items"] == [101]

    def test_unknown_item_exit_code(self, config_file, tmp_path):
        result = invoke("analyze", "-c", config_file, "--items", "101,999")
        assert result.exit_code == EXIT_DATA
        assert (tmp_path / "out" / "failures.json").is_file()

    def test_synth(self, config_file, tmp_path):
        target = tmp_path / "data" / "survey.csv"
        result = invoke("synth", "-c", config_file, "--csv", target)
        assert result.exit_code == EXIT_OK
        assert target.is_file()
        assert (tmp_path / "data" / "survey_truth.json").is_file()

    def test_report_after_run(self, config_file):
        assert invoke("run", "-c", config_file).exit_code == EXIT_OK
        result = invoke("report", "-c", config_file, "--csv")
        assert result.exit_code == EXIT_OK
        assert "item_code,q=0.5,q=0.4,q=0.3" in result.stdout
        assert "item_code,sample_size,p_value_at_rank_c" in result.stdout

    def test_report_without_run(self, config_file):
        assert invoke("report", "-c", config_file).exit_code == EXIT_DATA


class TestConfigErrors:
    def test_missing_config(self, tmp_path):
        assert invoke("run", "-c", tmp_path / "absent.json").exit_code == EXIT_CONFIG

    def test_invalid_config(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"alpha": 1.5}), encoding="utf-8")
        result = invoke("run", "-c", path)
        assert result.exit_code == EXIT_CONFIG
        assert "alpha" in result.stdout

    def test_bad_items_override(self, config_file):
        assert invoke("screen", "-c", config_file, "--items", "fish").exit_code == EXIT_CONFIG

    def test_negative_threads(self, config_file):
        assert invoke("analyze", "-c", config_file, "--threads", "-1").exit_code == EXIT_CONFIG

    def test_negative_seed(self, config_file):
        result = invoke("run", "-c", config_file, "--seed", "-5")
        assert result.exit_code == EXIT_CONFIG
        assert "master_seed" in result.stdout

    @pytest.mark.parametrize("payload", [{"alpha": "abc"}, {"audit_selections": "false"}])
    def test_wrongly_typed_value(self, tmp_path, payload):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(payload), encoding="utf-8")
        result = invoke("run", "-c", path)
        assert result.exit_code == EXIT_CONFIG
        assert next(iter(payload)) in result.stdout


class TestPackageImports:
    @pytest.mark.parametrize(
        "name",
        sorted(m.name for m in pkgutil.walk_packages(thinprice.__path__, "thinprice.")),
    )
    def test_module_imports(self, name):
        assert importlib.import_module(name) is not None

    def test_app_registers_every_command(self):
        names = {c.name or c.callback.__name__ for c in app.registered_commands}
        assert {"screen", "prevalence", "analyze", "run", "synth", "report"} <= names
