"""Tests for the dqdcorr command line."""

import csv
import io
import json

import pytest
from click.testing import CliRunner
from pydantic import ValidationError

from dqdcorr import cli as cli_module
from dqdcorr.cli import RunConfig, cli
from dqdcorr.engine.errors import OutputError
from dqdcorr.engine.model import ModelParams
from dqdcorr.engine.scan import evaluate_point
from dqdcorr.engine.validation import ValidationCategory, ValidationReport
from dqdcorr.output import SWEEP_COLUMNS
from dqdcorr.version import __version__

STRONG = ["--d1", "10", "--d2", "15", "--v", "160"]


@pytest.fixture
def runner():
    return CliRunner()


def rows(text: str) -> list[dict[str, str]]:
    return list(csv.DictReader(io.StringIO(text)))


class TestRunConfig:
    """Tests for RunConfig."""

    def test_point_needs_temperature(self):
        with pytest.raises(ValidationError, match="needs a temperature"):
            RunConfig(command="point", params=ModelParams(delta1=1.0, delta2=1.0, v=1.0))

    def test_theta_range(self):
        with pytest.raises(ValidationError, match="theta"):
            RunConfig(
                command="sweep",
                params=ModelParams(delta1=1.0, delta2=1.0, v=1.0),
                theta=-0.5,
            )

    def test_check_output(self, tmp_path):
        config = RunConfig(
            command="threshold",
            params=ModelParams(delta1=1.0, delta2=1.0, v=1.0),
            output=str(tmp_path),
        )
        with pytest.raises(OutputError, match="is a directory"):
            config.check_output()


class TestPointCommand:
    """Tests for the point command."""

    def test_ground_state(self, runner):
        result = runner.invoke(cli, ["point", *STRONG, "--t", "0"])
        assert result.exit_code == 0, result.output
        (row,) = rows(result.output)
        assert float(row["concurrence"]) == pytest.approx(0.988, abs=2e-3)
        assert float(row["ground_ll"]) == pytest.approx(0.0547, abs=1e-3)
        assert float(row["ground_lr"]) == pytest.approx(-0.7050, abs=1e-3)
        assert row["path_flag"] == "analytic"

    def test_weak_coulomb(self, runner):
        weak = ["--d1", "10", "--d2", "15", "--v", "1.6666666666666667"]
        result = runner.invoke(cli, ["point", *weak, "--t", "0"])
        assert result.exit_code == 0, result.output
        (row,) = rows(result.output)
        assert float(row["concurrence"]) == pytest.approx(0.066, abs=2e-3)

    def test_infinite_temperature(self, runner):
        result = runner.invoke(cli, ["point", *STRONG, "--t", "inf"])
        assert result.exit_code == 0, result.output
        (row,) = rows(result.output)
        assert row["t"] == "inf"
        assert float(row["rho11"]) == pytest.approx(0.25)
        assert float(row["rho22"]) == pytest.approx(0.25)
        assert float(row["concurrence"]) == 0.0

    def test_json(self, runner):
        result = runner.invoke(cli, ["point", *STRONG, "--t", "10", "--format", "json"])
        assert result.exit_code == 0, result.output
        record = json.loads(result.output)
        assert record["d1"] == 10.0
        assert record["t"] == 10.0
        assert 0.0 < record["concurrence"] < 1.0
        assert record["c_l1_a"] + record["c_l1_b"] == pytest.approx(record["c_l1_local"], abs=1e-11)

    def test_writes_file(self, runner, tmp_path):
        out = tmp_path / "point.csv"
        result = runner.invoke(cli, ["point", *STRONG, "--t", "1", "--output", str(out)])
        assert result.exit_code == 0, result.output
        assert len(rows(out.read_text())) == 1

    def test_missing_coupling(self, runner):
        result = runner.invoke(cli, ["point", "--d1", "10", "--d2", "15", "--t", "1"])
        assert result.exit_code == 1
        assert "--v" in result.output

    def test_negative_temperature(self, runner):
        result = runner.invoke(cli, ["point", *STRONG, "--t", "-1"])
        assert result.exit_code == 1
        assert "Invalid temperature" in result.output

    def test_unsupported_theta(self, runner):
        result = runner.invoke(cli, ["point", *STRONG, "--t", "1", "--theta", "3"])
        assert result.exit_code == 1

    def test_unwritable_output(self, runner, tmp_path):
        out = tmp_path / "missing" / "point.csv"
        result = runner.invoke(cli, ["point", *STRONG, "--t", "1", "--output", str(out)])
        assert result.exit_code == 3
        assert "Cannot write" in result.output


class TestSweepCommand:
    """Tests for the sweep command."""

    def test_csv_rows(self, runner):
        result = runner.invoke(
            cli,
            ["sweep", "--axis", "temperature", "--from", "0", "--to", "100", "--points", "2"]
            + STRONG,
        )
        assert result.exit_code == 0, result.output
        lines = result.output.splitlines()
        assert lines[0] == ",".join(SWEEP_COLUMNS)
        assert len(lines) == 3
        first, last = rows(result.output)
        assert first["axis"] == "temperature"
        assert float(first["concurrence"]) == pytest.approx(0.988, abs=2e-3)
        assert float(last["axis_value"]) == 100.0
        assert float(last["concurrence"]) == 0.0

    def test_coulomb_axis_defaults_swept_value(self, runner, tmp_path):
        out = tmp_path / "coulomb.json"
        result = runner.invoke(
            cli,
            [
                "sweep", "--axis", "coulomb", "--from", "0", "--to", "50", "--points", "6",
                "--d1", "1", "--d2", "1", "--t", "0.1",
                "--format", "json", "--output", str(out),
            ],
        )
        assert result.exit_code == 0, result.output
        assert "normalizer undefined" in result.output
        payload = json.loads(out.read_text())
        assert len(payload["rows"]) == 6
        assert payload["rows"][0]["path_flag"] == "numeric-fallback"
        assert payload["provenance"]["engine"] == f"dqdcorr {__version__}"

    def test_requires_temperature(self, runner):
        result = runner.invoke(
            cli, ["sweep", "--axis", "coulomb", "--from", "0", "--to", "5", *STRONG]
        )
        assert result.exit_code == 1
        assert "temperature is required" in result.output

    def test_rejects_single_point(self, runner):
        result = runner.invoke(
            cli,
            ["sweep", "--axis", "temperature", "--from", "0", "--to", "1", "--points", "1"]
            + STRONG,
        )
        assert result.exit_code == 1


class TestReproducibility:
    """Tests for output that must be reproducible."""

    def test_csv_round_trip(self, runner, tmp_path):
        out = tmp_path / "sweep.csv"
        result = runner.invoke(
            cli,
            [
                "sweep", "--axis", "temperature", "--from", "0.01", "--to", "100",
                "--points", "25", "--log-scale", *STRONG, "--output", str(out),
            ],
        )
        assert result.exit_code == 0, result.output
        params = ModelParams(delta1=10.0, delta2=15.0, v=160.0)
        data = rows(out.read_text())
        assert len(data) == 25
        for row in data:
            m = evaluate_point(params, float(row["axis_value"])).measures
            for column in ("concurrence", "c_l1_total", "c_l1_local", "c_cc"):
                assert float(row[column]) == pytest.approx(getattr(m, column), abs=1e-9)

    def test_sweep_files_identical(self, runner, tmp_path):
        outputs = [tmp_path / "first.csv", tmp_path / "second.csv"]
        for out in outputs:
            result = runner.invoke(
                cli,
                [
                    "sweep", "--axis", "coulomb", "--from", "0", "--to", "50",
                    "--points", "30", "--d1", "10", "--d2", "15", "--t", "5",
                    "--output", str(out),
                ],
            )
            assert result.exit_code == 0, result.output
        assert outputs[0].read_bytes() == outputs[1].read_bytes()

    def test_figure_files_identical(self, runner, tmp_path):
        dirs = [tmp_path / "first", tmp_path / "second"]
        for out in dirs:
            result = runner.invoke(
                cli, ["figure", "fig2", "--output-dir", str(out), "--points", "21"]
            )
            assert result.exit_code == 0, result.output
        names = sorted(p.name for p in dirs[0].iterdir())
        assert names == sorted(p.name for p in dirs[1].iterdir())
        for name in names:
            assert (dirs[0] / name).read_bytes() == (dirs[1] / name).read_bytes()

    def test_validate_report_repeats(self, runner):
        args = ["validate", "--grid", "coarse", "--seed", "7", "--points", "40"]
        first = runner.invoke(cli, args)
        second = runner.invoke(cli, args)
        assert first.exit_code == 0, first.output
        assert "seed=7" in first.output
        assert first.output == second.output


class TestThresholdCommand:
    """Tests for the threshold command."""

    def test_threshold(self, runner):
        result = runner.invoke(cli, ["threshold", "--d1", "10", "--d2", "15", "--v", "10"])
        assert result.exit_code == 0, result.output
        (row,) = rows(result.output)
        assert float(row["t_star"]) == pytest.approx(13.77, abs=0.05)
        assert row["t_hi"] == "auto"

    def test_not_bracketed(self, runner):
        result = runner.invoke(cli, ["threshold", *STRONG, "--t-hi", "10"])
        assert result.exit_code == 1
        assert "not bracketed" in result.output


class TestFigureCommand:
    """Tests for the figure command."""

    def test_writes_one_file_per_curve(self, runner, tmp_path):
        out = tmp_path / "out"
        result = runner.invoke(cli, ["figure", "fig4", "--output-dir", str(out), "--points", "11"])
        assert result.exit_code == 0, result.output
        names = sorted(p.name for p in out.iterdir())
        assert names == ["fig4_d_1.csv", "fig4_d_10.csv", "fig4_d_2.csv", "fig4_d_5.csv"]
        for path in out.iterdir():
            data = rows(path.read_text())
            assert len(data) == 11
            assert float(data[0]["concurrence"]) < 1e-9
        assert result.output.count("Wrote") == 4

    def test_unknown_figure(self, runner):
        result = runner.invoke(cli, ["figure", "fig9"])
        assert result.exit_code == 1


class TestValidateCommand:
    """Tests for the validate command."""

    def test_coarse_passes(self, runner):
        result = runner.invoke(cli, ["validate", "--grid", "coarse", "--points", "40"])
        assert result.exit_code == 0, result.output
        assert "overall: PASS" in result.output

    def test_failure_exit_code(self, runner, monkeypatch):
        def failing(*args, **kwargs):
            return ValidationReport(
                grid="coarse",
                seed=0,
                points=1,
                categories=[ValidationCategory("trace", 1e-12, 1e-3, (1.0, 1.0, 1.0, 1.0))],
            )

        monkeypatch.setattr(cli_module, "run_validation", failing)
        result = runner.invoke(cli, ["validate", "--grid", "coarse"])
        assert result.exit_code == 2
        assert "overall: FAIL" in result.output


class TestGlobalOptions:
    """Tests for group-level options."""

    def test_version(self, runner):
        result = runner.invoke(cli, ["--version"])
        assert result.exit_code == 0
        assert __version__ in result.output

    def test_missing_config(self, runner, tmp_path):
        result = runner.invoke(
            cli, ["--config", str(tmp_path / "none.yaml"), "point", *STRONG, "--t", "1"]
        )
        assert result.exit_code == 1
        assert "Config file not found" in result.output

    def test_settings_file_sets_sweep_points(self, runner, tmp_path):
        (tmp_path / "dqdcorr.yaml").write_text("sweep_points: 4\n")
        result = runner.invoke(
            cli, ["sweep", "--axis", "temperature", "--from", "0", "--to", "10", *STRONG]
        )
        assert result.exit_code == 0, result.output
        assert len(rows(result.output)) == 4
