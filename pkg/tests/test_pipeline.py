"""Tests for the subcommand runner, artifact writers and CLI entry point."""

import json

import pandas as pd
import pytest
import yaml

import run
from src.output.writers import ArtifactWriter, write_series_csv
from src.pipeline.runner import (
    EXIT_CONFIG,
    EXIT_CONVERGENCE,
    EXIT_ERROR,
    EXIT_OK,
    EXIT_VALIDATION,
    Pipeline,
    run_pipeline,
)
from src.utils.exceptions import ConfigError, ConvergenceError, DomainError, NumericalError, StatisticalError
from src.utils.helpers import load_config
from src.utils.run_config import RunConfig, apply_overrides, load_run_config


def _write_config(tmp_path, **sections):
    """Small two-site run configuration rooted in ``tmp_path``."""
    data = {
        "schema_version": 1,
        "model": {"u_c": 8.0, "eps": [4.0, 0.0], "v": [1.0]},
        "evolution": {"dt": 0.05, "horizon": 2.0},
        "validate": {"horizon": 2.0},
        "resources": {"trotter_ratio": {"n_substeps": [1, 2], "n_timesteps": 5}},
        "output": {"dir": str(tmp_path / "out")},
    }
    for section, values in sections.items():
        data.setdefault(section, {}).update(values)
    path = tmp_path / "run.yaml"
    path.write_text(yaml.safe_dump(data))
    return str(path)


def _header(path):
    lines = [line for line in path.read_text().splitlines() if line.startswith("# ")]
    return dict(line[2:].split(": ", 1) for line in lines)


@pytest.fixture
def config(tmp_path):
    return load_run_config(_write_config(tmp_path))


class TestRunConfig:
    """Tests for typed configuration loading."""

    def test_defaults(self):
        """Test the packaged defaults."""
        config = load_run_config()

        assert config.model.params.n_bath == 1
        assert config.measurement.resolved_shots == 10000
        assert config.evolution.grid.n_points == 1668

    def test_overrides(self, tmp_path):
        """Test that CLI overrides reach the typed settings."""
        config = load_run_config(_write_config(tmp_path), seed=5, shots=0, mode="lcu", format="json", threshold=1e-3)

        assert config.measurement.seed == 5
        assert config.measurement.resolved_shots == 0
        assert config.measurement.mode.value == "lcu"
        assert config.output.format == "json"
        assert config.validate.threshold == 1e-3

    def test_unknown_override(self):
        """Test that unknown overrides raise."""
        with pytest.raises(ConfigError):
            apply_overrides(load_config(), bogus=1)

    def test_invalid_value(self, tmp_path):
        """Test that invalid enum values become ConfigError."""
        with pytest.raises(ConfigError):
            load_run_config(_write_config(tmp_path, evolution={"mode": "magnus"}))

    def test_invalid_format(self, tmp_path):
        """Test that only csv and json are accepted."""
        data = apply_overrides(load_config(_write_config(tmp_path)), format="xlsx")

        with pytest.raises(ConfigError):
            RunConfig.from_dict(data)

    def test_hash_tracks_content(self, tmp_path):
        """Test that the config hash changes with the seed."""
        path = _write_config(tmp_path)

        assert load_run_config(path).hash == load_run_config(path).hash
        assert load_run_config(path, seed=1).hash != load_run_config(path).hash


class TestArtifactWriter:
    """Tests for ArtifactWriter class."""

    def test_csv_header(self, tmp_path):
        """Test sorted provenance comment lines ahead of the table."""
        writer = ArtifactWriter(tmp_path, {"seed": 3, "command": "greens"})

        path = writer.write_csv(pd.DataFrame({"t": [0.0, 0.5]}), "x.csv", {"p": 2})

        lines = path.read_text().splitlines()
        assert lines[:3] == ["# command: greens", "# p: 2", "# seed: 3"]
        assert lines[3] == "t"
        frame = pd.read_csv(path, comment="#")
        assert frame["t"].tolist() == [0.0, 0.5]

    def test_json_merges_provenance(self, tmp_path):
        """Test that provenance keys are merged into reports."""
        writer = ArtifactWriter(tmp_path / "nested", {"seed": 3})

        path = writer.write_json({"value": 1.5}, "r.json")

        assert json.loads(path.read_text()) == {"seed": 3, "value": 1.5}

    def test_gnuplot(self, tmp_path):
        """Test the emitted plotting script."""
        path = ArtifactWriter(tmp_path).write_gnuplot("spectrum.csv", "spectrum.gp", "omega", "A")

        text = path.read_text()
        assert "plot 'spectrum.csv'" in text
        assert "set datafile commentschars '#'" in text

    def test_write_series_csv(self, tmp_path):
        """Test the convenience function."""
        path = write_series_csv(pd.DataFrame({"a": [1]}), tmp_path / "s.csv", {"source": "ed"})

        assert path.read_text().startswith("# source: ed\n")


class TestPipeline:
    """Tests for Pipeline and run_pipeline."""

    def test_unknown_command(self, config):
        """Test that unknown commands are configuration errors."""
        with pytest.raises(ConfigError):
            Pipeline(config, "plot")
        assert run_pipeline(config, "plot") == EXIT_CONFIG

    def test_solve_cc(self, config, tmp_path):
        """Test the amplitude report."""
        assert run_pipeline(config, "solve-cc") == EXIT_OK

        report = json.loads((tmp_path / "out" / "cc_amplitudes.json").read_text())
        assert report["amplitudes"]["converged"] is True
        assert report["reference"]["occupation"] == "0110"
        assert report["full_expansion_size"] == 3
        assert report["command"] == "solve-cc"
        assert report["config_hash"] == config.hash

    def test_greens_csv(self, config, tmp_path):
        """Test the Green's function table and its provenance header."""
        assert run_pipeline(config, "greens", dump_lcu=True) == EXIT_OK

        path = tmp_path / "out" / "greens.csv"
        header = _header(path)
        frame = pd.read_csv(path, comment="#")
        assert header["command"] == "greens"
        assert header["seed"] == "0"
        assert header["config_hash"] == config.hash
        assert len(frame) == 41
        assert frame["re_g"].iloc[0] == pytest.approx(1.0, abs=1e-10)
        assert (tmp_path / "out" / "lcu_lesser.csv").exists()
        assert (tmp_path / "out" / "lcu_greater.csv").exists()

    def test_greens_json(self, tmp_path):
        """Test the JSON form of the Green's function."""
        config = load_run_config(_write_config(tmp_path), format="json")

        assert run_pipeline(config, "greens") == EXIT_OK

        payload = json.loads((tmp_path / "out" / "greens.json").read_text())
        assert payload["provenance"]["source"] == "cc"
        assert len(payload["columns"]["t"]) == 41

    def test_byte_identical_rerun(self, tmp_path):
        """Test that a seeded sampled run reproduces its artifact exactly."""
        config = load_run_config(_write_config(tmp_path), mode="hadamard", shots=200, seed=3)
        path = tmp_path / "out" / "greens.csv"

        run_pipeline(config, "greens")
        first = path.read_bytes()
        run_pipeline(config, "greens")

        assert path.read_bytes() == first

    def test_spectrum(self, config, tmp_path):
        """Test the spectrum table and gnuplot script."""
        assert run_pipeline(config, "spectrum") == EXIT_OK

        header = _header(tmp_path / "out" / "spectrum.csv")
        assert header["delta"] == "0.10000000000000001"
        assert (tmp_path / "out" / "spectrum.gp").exists()

    def test_resources(self, config, tmp_path):
        """Test the resource report."""
        assert run_pipeline(config, "resources") == EXIT_OK

        payload = json.loads((tmp_path / "out" / "resources.json").read_text())
        assert payload["upsilon"] == pytest.approx(10.0 / 3.0)
        assert len(payload["reports"]) == 5
        assert (tmp_path / "out" / "resources.csv").exists()

    def test_trotter_ratio(self, config, tmp_path):
        """Test one row per split, substep count and time step."""
        assert run_pipeline(config, "trotter-ratio") == EXIT_OK

        frame = pd.read_csv(tmp_path / "out" / "trotter_ratio.csv", comment="#")
        assert len(frame) == 20
        assert sorted(frame["n_substeps"].unique()) == [1, 2]
        assert sorted(frame["split"].unique()) == ["interaction", "potential"]

    def test_trotter_ratio_single_split(self, tmp_path):
        """Test that the split list is configurable."""
        ratio = {"n_substeps": [1], "n_timesteps": 3, "splits": ["interaction"]}
        config = load_run_config(_write_config(tmp_path, resources={"trotter_ratio": ratio}))

        assert run_pipeline(config, "trotter-ratio") == EXIT_OK

        frame = pd.read_csv(tmp_path / "out" / "trotter_ratio.csv", comment="#")
        assert list(frame["split"]) == ["interaction"] * 3

    def test_validate_passes(self, config, tmp_path):
        """Test that the exact hybrid function matches ED."""
        assert run_pipeline(config, "validate") == EXIT_OK

        report = json.loads((tmp_path / "out" / "validate.json").read_text())
        assert report["passed"] is True
        assert report["max_deviation"] <= 1e-6

    def test_validate_fails(self, tmp_path):
        """Test that a truncated expansion fails validation."""
        config = load_run_config(_write_config(tmp_path, greens={"expansion": "t1-only"}))

        assert run_pipeline(config, "validate") == EXIT_VALIDATION

        report = json.loads((tmp_path / "out" / "validate.json").read_text())
        assert report["passed"] is False

    def test_convergence_failure(self, tmp_path):
        """Test that an iteration cap maps onto the convergence exit code."""
        config = load_run_config(_write_config(tmp_path, cc={"max_iter": 1, "guess": "zero"}))

        assert run_pipeline(config, "solve-cc") == EXIT_CONVERGENCE

    def test_convergence_failure_mocked(self, config, mocker):
        """Test the exit code when the solver raises."""
        mocker.patch(
            "src.pipeline.runner.CoupledClusterSolver.solve",
            side_effect=ConvergenceError("no convergence", residual_norm=1.0, iterations=200),
        )

        assert run_pipeline(config, "greens") == EXIT_CONVERGENCE

    @pytest.mark.parametrize("error", [
        DomainError("bad orbital"),
        NumericalError("singular", condition_number=1e18),
        StatisticalError("no accepted shots"),
    ])
    def test_package_error_exit_code(self, config, mocker, error):
        """Test that other package errors are logged and map onto the generic code."""
        mocker.patch("src.pipeline.runner.CoupledClusterSolver.solve", side_effect=error)

        assert run_pipeline(config, "solve-cc") == EXIT_ERROR

    def test_invalid_split(self, tmp_path):
        """Test that an unknown Trotter split is a configuration error."""
        ratio = {"splits": ["kinetic"]}
        with pytest.raises(ConfigError):
            load_run_config(_write_config(tmp_path, resources={"trotter_ratio": ratio}))


class TestMain:
    """Tests for the command-line entry point."""

    def test_missing_config(self, tmp_path):
        """Test that a missing config file exits with the config code."""
        assert run.main(["solve-cc", "--config", str(tmp_path / "missing.yaml")]) == EXIT_CONFIG

    def test_unknown_key(self, tmp_path):
        """Test that an unknown key exits with the config code."""
        path = tmp_path / "bad.yaml"
        path.write_text("schema_version: 1\nmodel:\n  bogus: 1\n")

        assert run.main(["solve-cc", "--config", str(path)]) == EXIT_CONFIG

    def test_resources(self, tmp_path, capsys):
        """Test a full run through the CLI."""
        out = tmp_path / "cli"

        code = run.main(["resources", "--config", _write_config(tmp_path), "--out", str(out), "--format", "json"])

        assert code == EXIT_OK
        assert "Upsilon" in capsys.readouterr().out
        assert (out / "resources.json").exists()
        assert not (out / "resources.csv").exists()

    def test_requires_command(self):
        """Test that a subcommand is mandatory."""
        with pytest.raises(SystemExit):
            run.parse_args([])
