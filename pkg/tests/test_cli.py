import json
from pathlib import Path

import numpy as np
import pytest

from defensedyn.cli import DATASETS, ExperimentConfig, cmd_run, load_config, main


def write_config(path: Path, out_dir: Path, **overrides) -> Path:
    lines = {
        "graph": {"synthetic": '"cycle"', "n": 8, "directed": "false"},
        "params": {"alpha": 0.0, "beta": 0.3, "gamma": 0.2},
        "ode": {"step": 0.05},
        "mc": {
            "dt": 0.05,
            "runs": 4,
            "init_interval": "[0.2, 0.9]",
            "master_seed": 11,
            "record_stride": 1,
        },
        "experiment": {"t_end": 40.0, "window": "[10.0, 40.0]"},
        "output": {"dir": f'"{out_dir}"'},
    }
    for section, values in overrides.items():
        lines.setdefault(section, {}).update(values)
    text = ""
    for section, values in lines.items():
        text += f"[{section}]\n"
        for key, value in values.items():
            text += f"{key} = {value}\n"
        text += "\n"
    path.write_text(text)
    return path


class TestConfig:
    def test_load_and_defaults(self, tmp_path):
        cfg_path = write_config(tmp_path / "e.toml", tmp_path / "out")
        cfg = load_config(cfg_path)
        assert cfg.synthetic == "cycle"
        assert cfg.runs == 4
        assert cfg.boundary_tol == 1e-6  # default applied

    def test_unknown_section_rejected(self, tmp_path):
        p = tmp_path / "bad.toml"
        p.write_text("[nonsense]\nx = 1\n")
        with pytest.raises(Exception, match="unknown config section"):
            load_config(p)

    def test_unknown_key_rejected(self, tmp_path):
        p = tmp_path / "bad.toml"
        p.write_text("[graph]\nsynthetic = 'cycle'\nbananas = 3\n")
        with pytest.raises(Exception, match="unknown key"):
            load_config(p)

    def test_missing_graph_file_names_path(self, tmp_path, capsys):
        cfg_path = tmp_path / "e.toml"
        cfg_path.write_text(
            '[graph]\npath = "no/such/file.txt"\n\n[params]\nalpha = 0.0\nbeta = 0.5\ngamma = 0.2\n'
        )
        code = main(["spectral", "--config", str(cfg_path)])
        assert code == 1
        assert "no/such/file.txt" in capsys.readouterr().err

    def test_zero_runs_rejected(self, tmp_path, capsys):
        cfg_path = write_config(tmp_path / "e.toml", tmp_path / "out", mc={"runs": 0})
        code = main(["run", "--config", str(cfg_path)])
        assert code == 1
        assert "runs" in capsys.readouterr().err

    def test_usage_error_exit_code(self, capsys):
        assert main(["no-such-command"]) == 1
        assert main([]) == 1


class TestCommands:
    def test_spectral_below_threshold(self, tmp_path, capsys):
        out = tmp_path / "out"
        cfg = write_config(
            tmp_path / "e.toml", out,
            graph={"synthetic": '"cycle"', "n": 2, "directed": "false"},
            params={"alpha": 0.0, "beta": 0.9, "gamma": 0.3},
        )
        assert main(["spectral", "--config", str(cfg)]) == 0
        payload = json.loads((out / "spectral.json").read_text())
        assert payload["spectral"]["regime"] == "BelowThreshold"
        assert payload["spectral"]["lambda_A1"] == pytest.approx(1.0, abs=1e-9)
        assert payload["graph"]["n"] == 2

    def test_equilibrium_json(self, tmp_path):
        out = tmp_path / "out"
        cfg = write_config(
            tmp_path / "e.toml", out, params={"alpha": 1.0, "beta": 1.0, "gamma": 1.0}
        )
        assert main(["equilibrium", "--config", str(cfg)]) == 0
        payload = json.loads((out / "equilibrium.json").read_text())
        assert payload["i_star"] == pytest.approx([0.5] * 8)
        assert payload["stability_margin"] == pytest.approx(-2.0, abs=1e-8)

    def test_simulate_ode_and_speed_and_bounds(self, tmp_path):
        out = tmp_path / "out"
        cfg = write_config(tmp_path / "e.toml", out)
        assert main(["simulate-ode", "--config", str(cfg)]) == 0
        header = (out / "ode.csv").read_text().splitlines()[0]
        assert header == "t," + ",".join(f"i_{v}" for v in range(8))
        assert main(["speed", "--config", str(cfg)]) == 0
        assert (out / "speed.csv").read_text().splitlines()[0] == "t,S"
        assert json.loads((out / "speed_verdict.json").read_text())["kind"] in (
            "Polynomial",
            "Exponential",
        )
        assert main(["bounds", "--config", str(cfg)]) == 0
        assert (out / "bounds.csv").read_text().splitlines()[0] == "t,mean_lower,mean_i,mean_upper"

    def test_simulate_mc_outputs(self, tmp_path):
        out = tmp_path / "out"
        cfg = write_config(tmp_path / "e.toml", out)
        assert main(["simulate-mc", "--config", str(cfg)]) == 0
        run_files = sorted((out / "runs").glob("run_*.csv"))
        assert len(run_files) == 4
        assert run_files[0].read_text().splitlines()[0] == "t,fraction"

    def test_run_bundle_and_determinism(self, tmp_path):
        out = tmp_path / "out"
        cfg = write_config(tmp_path / "e.toml", out)
        assert main(["run", "--config", str(cfg)]) == 0
        names = ["ode.csv", "ensemble.csv", "bounds.csv", "speed.csv", "report.json"]
        first = {name: (out / name).read_bytes() for name in names}
        report = json.loads(first["report.json"])
        assert report["spectral"]["regime"] == "AboveThreshold"
        assert (out / "ensemble.csv").read_text().splitlines()[0] == (
            "t,mean_fraction,ode_mean,lower_mean,upper_mean"
        )
        # byte-identical on re-run
        assert main(["run", "--config", str(cfg)]) == 0
        for name in names:
            assert (out / name).read_bytes() == first[name], name

    def test_run_round_trips_through_echoed_config(self, tmp_path):
        out = tmp_path / "out"
        cfg = write_config(tmp_path / "e.toml", out)
        assert main(["run", "--config", str(cfg)]) == 0
        report = json.loads((out / "report.json").read_text())
        baseline = {
            name: (out / name).read_bytes()
            for name in ("ode.csv", "ensemble.csv", "bounds.csv", "speed.csv")
        }
        echoed = ExperimentConfig.from_dict(report["config"])
        assert cmd_run(echoed) == 0
        for name, blob in baseline.items():
            assert (out / name).read_bytes() == blob, name

    def test_flag_overrides(self, tmp_path):
        out = tmp_path / "out"
        cfg = write_config(
            tmp_path / "e.toml", out,
            graph={"synthetic": '"cycle"', "n": 2, "directed": "false"},
            params={"alpha": 0.0, "beta": 0.9, "gamma": 0.3},
        )
        assert main(["spectral", "--config", str(cfg), "--beta", "0.1"]) == 0
        payload = json.loads((out / "spectral.json").read_text())
        assert payload["spectral"]["regime"] == "AboveThreshold"  # beta/gamma = 1/3 < 1


class TestFetchDataVerification:
    def test_structure_mismatch_detected(self, tmp_path, capsys):
        # a present-but-wrong file is rejected without any download
        bogus = tmp_path / DATASETS["gnutella"]["filename"]
        import gzip

        with gzip.open(bogus, "wt") as fh:
            fh.write("0 1\n1 2\n")
        code = main(["fetch-data", "gnutella", "--dir", str(tmp_path)])
        assert code == 1
        assert "structure mismatch" in capsys.readouterr().err

    def test_sha256_requires_single_dataset(self, capsys):
        assert main(["fetch-data", "all", "--sha256", "ff"]) == 1
