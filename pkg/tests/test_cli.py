import json

import pytest

from grassmannlab.cli import main
from grassmannlab.sweep import circle_profile


class TestRun:
    def test_passing_experiment_exit_zero(self, tmp_path, capsys):
        code = main(["run", "sweep-cardioid", "--seed", "3", "--out", str(tmp_path)])
        assert code == 0
        assert "[PASS] sweep-cardioid" in capsys.readouterr().out
        assert (tmp_path / "sweep-cardioid_seed3.json").exists()

    def test_bad_dims_exit_two(self, tmp_path, capsys):
        code = main(["run", "closure-lines", "--dims", "2,3,4", "--out", str(tmp_path)])
        assert code == 2
        assert "error" in capsys.readouterr().err

    def test_config_file_with_flag_override(self, tmp_path, capsys):
        cfg = tmp_path / "exp.toml"
        cfg.write_text(
            'experiment = "sweep-cardioid"\nseed = 5\noutput_dir = "ignored"\n'
            '[budgets]\ngrid_size = 1024\n'
        )
        code = main(["run", "sweep-cardioid", "--config", str(cfg),
                     "--seed", "6", "--out", str(tmp_path)])
        assert code == 0
        data = json.loads((tmp_path / "sweep-cardioid_seed6.json").read_text())
        assert data["seed"] == 6  # flag beat the file
        assert data["metrics"]["grid_size"] == 1024  # file budget respected

    def test_json_config(self, tmp_path):
        cfg = tmp_path / "exp.json"
        cfg.write_text(json.dumps({"seed": 9, "budgets": {"trials": 100}}))
        code = main(["run", "lift-check", "--config", str(cfg), "--out", str(tmp_path)])
        assert code == 0
        assert (tmp_path / "lift-check_seed9.json").exists()


class TestSweepCommand:
    def test_circle_sweep_with_svg(self, tmp_path):
        code = main(["sweep", "--input", "circle", "--grid", "256", "--iters", "20",
                     "--out", str(tmp_path), "--svg"])
        assert code == 0
        report = json.loads((tmp_path / "sweep.json").read_text())
        assert report["iterations"] == 20
        assert (tmp_path / "sweep_final.csv").exists()
        assert (tmp_path / "sweep.svg").exists()

    def test_radial_json_input(self, tmp_path):
        src = tmp_path / "profile.json"
        src.write_text(json.dumps(circle_profile(1.0, 128).to_json_dict()))
        code = main(["sweep", "--input", str(src), "--iters", "5",
                     "--out", str(tmp_path)])
        assert code == 0


class TestClosureCommand:
    def test_small_line_closure(self, tmp_path):
        code = main(["closure", "--dims", "1,2,3", "--seed", "4",
                     "--pairs", "50", "--pi-samples", "4", "--cap", "4000",
                     "--out", str(tmp_path), "--dump-planes"])
        assert code == 0
        verdict = json.loads((tmp_path / "closure.json").read_text())
        assert verdict["verdict"]["kind"] in ("full", "unresolved")
        planes = json.loads((tmp_path / "closure_planes.json").read_text())
        assert planes["r"] == 1 and planes["d"] == 2
        assert len(planes["planes"]) == verdict["verdict"]["size"]

    def test_dims_required(self, capsys):
        assert main(["closure"]) == 2
        assert "dims" in capsys.readouterr().err


class TestRenderCommand:
    def test_render_from_file(self, tmp_path):
        src = tmp_path / "rho.json"
        src.write_text(json.dumps(circle_profile(1.0, 128).to_json_dict()))
        out = tmp_path / "out.svg"
        code = main(["render", str(src), "--out", str(out)])
        assert code == 0
        assert out.exists()

    def test_labelled_bundle(self, tmp_path):
        bundle = tmp_path / "curves.json"
        bundle.write_text(json.dumps([
            {"label": "first", "radial": circle_profile(1.0, 128).to_json_dict()},
            {"label": "second", "radial": circle_profile(2.0, 128).to_json_dict()},
        ]))
        out = tmp_path / "bundle.svg"
        assert main(["render", str(bundle), "--out", str(out)]) == 0
        text = out.read_text()
        assert "first" in text and "second" in text


class TestVerifyHelpers:
    def test_unknown_subcommand_rejected(self):
        with pytest.raises(SystemExit):
            main(["frobnicate"])

    def test_unknown_experiment_rejected_by_parser(self):
        with pytest.raises(SystemExit):
            main(["run", "not-an-experiment"])

    @pytest.mark.parametrize("outcomes,expected", [((True, True), 0), ((True, False), 1)])
    def test_verify_exit_code(self, monkeypatch, outcomes, expected, capsys):
        from grassmannlab import cli as cli_mod
        from grassmannlab.experiments import ExperimentReport

        def fake_verify_all(seed, output_dir, parallel=False):
            return [ExperimentReport(experiment=f"exp{i}", seed=seed, config={},
                                     verdict=None, metrics={}, passed=ok,
                                     wall_time_s=0.0, artifacts=[])
                    for i, ok in enumerate(outcomes)]

        monkeypatch.setattr(cli_mod, "verify_all", fake_verify_all)
        assert main(["verify", "--out", "unused"]) == expected
