import json

import pytest

from grassmannlab.experiments import (
    REGISTRY,
    ExperimentConfig,
    PreconditionError,
    UnknownExperimentError,
    run_experiment,
)

REGISTERED = [
    "closure-lines", "closure-planes", "lemma-pair", "asymmetry", "spine-sat",
    "locus-circle", "lift-check", "sweep-cardioid", "sweep-converge",
]


class TestRegistry:
    def test_all_experiments_registered(self):
        assert sorted(REGISTRY) == sorted(REGISTERED)

    def test_indices_are_stable(self):
        assert [REGISTRY[name].index for name in REGISTERED] == list(range(9))

    def test_unknown_experiment(self, tmp_path):
        with pytest.raises(UnknownExperimentError):
            run_experiment(ExperimentConfig("no-such-thing", output_dir=str(tmp_path)))

    def test_dims_precondition(self, tmp_path):
        cfg = ExperimentConfig("closure-lines", dims={"r": 2, "d": 3, "n": 4},
                               output_dir=str(tmp_path))
        with pytest.raises(PreconditionError):
            run_experiment(cfg)
        cfg = ExperimentConfig("lemma-pair", dims={"r": 2, "d": 4, "n": 5},
                               output_dir=str(tmp_path))
        with pytest.raises(PreconditionError):
            run_experiment(cfg)


class TestRunExperiment:
    def test_lemma_pair_passes(self, tmp_path):
        cfg = ExperimentConfig("lemma-pair", seed=7, output_dir=str(tmp_path),
                               budgets={"direction_samples": 2000})
        rep = run_experiment(cfg)
        assert rep.passed
        assert rep.verdict["kind"] == "two_element"
        assert rep.metrics["full_rank_escapes"] == {"forward": 0, "reverse": 0}

    def test_sweep_cardioid_and_artifacts(self, tmp_path):
        rep = run_experiment(ExperimentConfig("sweep-cardioid", seed=1,
                                              output_dir=str(tmp_path)))
        assert rep.passed
        assert rep.metrics["sup_error"] < 1e-4
        for name in rep.artifacts:
            assert (tmp_path / name).exists()
        assert any(name.endswith(".svg") for name in rep.artifacts)
        assert any(name.endswith(".csv") for name in rep.artifacts)

    def test_asymmetry_passes(self, tmp_path):
        rep = run_experiment(ExperimentConfig(
            "asymmetry", seed=3, output_dir=str(tmp_path),
            budgets={"reverse_samples": 2000}))
        assert rep.passed
        assert rep.metrics["dim_sum"] == 4
        assert rep.metrics["reverse_matches"] == 0

    def test_locus_circle_passes(self, tmp_path):
        rep = run_experiment(ExperimentConfig("locus-circle", seed=5,
                                              output_dir=str(tmp_path)))
        assert rep.passed
        assert rep.metrics["max_distance"] < 1e-9

    def test_lift_check_passes(self, tmp_path):
        rep = run_experiment(ExperimentConfig(
            "lift-check", seed=9, output_dir=str(tmp_path),
            budgets={"trials": 300}))
        assert rep.passed
        assert rep.metrics["max_discrepancy"] < 1e-10

    def test_spine_sat_passes(self, tmp_path):
        rep = run_experiment(ExperimentConfig(
            "spine-sat", seed=11, output_dir=str(tmp_path),
            budgets={"trials": 150}))
        assert rep.passed
        assert rep.metrics["violations"] == 0
        assert rep.metrics["witnesses"] > 0


class TestReportFiles:
    def test_schema_and_no_wall_time(self, tmp_path):
        rep = run_experiment(ExperimentConfig("sweep-cardioid", seed=4,
                                              output_dir=str(tmp_path)))
        data = json.loads((tmp_path / "sweep-cardioid_seed4.json").read_text())
        assert data["schema"] == 1
        assert data["pass"] is True
        assert data["experiment"] == "sweep-cardioid"
        assert "wall_time" not in json.dumps(data)
        assert rep.wall_time_s > 0

    def test_reports_byte_identical_across_runs(self, tmp_path):
        out1, out2 = tmp_path / "one", tmp_path / "two"
        for out in (out1, out2):
            run_experiment(ExperimentConfig(
                "lemma-pair", seed=13, output_dir=str(out),
                budgets={"direction_samples": 1000}))
        f1 = (out1 / "lemma-pair_seed13.json").read_bytes()
        f2 = (out2 / "lemma-pair_seed13.json").read_bytes()
        assert f1 == f2

    def test_seed_changes_report(self, tmp_path):
        reports = []
        for seed in (1, 2):
            run_experiment(ExperimentConfig(
                "locus-circle", seed=seed, output_dir=str(tmp_path)))
            reports.append((tmp_path / f"locus-circle_seed{seed}.json").read_text())
        assert reports[0] != reports[1]


class TestParallelVerify:
    def test_process_pool_matches_serial(self, tmp_path, monkeypatch):
        from grassmannlab import experiments as exp_mod
        small = {name: exp_mod.REGISTRY[name]
                 for name in ("locus-circle", "sweep-cardioid", "lift-check")}
        monkeypatch.setattr(exp_mod, "REGISTRY", small)
        serial = exp_mod.verify_all(seed=5, output_dir=str(tmp_path / "serial"))
        parallel = exp_mod.verify_all(seed=5, output_dir=str(tmp_path / "parallel"),
                                      parallel=True)
        assert [r.passed for r in serial] == [r.passed for r in parallel]
        for rep in serial:
            name = f"{rep.experiment}_seed{rep.seed}.json"
            assert ((tmp_path / "serial" / name).read_bytes()
                    == (tmp_path / "parallel" / name).read_bytes())
