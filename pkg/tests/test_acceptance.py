"""Acceptance gates: every bundled verification at its stated tolerance.

Each test prints one ``[criterion NN] PASS|FAIL`` line (visible with -s).

Criterion 3 is asserted exactly as stated and is expected to fail: the
sweep operator approaches its limiting ball only harmonically (the gap to
the constant profile after n steps is about max_rho * pi^2 / (2n), about
1e-2 after 500 steps, and on an N-point grid the iteration terminates at a
fixed point with residual ripple about max_rho * pi^2 / N).  No grid or
iteration budget near 500 can reach a 1e-5 ball tolerance; the measured
trajectory is pinned in tests/fixtures/sweep_calibration.json.  The gate
keeps its strict tolerance rather than being weakened to fit the operator.
"""

import time

import numpy as np
import pytest

from grassmannlab import rng as rng_mod
from grassmannlab.experiments import ExperimentConfig, run_experiment, verify_all
from grassmannlab.saturation import FeasibilityError, prescribe_intersection
from grassmannlab.subspaces import (
    Subspace,
    chordal_distance,
    intersect,
    project_subspace,
    random_subspace,
)
from grassmannlab.sweep import (
    RadialFunction,
    cardioid_reference,
    circle_profile,
    delta_radial,
    random_star_profile,
)


def announce(num: int, ok: bool, elapsed: float, budget: float, detail: str) -> None:
    status = "PASS" if ok and elapsed < budget else "FAIL"
    print(f"[criterion {num:02d}] {status} ({elapsed:.1f}s / budget {budget:g}s) {detail}")


def test_criterion_01_cardioid_oracle():
    t0 = time.perf_counter()
    rho = circle_profile(1.0, 2048)
    swept = delta_radial(rho)
    sup_err = float(np.abs(swept.values - cardioid_reference(1.0, rho.theta())).max())
    elapsed = time.perf_counter() - t0
    ok = sup_err < 1e-4
    announce(1, ok, elapsed, 1.0, f"sup error {sup_err:.2e}")
    assert ok, f"cardioid sup error {sup_err}"
    assert elapsed < 1.0


def test_criterion_02_ball_fixed_points():
    t0 = time.perf_counter()
    rng = rng_mod.stream(2024)
    for value in (0.25, 1.0, 7.5):
        const = RadialFunction.constant(value, 2048)
        assert np.array_equal(delta_radial(const).values, const.values)
    min_move = float("inf")
    for _ in range(100):
        rho = random_star_profile(rng, 2048)
        assert float(rho.values.max() - rho.values.min()) >= 0.1 - 1e-12
        move = float(np.abs(delta_radial(rho).values - rho.values).max())
        min_move = min(min_move, move)
    elapsed = time.perf_counter() - t0
    ok = min_move > 1e-3
    announce(2, ok, elapsed, 5.0, f"smallest move {min_move:.2e}")
    assert ok
    assert elapsed < 5.0


def test_criterion_03_sweep_convergence():
    t0 = time.perf_counter()
    rep = run_experiment(ExperimentConfig("sweep-converge", seed=2024,
                                          output_dir="reports/acceptance"))
    elapsed = time.perf_counter() - t0
    detail = (f"max ball gap {rep.metrics['max_gap']:.2e} vs 1e-5, "
              f"max level error {rep.metrics['max_level_error']:.2e}")
    announce(3, rep.passed, elapsed, 30.0, detail)
    assert elapsed < 30.0
    assert rep.passed, (
        "iterated sweeps did not reach the 1e-5 ball tolerance within 500 "
        f"iterations ({detail}); the operator's approach to the ball is "
        "harmonic, see tests/fixtures/sweep_calibration.json"
    )


def test_criterion_04_projection_locus_circle():
    t0 = time.perf_counter()
    rep = run_experiment(ExperimentConfig("locus-circle", seed=2024,
                                          output_dir="reports/acceptance"))
    elapsed = time.perf_counter() - t0
    ok = rep.passed and rep.metrics["max_distance"] < 1e-9
    announce(4, ok, elapsed, 2.0, f"max distance {rep.metrics['max_distance']:.2e}")
    assert ok
    assert elapsed < 2.0


def test_criterion_05_line_closures():
    t0 = time.perf_counter()
    failures = []
    for dims in ({"r": 1, "d": 2, "n": 3}, {"r": 1, "d": 3, "n": 4}):
        for seed in range(1, 6):
            rep = run_experiment(ExperimentConfig(
                "closure-lines", seed=seed, dims=dims,
                output_dir="reports/acceptance"))
            if not rep.passed:
                failures.append((dims["n"], seed, rep.verdict["pair"]["kind"]))
    elapsed = time.perf_counter() - t0
    ok = not failures
    announce(5, ok, elapsed, 60.0, f"failures: {failures or 'none'}")
    assert ok, failures
    assert elapsed < 60.0


def test_criterion_06_plane_closures():
    t0 = time.perf_counter()
    failures = []
    for seed in range(1, 4):
        rep = run_experiment(ExperimentConfig(
            "closure-planes", seed=seed, output_dir="reports/acceptance"))
        if not rep.passed:
            failures.append((seed, {k: v["kind"] for k, v in rep.verdict.items()}))
        else:
            assert rep.verdict["shared_line"]["max_core_residual"] <= 1e-8
    elapsed = time.perf_counter() - t0
    ok = not failures
    announce(6, ok, elapsed, 300.0, f"failures: {failures or 'none'}")
    assert ok, failures
    assert elapsed < 300.0


def test_criterion_07_stable_pairs():
    t0 = time.perf_counter()
    results = []
    for dims in ({"r": 2, "d": 3, "n": 4}, {"r": 3, "d": 4, "n": 5}):
        rep = run_experiment(ExperimentConfig(
            "lemma-pair", seed=7, dims=dims, output_dir="reports/acceptance",
            budgets={"direction_samples": 10000}))
        results.append(rep)
    elapsed = time.perf_counter() - t0
    ok = all(r.passed for r in results)
    escapes = [r.metrics["full_rank_escapes"] for r in results]
    announce(7, ok, elapsed, 30.0, f"escapes {escapes}")
    assert ok
    for rep in results:
        assert rep.verdict["kind"] == "two_element"
        assert rep.metrics["full_rank_escapes"] == {"forward": 0, "reverse": 0}
    assert elapsed < 30.0


def test_criterion_08_one_directional_relation():
    t0 = time.perf_counter()
    rep = run_experiment(ExperimentConfig(
        "asymmetry", seed=2024, output_dir="reports/acceptance",
        budgets={"reverse_samples": 10000}))
    elapsed = time.perf_counter() - t0
    ok = rep.passed
    announce(8, ok, elapsed, 10.0,
             f"forward {rep.metrics['forward_distance']:.1e}, "
             f"dim sum {rep.metrics['dim_sum']}, "
             f"reverse matches {rep.metrics['reverse_matches']}")
    assert ok
    assert rep.metrics["forward_distance"] < 1e-10
    assert rep.metrics["dim_sum"] == 4 > 3
    assert rep.metrics["reverse_matches"] == 0
    assert elapsed < 10.0


def test_criterion_09_spine_saturation():
    t0 = time.perf_counter()
    rep = run_experiment(ExperimentConfig(
        "spine-sat", seed=2024, output_dir="reports/acceptance",
        budgets={"trials": 500}))
    elapsed = time.perf_counter() - t0
    ok = rep.passed
    announce(9, ok, elapsed, 60.0,
             f"{rep.metrics['witnesses']} witnesses, "
             f"{rep.metrics['violations']} violations")
    assert ok
    assert rep.metrics["violations"] == 0
    assert elapsed < 60.0


def test_criterion_10_dimension_lift_invariance():
    t0 = time.perf_counter()
    rep = run_experiment(ExperimentConfig(
        "lift-check", seed=2024, output_dir="reports/acceptance",
        budgets={"trials": 1000}))
    elapsed = time.perf_counter() - t0
    ok = rep.passed and rep.metrics["max_discrepancy"] < 1e-10
    announce(10, ok, elapsed, 5.0,
             f"max discrepancy {rep.metrics['max_discrepancy']:.2e}")
    assert ok
    assert elapsed < 5.0


def test_criterion_11_prescribed_intersections():
    t0 = time.perf_counter()
    rng = rng_mod.stream(2024, 11)
    checked = 0
    worst = 0.0
    for n in (6, 7):
        for trial in range(100):
            eta = random_subspace(n, 2, rng=rng)
            eta_prime = random_subspace(n, 2, rng=rng)
            t_dim = trial % 3
            target = (Subspace.zero(n) if t_dim == 0
                      else random_subspace(n, t_dim, within=eta, rng=rng))
            pi = prescribe_intersection(eta, eta_prime, target, 4, rng)
            got = intersect(project_subspace(pi, eta_prime), eta)
            assert got.dim == target.dim, (n, trial, got.dim, target.dim)
            if target.dim:
                worst = max(worst, chordal_distance(got, target))
            checked += 1
    # infeasible targets are rejected with the documented reason
    eta = Subspace.coordinate(6, [0, 1])
    eta_prime = Subspace.coordinate(6, [2, 3])
    with pytest.raises(FeasibilityError, match="reachable"):
        prescribe_intersection(eta, eta_prime, Subspace.coordinate(6, [0]), 4,
                               rng_mod.stream(2024, 12))
    elapsed = time.perf_counter() - t0
    ok = checked == 200 and worst < 1e-6
    announce(11, ok, elapsed, 60.0, f"{checked} instances, worst match {worst:.2e}")
    assert ok
    assert elapsed < 60.0


def test_criterion_12_verify_determinism(tmp_path):
    t0 = time.perf_counter()
    out1, out2 = tmp_path / "first", tmp_path / "second"
    reports1 = verify_all(seed=42, output_dir=str(out1))
    reports2 = verify_all(seed=42, output_dir=str(out2))
    mismatched = []
    for rep in reports1:
        name = f"{rep.experiment}_seed{rep.seed}.json"
        if (out1 / name).read_bytes() != (out2 / name).read_bytes():
            mismatched.append(name)
    same_outcomes = [r1.passed == r2.passed for r1, r2 in zip(reports1, reports2)]
    elapsed = time.perf_counter() - t0
    ok = not mismatched and all(same_outcomes)
    announce(12, ok, elapsed, float("inf"),
             f"{len(reports1)} reports, mismatched: {mismatched or 'none'}")
    assert ok, mismatched
