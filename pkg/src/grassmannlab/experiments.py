"""Registered experiments: seeded, reproducible verification runs.

Each experiment draws all randomness from a Philox stream derived from
``(seed, experiment_index)``, evaluates its own pass predicate, and reports
a verdict/metric block.  Reports serialize to canonical JSON (see
``report``), so identical configs and seeds produce byte-identical files;
wall time is reported on the console and in the CSV summary only.
"""

from __future__ import annotations

import dataclasses
import time
from pathlib import Path

import numpy as np

from . import report as report_mod
from . import rng as rng_mod
from .saturation import (
    ClosureParams,
    RPlaneSet,
    SpineCore,
    _haar_superspace_stack,
    _tau_image_stack,
    build_asymmetry_example,
    build_lemma_pair,
    closure,
    projection_locus_circle,
    lift_projection_check,
    spine_contains,
    spine_sample,
    sum_subspaces,
    tau_project,
)
from .subspaces import (
    EQUALITY_TOL,
    RANK_RTOL,
    chordal_distance,
    random_subspace,
)
from .svgplot import render_radial_svg
from .sweep import (
    RadialFunction,
    cardioid_reference,
    circle_profile,
    delta_radial,
    is_ball,
    iterate_sweep,
    random_star_profile,
    spike_profile,
)


@dataclasses.dataclass
class ExperimentConfig:
    """What to run: experiment name, seed, dimensions, budget and tolerance
    overrides, and where to write reports."""

    experiment: str
    seed: int = 42
    dims: dict | None = None
    budgets: dict = dataclasses.field(default_factory=dict)
    tolerances: dict = dataclasses.field(default_factory=dict)
    output_dir: str = "reports"


@dataclasses.dataclass
class ExperimentReport:
    experiment: str
    seed: int
    config: dict
    verdict: dict | None
    metrics: dict
    passed: bool
    wall_time_s: float
    artifacts: list[str]

    def to_json_dict(self) -> dict:
        # wall time deliberately excluded: JSON reports are byte-stable
        return {
            "schema": 1,
            "experiment": self.experiment,
            "seed": self.seed,
            "config": self.config,
            "verdict": self.verdict,
            "metrics": self.metrics,
            "pass": self.passed,
            "artifacts": self.artifacts,
        }


class UnknownExperimentError(KeyError):
    pass


class PreconditionError(ValueError):
    """Config violates an experiment's dimensional preconditions."""


# ---------------------------------------------------------------------------
# closure budget calibration
#
# Density verdicts need the member set to cover the probe distribution at
# radius eps.  Calibrated coverage fractions (400k Monte-Carlo samples):
#   lines in R^3,  eps 0.1:  P ~ 5.0e-3  -> a few thousand members suffice
#   lines in R^4,  eps 0.1:  P ~ 4.2e-4  -> a few tens of thousands
#   2-planes in R^5, eps 0.4: P ~ 5.8e-4 -> a few tens of thousands
# Caps below carry a >= 1.7x margin over the coupon-collector estimate.
# ---------------------------------------------------------------------------

_CLOSURE_DEFAULTS = {
    (1, 2, 3): dict(pair_budget=50, pi_samples_per_pair=4, max_planes=15000,
                    max_rounds=150, eps=0.1),
    (1, 3, 4): dict(pair_budget=90, pi_samples_per_pair=8, max_planes=56000,
                    max_rounds=150, eps=0.1),
    (2, 4, 5): dict(pair_budget=96, pi_samples_per_pair=6, max_planes=96000,
                    max_rounds=200, eps=0.4),
}


def _closure_setup(dims: dict, budgets: dict, tolerances: dict):
    key = (dims["r"], dims["d"], dims["n"])
    base = dict(_CLOSURE_DEFAULTS.get(key, dict(eps=0.1)))
    eps = tolerances.get("eps", base.pop("eps", 0.1))
    probe_count = int(tolerances.get("probe_count", 1000))
    base.update({k: v for k, v in budgets.items() if k in (
        "pair_budget", "pi_samples_per_pair", "stability_rounds", "max_planes", "max_rounds")})
    params = ClosureParams(**base)
    return params, float(eps), probe_count


def _require_dims(dims: dict | None, default: dict, checks) -> dict:
    dims = dict(default if dims is None else dims)
    for key in ("r", "d", "n"):
        if key not in dims:
            raise PreconditionError(f"dims must provide r, d, n; missing {key!r}")
        dims[key] = int(dims[key])
    for ok, msg in checks(dims["r"], dims["d"], dims["n"]):
        if not ok:
            raise PreconditionError(msg)
    return dims


def _distinct_random_planes(n: int, r: int, rng, *, trivial_intersection: bool):
    """Two Haar r-planes, resampled until distinct (and disjoint if asked)."""
    from .subspaces import intersect as _intersect
    for _ in range(64):
        a = random_subspace(n, r, rng=rng)
        b = random_subspace(n, r, rng=rng)
        if chordal_distance(a, b) < 1e-3:
            continue
        if trivial_intersection and _intersect(a, b).dim != 0:
            continue
        return a, b
    raise RuntimeError("failed to draw distinct random planes")


# ---------------------------------------------------------------------------
# experiment bodies
# ---------------------------------------------------------------------------

def _exp_closure_lines(dims, budgets, tolerances, rng, outdir, tag):
    dims = _require_dims(dims, {"r": 1, "d": 2, "n": 3}, lambda r, d, n: [
        (r == 1, "closure-lines works on lines (r = 1)"),
        (1 <= r < d < n, f"need 1 <= r < d < n, got ({r}, {d}, {n})"),
    ])
    params, eps, probes = _closure_setup(dims, budgets, tolerances)
    n = dims["n"]
    l1, l2 = _distinct_random_planes(n, 1, rng, trivial_intersection=False)
    _, pair_verdict = closure(RPlaneSet([l1, l2]), dims["d"], params, rng,
                              eps=eps, probe_count=probes)
    single_params = ClosureParams(pair_budget=200, pi_samples_per_pair=4)
    _, single_verdict = closure(RPlaneSet([l1]), dims["d"], single_params, rng,
                                eps=eps, probe_count=200)
    single_ok = (
        single_verdict.kind == "spine"
        and single_verdict.core is not None
        and single_verdict.core.equals(l1)
    )
    passed = pair_verdict.kind == "full" and single_ok
    verdict = {"pair": pair_verdict.to_json_dict(), "singleton": single_verdict.to_json_dict()}
    metrics = {"dims": dims, "eps": eps, "pair_size": pair_verdict.metrics["size"]}
    return verdict, metrics, passed, []


def _exp_closure_planes(dims, budgets, tolerances, rng, outdir, tag):
    dims = _require_dims(dims, {"r": 2, "d": 4, "n": 5}, lambda r, d, n: [
        (1 <= r < d < n, f"need 1 <= r < d < n, got ({r}, {d}, {n})"),
        (2 * r <= d, f"spine classification regime needs 2r <= d, got ({r}, {d})"),
    ])
    params, eps, probes = _closure_setup(dims, budgets, tolerances)
    r, d, n = dims["r"], dims["d"], dims["n"]

    a, b = _distinct_random_planes(n, r, rng, trivial_intersection=True)
    _, full_verdict = closure(RPlaneSet([a, b]), d, params, rng, eps=eps, probe_count=probes)

    ell = random_subspace(n, 1, rng=rng)
    e1 = random_subspace(n, r, containing=ell, rng=rng)
    e2 = random_subspace(n, r, containing=ell, rng=rng)
    sset, spine_verdict = closure(RPlaneSet([e1, e2]), d, params, rng,
                                  eps=eps, probe_count=probes)
    contain_tol = float(tolerances.get("core_contain_tol", 1e-8))
    spine_ok = (
        spine_verdict.kind == "spine"
        and spine_verdict.core is not None
        and spine_verdict.core.dim == 1
        and spine_verdict.core.equals(ell)
        and spine_verdict.metrics["max_core_residual"] <= contain_tol
    )
    passed = full_verdict.kind == "full" and spine_ok
    verdict = {"disjoint": full_verdict.to_json_dict(), "shared_line": spine_verdict.to_json_dict()}
    metrics = {"dims": dims, "eps": eps, "full_size": full_verdict.metrics["size"],
               "spine_size": spine_verdict.metrics["size"]}
    return verdict, metrics, passed, []


def _exp_lemma_pair(dims, budgets, tolerances, rng, outdir, tag):
    dims = _require_dims(dims, {"r": 2, "d": 3, "n": 4}, lambda r, d, n: [
        (1 <= r < d < n, f"need 1 <= r < d < n, got ({r}, {d}, {n})"),
        (2 * r > d, f"the stable pair construction needs 2r > d, got ({r}, {d})"),
    ])
    r, d, n = dims["r"], dims["d"], dims["n"]
    eta, eta_prime = build_lemma_pair(r, d, n)
    params = ClosureParams(
        pair_budget=int(budgets.get("pair_budget", 500)),
        pi_samples_per_pair=int(budgets.get("pi_samples_per_pair", 8)),
    )
    _, verdict = closure(RPlaneSet([eta, eta_prime]), d, params, rng)

    per_direction = int(budgets.get("direction_samples", 10000))
    escapes = {}
    ranks = {}
    for label, (src, other) in {
        "forward": (eta, eta_prime), "reverse": (eta_prime, eta),
    }.items():
        bases = np.broadcast_to(src.basis, (per_direction, n, r)).copy()
        pis = _haar_superspace_stack(bases, d, rng, src.field)
        others = np.broadcast_to(other.basis, (per_direction, n, r)).copy()
        _, full = _tau_image_stack(pis, others, r)
        imgs = pis @ (np.swapaxes(pis, -1, -2) @ others)
        s = np.linalg.svd(imgs, compute_uv=False)
        numeric_ranks = (s > RANK_RTOL * s[:, :1]).sum(axis=1)
        escapes[label] = int(full.sum())
        ranks[label] = int(numeric_ranks.max())
    passed = (
        verdict.kind == "two_element"
        and escapes["forward"] == 0
        and escapes["reverse"] == 0
    )
    metrics = {
        "dims": dims,
        "full_rank_escapes": escapes,
        "max_image_rank": ranks,
        "direction_samples": per_direction,
    }
    return verdict.to_json_dict(), metrics, passed, []


def _exp_asymmetry(dims, budgets, tolerances, rng, outdir, tag):
    dims = _require_dims(dims, {"r": 2, "d": 3, "n": 5}, lambda r, d, n: [
        (n >= 5, f"need n >= 5, got {n}"),
        (r == 2 and d == 3, "the bundled example uses 2-planes and 3-planes"),
    ])
    n = dims["n"]
    eta, eta_prime, pi = build_asymmetry_example(n)
    witness = tau_project(eta, eta_prime, pi)
    forward_dist = chordal_distance(witness.image, eta) if witness else float("inf")
    dim_sum = sum_subspaces(eta, eta_prime).dim

    samples = int(budgets.get("reverse_samples", 10000))
    bases = np.broadcast_to(eta_prime.basis, (samples, n, 2)).copy()
    pis = _haar_superspace_stack(bases, dims["d"], rng, eta_prime.field)
    etas = np.broadcast_to(eta.basis, (samples, n, 2)).copy()
    images, full = _tau_image_stack(pis, etas, 2)
    if full.any():
        probe_set = RPlaneSet([eta])
        d2 = probe_set.min_chordal_sq(images[full])
        reverse_matches = int(np.sum(d2 < EQUALITY_TOL ** 2))
        min_reverse = float(np.sqrt(d2.min()))
    else:
        reverse_matches, min_reverse = 0, float("inf")

    forward_tol = float(tolerances.get("forward_tol", 1e-10))
    passed = (
        witness is not None
        and forward_dist < forward_tol
        and dim_sum == 4
        and dim_sum > dims["d"]
        and reverse_matches == 0
    )
    metrics = {
        "dims": dims,
        "forward_distance": forward_dist,
        "dim_sum": dim_sum,
        "reverse_samples": samples,
        "reverse_matches": reverse_matches,
        "min_reverse_distance": min_reverse,
    }
    return None, metrics, passed, []


def _exp_spine_sat(dims, budgets, tolerances, rng, outdir, tag):
    trials = int(budgets.get("trials", 500))
    contain_tol = float(tolerances.get("contain_tol", 1e-8))
    max_n = int(budgets.get("max_ambient", 8))
    witnesses = 0
    violations = 0
    for _ in range(trials):
        r = int(rng.integers(1, 4))
        d = int(rng.integers(2 * r, max_n))       # 2r <= d < n <= max_n
        n = int(rng.integers(d + 1, max_n + 1))
        k = int(rng.integers(1, r + 1))
        core = random_subspace(n, k, rng=rng)
        spine = SpineCore(core=core, r=r)
        zeta = spine_sample(spine, rng)
        zeta_prime = spine_sample(spine, rng)
        sigma = random_subspace(n, d, containing=zeta, rng=rng)
        witness = tau_project(zeta, zeta_prime, sigma)
        if witness is None:
            continue
        witnesses += 1
        if not spine_contains(spine, witness.image, contain_tol):
            violations += 1
    passed = violations == 0 and witnesses > 0
    metrics = {"trials": trials, "witnesses": witnesses, "violations": violations}
    return None, metrics, passed, []


def _exp_locus_circle(dims, budgets, tolerances, rng, outdir, tag):
    samples = int(budgets.get("samples", 1000))
    tol = float(tolerances.get("max_distance", 1e-9))
    ell = random_subspace(3, 1, rng=rng)
    p_prime = rng.standard_normal(3)
    while np.linalg.norm(p_prime) < 1e-3:
        p_prime = rng.standard_normal(3)
    circle = projection_locus_circle(ell, p_prime)

    bases = np.broadcast_to(ell.basis, (samples, 3, 1)).copy()
    pis = _haar_superspace_stack(bases, 2, rng, ell.field)
    pts = np.einsum("bij,bkj,k->bi", pis, pis, p_prime)
    rel = pts - circle.center
    h = rel @ circle.plane_normal
    in_plane = rel - h[:, None] * circle.plane_normal[None, :]
    dist = np.hypot(h, np.linalg.norm(in_plane, axis=1) - circle.radius)
    max_dist = float(dist.max())
    endpoints = max(
        circle.distance_to(p_prime),
        circle.distance_to(ell.basis[:, 0] * float(ell.basis[:, 0] @ p_prime)),
    )
    passed = max_dist < tol and endpoints < tol
    metrics = {"samples": samples, "max_distance": max_dist,
               "endpoint_distance": endpoints, "radius": circle.radius}
    return None, metrics, passed, []


def _exp_lift_check(dims, budgets, tolerances, rng, outdir, tag):
    trials = int(budgets.get("trials", 1000))
    tol = float(tolerances.get("max_discrepancy", 1e-10))
    max_n = int(budgets.get("max_ambient", 8))
    worst = 0.0
    for _ in range(trials):
        n = int(rng.integers(3, max_n + 1))
        hyper = random_subspace(n, n - 1, rng=rng)
        d_pi = int(rng.integers(1, n - 1))
        pi = random_subspace(n, d_pi, within=hyper, rng=rng)
        ell = random_subspace(n, 1, within=hyper, rng=rng)
        worst = max(worst, lift_projection_check(ell, pi, hyper))
    passed = worst < tol
    metrics = {"trials": trials, "max_discrepancy": worst}
    return None, metrics, passed, []


def _exp_sweep_cardioid(dims, budgets, tolerances, rng, outdir, tag):
    grid = int(budgets.get("grid_size", 2048))
    a = float(budgets.get("a", 1.0))
    tol = float(tolerances.get("sup_error", 1e-4))
    rho = circle_profile(a, grid)
    swept = delta_radial(rho)
    ref = cardioid_reference(a, rho.theta())
    sup_err = float(np.abs(swept.values - ref).max())
    artifacts = []
    svg = render_radial_svg(
        [("source circle", rho), ("one sweep", swept),
         ("cardioid reference", RadialFunction(ref))],
        Path(outdir) / f"{tag}_cardioid.svg",
    )
    artifacts.append(svg.name)
    csv_path = Path(outdir) / f"{tag}_cardioid.csv"
    swept.write_csv(csv_path)
    artifacts.append(csv_path.name)
    passed = sup_err < tol
    metrics = {"grid_size": grid, "sup_error": sup_err, "a": a}
    return None, metrics, passed, artifacts


def _exp_sweep_converge(dims, budgets, tolerances, rng, outdir, tag):
    grid = int(budgets.get("grid_size", 2048))
    max_iter = int(budgets.get("max_iter", 500))
    n_random = int(budgets.get("random_inputs", 20))
    step_tol = float(tolerances.get("step_tol", 1e-6))
    ball_tol = float(tolerances.get("ball_tol", 1e-5))
    const_tol = float(tolerances.get("const_tol", 1e-6))

    inputs = [("spike", spike_profile(grid)), ("circle", circle_profile(1.0, grid))]
    inputs += [(f"random_{i}", random_star_profile(rng, grid)) for i in range(n_random)]

    rows = []
    all_ok = True
    for label, rho0 in inputs:
        res = iterate_sweep(rho0, tol=step_tol, max_iter=max_iter)
        target = float(rho0.values.max())
        gap = float(res.final.values.max() - res.final.values.min())
        level_err = abs(float(res.final.values.max()) - target)
        ok = is_ball(res.final, ball_tol) and level_err <= const_tol
        all_ok = all_ok and ok
        rows.append({
            "input": label, "iterations": res.iterations, "converged": res.converged,
            "gap": gap, "level_error": level_err, "target": target, "ok": ok,
        })
    metrics = {
        "inputs": rows,
        "max_gap": max(r["gap"] for r in rows),
        "max_level_error": max(r["level_error"] for r in rows),
        "grid_size": grid,
        "max_iter": max_iter,
    }
    return None, metrics, all_ok, []


# ---------------------------------------------------------------------------
# registry and driver
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class _Entry:
    index: int
    func: object
    description: str


REGISTRY: dict[str, _Entry] = {
    "closure-lines": _Entry(0, _exp_closure_lines,
                            "line closures: a distinct pair densifies, a singleton stays put"),
    "closure-planes": _Entry(1, _exp_closure_planes,
                             "2-plane closures: disjoint pair fills, shared-line pair spans a spine"),
    "lemma-pair": _Entry(2, _exp_lemma_pair,
                         "the stable two-element pair: every projection drops rank"),
    "asymmetry": _Entry(3, _exp_asymmetry,
                        "one-directional projection relation with a structural obstruction back"),
    "spine-sat": _Entry(4, _exp_spine_sat,
                        "images of spine members land back in the spine"),
    "locus-circle": _Entry(5, _exp_locus_circle,
                           "projections of a point over planes through a line trace a circle"),
    "lift-check": _Entry(6, _exp_lift_check,
                         "projection inside a hyperplane matches the lifted projection"),
    "sweep-cardioid": _Entry(7, _exp_sweep_cardioid,
                             "one sweep of a circle through the base point is a cardioid"),
    "sweep-converge": _Entry(8, _exp_sweep_converge,
                             "iterated sweeps against the centered-ball tolerance gate"),
}


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Run one registered experiment deterministically from its seed.

    Writes the canonical JSON report plus any experiment artifacts into
    ``config.output_dir`` and returns the in-memory report.
    """
    entry = REGISTRY.get(config.experiment)
    if entry is None:
        raise UnknownExperimentError(
            f"unknown experiment {config.experiment!r}; known: {', '.join(REGISTRY)}"
        )
    outdir = Path(config.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    rng = rng_mod.stream(config.seed, entry.index)
    tag = f"{config.experiment}_seed{config.seed}"
    start = time.perf_counter()
    verdict, metrics, passed, artifacts = entry.func(
        config.dims, config.budgets, config.tolerances, rng, outdir, tag
    )
    wall = time.perf_counter() - start
    echo = {
        "dims": config.dims,
        "budgets": config.budgets,
        "tolerances": config.tolerances,
    }
    rep = ExperimentReport(
        experiment=config.experiment,
        seed=config.seed,
        config=echo,
        verdict=verdict,
        metrics=metrics,
        passed=bool(passed),
        wall_time_s=wall,
        artifacts=artifacts,
    )
    report_mod.write_json(rep.to_json_dict(), outdir / f"{tag}.json")
    return rep


def verify_all(seed: int = 42, output_dir: str = "reports",
               parallel: bool = False) -> list[ExperimentReport]:
    """Run every registered experiment at defaults; write a CSV summary."""
    configs = [ExperimentConfig(experiment=name, seed=seed, output_dir=output_dir)
               for name in REGISTRY]
    if parallel:
        import concurrent.futures
        with concurrent.futures.ProcessPoolExecutor() as pool:
            reports = list(pool.map(run_experiment, configs))
    else:
        reports = [run_experiment(c) for c in configs]
    rows = []
    for rep in reports:
        dims = rep.metrics.get("dims") or rep.config.get("dims") or {}
        verdict_kind = ""
        if isinstance(rep.verdict, dict):
            verdict_kind = rep.verdict.get("kind", "") or "+".join(
                v.get("kind", "?") for v in rep.verdict.values() if isinstance(v, dict)
            )
        rows.append({
            "experiment": rep.experiment, "seed": rep.seed,
            "r": dims.get("r", ""), "d": dims.get("d", ""), "n": dims.get("n", ""),
            "verdict": verdict_kind, "pass": rep.passed, "wall_time_s": rep.wall_time_s,
        })
    report_mod.write_csv_summary(rows, Path(output_dir) / "summary.csv")
    return reports
