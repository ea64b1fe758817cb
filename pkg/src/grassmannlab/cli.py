"""Command-line surface: run experiments, verify the whole registry, and run
ad-hoc sweeps, closures, and renders.

Config files are TOML (or JSON, by extension); command-line flags override
file values.  Exit status is nonzero when any requested experiment fails.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import rng as rng_mod
from .experiments import (
    REGISTRY,
    ExperimentConfig,
    PreconditionError,
    UnknownExperimentError,
    run_experiment,
    verify_all,
)
from .report import write_json
from .saturation import ClosureParams, RPlaneSet, closure
from .subspaces import random_subspace
from .svgplot import render_radial_svg
from .sweep import (
    RadialFunction,
    circle_profile,
    iterate_sweep,
    random_star_profile,
    spike_profile,
)


def _load_config(path: str) -> dict:
    text = Path(path).read_bytes()
    if path.endswith(".json"):
        return json.loads(text)
    try:
        import tomllib
    except ImportError:
        import tomli as tomllib
    return tomllib.loads(text.decode())


def _parse_dims(spec: str) -> dict:
    parts = [int(p) for p in spec.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("dims must be r,d,n")
    return {"r": parts[0], "d": parts[1], "n": parts[2]}


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="base seed (default 42)")
    p.add_argument("--config", default=None, help="TOML or JSON config file")
    p.add_argument("--out", default=None, help="output directory (default reports)")
    p.add_argument("--dims", type=_parse_dims, default=None, help="dimensions r,d,n")


def _build_config(args) -> ExperimentConfig:
    raw: dict = {}
    if args.config:
        raw = _load_config(args.config)
    cfg = ExperimentConfig(
        experiment=getattr(args, "experiment", raw.get("experiment", "")),
        seed=int(raw.get("seed", 42)),
        dims=raw.get("dims"),
        budgets=dict(raw.get("budgets", {})),
        tolerances=dict(raw.get("tolerances", {})),
        output_dir=str(raw.get("output_dir", "reports")),
    )
    if args.seed is not None:
        cfg.seed = args.seed
    if args.dims is not None:
        cfg.dims = args.dims
    if args.out is not None:
        cfg.output_dir = args.out
    return cfg


def _cmd_run(args) -> int:
    cfg = _build_config(args)
    try:
        rep = run_experiment(cfg)
    except (UnknownExperimentError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    status = "PASS" if rep.passed else "FAIL"
    print(f"[{status}] {rep.experiment} seed={rep.seed} ({rep.wall_time_s:.2f}s) "
          f"-> {Path(cfg.output_dir) / (rep.experiment + '_seed' + str(rep.seed) + '.json')}")
    return 0 if rep.passed else 1


def _cmd_verify(args) -> int:
    seed = args.seed if args.seed is not None else 42
    out = args.out if args.out is not None else "reports"
    reports = verify_all(seed=seed, output_dir=out, parallel=args.parallel)
    width = max(len(r.experiment) for r in reports)
    for rep in reports:
        status = "PASS" if rep.passed else "FAIL"
        print(f"[{status}] {rep.experiment:<{width}}  {rep.wall_time_s:8.2f}s")
    failures = [r.experiment for r in reports if not r.passed]
    print(f"{len(reports) - len(failures)}/{len(reports)} experiments passed; "
          f"summary at {Path(out) / 'summary.csv'}")
    if failures:
        print("failed: " + ", ".join(failures))
    return 1 if failures else 0


def _make_profile(kind: str, grid: int, seed: int) -> RadialFunction:
    if kind == "spike":
        return spike_profile(grid)
    if kind == "circle":
        return circle_profile(1.0, grid)
    if kind == "random":
        return random_star_profile(rng_mod.stream(seed, 900), grid)
    try:
        data = json.loads(Path(kind).read_text())
        return RadialFunction.from_json_dict(data)
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise SystemExit(f"error: --input must be spike, circle, random, or a "
                         f"radial JSON file ({exc})")


def _cmd_sweep(args) -> int:
    out = Path(args.out if args.out is not None else "reports")
    seed = args.seed if args.seed is not None else 42
    rho = _make_profile(args.input, args.grid, seed)
    result = iterate_sweep(rho, tol=args.tol, max_iter=args.iters, keep_first=args.keep)
    gap = float(result.final.values.max() - result.final.values.min())
    report = {
        "schema": 1,
        "input": args.input,
        "grid_size": rho.grid_size,
        "iterations": result.iterations,
        "converged": result.converged,
        "final_gap": gap,
        "final_max": float(result.final.values.max()),
        "sup_deltas_last": result.sup_deltas[-1] if result.sup_deltas else None,
    }
    out.mkdir(parents=True, exist_ok=True)
    write_json(report, out / "sweep.json")
    result.final.write_csv(out / "sweep_final.csv")
    print(f"sweep: {result.iterations} iterations, converged={result.converged}, "
          f"gap={gap:.3e} -> {out / 'sweep.json'}")
    if args.svg:
        curves = [("start", rho)]
        curves += [(f"iterate {i + 1}", it) for i, it in enumerate(result.iterates_kept)]
        curves.append(("final", result.final))
        render_radial_svg(curves, out / "sweep.svg")
        print(f"rendered {out / 'sweep.svg'}")
    return 0


def _cmd_closure(args) -> int:
    if args.dims is None:
        print("error: --dims r,d,n is required", file=sys.stderr)
        return 2
    r, d, n = args.dims["r"], args.dims["d"], args.dims["n"]
    seed = args.seed if args.seed is not None else 42
    out = Path(args.out if args.out is not None else "reports")
    generator = rng_mod.stream(seed, 901)
    planes = [random_subspace(n, r, rng=generator) for _ in range(args.planes)]
    params = ClosureParams(
        pair_budget=args.pairs,
        pi_samples_per_pair=args.pi_samples,
        max_planes=args.cap,
    )
    final, verdict = closure(RPlaneSet(planes), d, params, generator,
                             eps=args.eps, probe_count=args.probes)
    out.mkdir(parents=True, exist_ok=True)
    write_json({"schema": 1, "dims": args.dims, "seed": seed,
                "verdict": verdict.to_json_dict()}, out / "closure.json")
    if args.dump_planes:
        write_json(final.to_json_dict(d=d), out / "closure_planes.json")
    print(f"closure: {len(final)} planes, verdict={verdict.kind} "
          f"-> {out / 'closure.json'}")
    return 0


def _cmd_render(args) -> int:
    curves = []
    for path in args.curves:
        try:
            data = json.loads(Path(path).read_text())
            if isinstance(data, dict) and "values" in data:
                curves.append((Path(path).stem, RadialFunction.from_json_dict(data)))
            else:
                for entry in data:
                    curves.append((entry.get("label", "curve"),
                                   RadialFunction.from_json_dict(entry["radial"])))
        except (json.JSONDecodeError, AttributeError, KeyError, TypeError, ValueError) as exc:
            print(f"error: {path} is not a radial JSON file ({exc})", file=sys.stderr)
            return 2
    out = args.out if args.out is not None else "render.svg"
    render_radial_svg(curves, out)
    print(f"rendered {out}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="grassmannlab",
        description="subspace projection relations, saturation closures, and "
                    "diametric sweeps: seeded experiments with reproducible reports",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one registered experiment")
    p_run.add_argument("experiment", choices=sorted(REGISTRY),
                       help="experiment name")
    _add_common(p_run)

    p_verify = sub.add_parser("verify", help="run every registered experiment")
    _add_common(p_verify)
    p_verify.add_argument("--parallel", action="store_true",
                          help="run experiments in parallel processes")

    p_sweep = sub.add_parser("sweep", help="iterate the diametric sweep")
    _add_common(p_sweep)
    p_sweep.add_argument("--input", default="circle",
                         help="spike | circle | random | path to a radial JSON")
    p_sweep.add_argument("--grid", type=int, default=2048)
    p_sweep.add_argument("--iters", type=int, default=500)
    p_sweep.add_argument("--tol", type=float, default=1e-6)
    p_sweep.add_argument("--keep", type=int, default=5,
                         help="keep the first K iterates for rendering")
    p_sweep.add_argument("--svg", action="store_true", help="render iterates")

    p_closure = sub.add_parser("closure", help="saturate random planes")
    _add_common(p_closure)
    p_closure.add_argument("--planes", type=int, default=2,
                           help="number of random initial planes")
    p_closure.add_argument("--pairs", type=int, default=2000)
    p_closure.add_argument("--pi-samples", type=int, default=8)
    p_closure.add_argument("--cap", type=int, default=5000)
    p_closure.add_argument("--eps", type=float, default=0.1)
    p_closure.add_argument("--probes", type=int, default=1000)
    p_closure.add_argument("--dump-planes", action="store_true",
                           help="also write the full plane set as JSON")

    p_render = sub.add_parser("render", help="polar SVG from radial JSON files")
    p_render.add_argument("curves", nargs="+", help="radial JSON files")
    p_render.add_argument("--out", default=None)

    args = parser.parse_args(argv)
    commands = {
        "run": _cmd_run,
        "verify": _cmd_verify,
        "sweep": _cmd_sweep,
        "closure": _cmd_closure,
        "render": _cmd_render,
    }
    return commands[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
