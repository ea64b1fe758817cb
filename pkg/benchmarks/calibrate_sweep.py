"""Calibrate the iterated sweep and freeze the numbers as a test fixture.

The sweep approaches its limiting disk harmonically: after n steps the gap
to the constant profile is about max(rho) * pi^2 / (2n), and on an N-point
grid the iteration reaches an exact fixed point near n = N/2 whose residual
ripple is about max(rho) * pi^2 / N.  This script records measured gaps for
the bundled inputs so tests can pin the behavior.

Run:  python benchmarks/calibrate_sweep.py   (rewrites tests/fixtures/)
"""

import json
import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from grassmannlab.sweep import circle_profile, delta_radial, spike_profile  # noqa: E402


def gap_trace(rho, checkpoints):
    out = {}
    cur = rho
    top = float(rho.values.max())
    last_step = None
    for it in range(1, max(checkpoints) + 1):
        nxt = delta_radial(cur)
        last_step = float(np.abs(nxt.values - cur.values).max())
        cur = nxt
        if it in checkpoints:
            out[str(it)] = {
                "gap": top - float(cur.values.min()),
                "step": last_step,
            }
    return out


def main() -> int:
    checkpoints = (100, 250, 500)
    fixture = {"grid_size": 2048, "checkpoints": list(checkpoints), "inputs": {}}
    for name, rho in (("spike", spike_profile(2048)),
                      ("circle", circle_profile(1.0, 2048))):
        fixture["inputs"][name] = {
            "max_rho0": float(rho.values.max()),
            "trace": gap_trace(rho, checkpoints),
        }
    # grid fixed point at a small grid: the iteration stalls exactly
    small = spike_profile(512)
    cur = small
    for it in range(1, 2000):
        nxt = delta_radial(cur)
        step = float(np.abs(nxt.values - cur.values).max())
        cur = nxt
        if step == 0.0:
            fixture["grid_fixed_point_512"] = {
                "iteration": it,
                "terminal_gap": 1.0 - float(cur.values.min()),
            }
            break
    out = ROOT / "tests" / "fixtures" / "sweep_calibration.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(fixture, indent=2, sort_keys=True) + "\n")
    print(f"wrote {out}")
    for name, rec in fixture["inputs"].items():
        print(name, rec["trace"])
    print("grid fixed point (N=512):", fixture.get("grid_fixed_point_512"))
    return 0


if __name__ == "__main__":
    sys.exit(main())
