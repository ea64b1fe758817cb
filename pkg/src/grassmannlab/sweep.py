"""Diametric sweeps of star-shaped planar regions.

The sweep of a region K (relative to a base point at the origin) is the
union of all disks having a diameter from the origin to a point of K.  Every
such disk contains the origin and is star-shaped about it, so after one
sweep the state is fully described by a sampled radial function rho(theta)
on a uniform angular grid.  In that representation one sweep step is

    rho'(theta_j) = max(0, max_k rho(theta_k) * cos(theta_j - theta_k)),

a max-times circular correlation: the disk over the boundary point at angle
theta_k has polar equation r <= rho(theta_k) * cos(theta - theta_k).

The step is expansive (the diagonal term reproduces rho), preserves the
maximum exactly, and fixes constants; iterating it grows the region toward
the disk of radius max(rho).  The approach to that disk is harmonic, not
geometric: after n sweeps the gap to the limiting constant is about
max(rho) * pi^2 / (2n), and on an N-point grid the iteration reaches an
exact fixed point after about N/2 steps whose residual ripple is about
max(rho) * pi^2 / N.  See tests/fixtures/sweep_calibration.json for measured
values.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from . import kernels


def _validate_grid(n: int) -> None:
    if n < 8 or (n & (n - 1)) != 0:
        raise ValueError(f"grid size must be a power of two >= 8, got {n}")


@dataclasses.dataclass(frozen=True)
class RadialFunction:
    """A star-shaped-about-origin region sampled as rho(theta_j) >= 0 on the
    uniform grid theta_j = 2*pi*j/N, N a power of two."""

    values: np.ndarray

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        if values.ndim != 1:
            raise ValueError("values must be one-dimensional")
        _validate_grid(values.shape[0])
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")
        if np.any(values < 0.0):
            raise ValueError("values must be nonnegative")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def grid_size(self) -> int:
        return self.values.shape[0]

    def theta(self) -> np.ndarray:
        n = self.grid_size
        return 2.0 * np.pi * np.arange(n) / n

    @classmethod
    def constant(cls, value: float, grid_size: int = 2048) -> "RadialFunction":
        _validate_grid(grid_size)
        return cls(np.full(grid_size, float(value)))

    def to_json_dict(self) -> dict:
        return {"grid_size": self.grid_size, "values": [float(v) for v in self.values]}

    @classmethod
    def from_json_dict(cls, data: dict) -> "RadialFunction":
        values = np.asarray(data["values"], dtype=np.float64)
        if values.shape[0] != int(data["grid_size"]):
            raise ValueError("grid_size does not match the number of values")
        return cls(values)

    def write_csv(self, path) -> None:
        """Two columns (theta, rho), one row per grid point."""
        with open(path, "w", newline="\n") as fh:
            fh.write("theta,rho\n")
            for t, v in zip(self.theta(), self.values):
                fh.write(f"{format(t, '.17g')},{format(v, '.17g')}\n")


@dataclasses.dataclass(frozen=True)
class PointCloud2D:
    """Finite planar point set, coordinates relative to the base point."""

    points: np.ndarray

    def __post_init__(self):
        points = np.ascontiguousarray(self.points, dtype=np.float64)
        if points.ndim != 2 or points.shape[1] != 2:
            raise ValueError("points must have shape (m, 2)")
        if points.shape[0] == 0:
            raise ValueError("point cloud is empty")
        if not np.all(np.isfinite(points)):
            raise ValueError("points must be finite")
        points.setflags(write=False)
        object.__setattr__(self, "points", points)


@dataclasses.dataclass
class SweepResult:
    """Outcome of iterating the sweep: kept iterates, final state, per-step
    sup-norm changes, and whether the last step fell below tolerance."""

    iterates_kept: list[RadialFunction]
    final: RadialFunction
    iterations: int
    sup_deltas: list[float]
    converged: bool


def radial_from_points(cloud: PointCloud2D, grid_size: int = 2048) -> RadialFunction:
    """One sweep of a raw point set, as a radial function.

    The disk over the point p contributes |p| * cos(theta - arg p), which is
    the dot product of p with the unit vector at angle theta; the sweep is
    the pointwise maximum over the cloud, clamped at zero.
    """
    _validate_grid(grid_size)
    theta = 2.0 * np.pi * np.arange(grid_size) / grid_size
    dirs = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    vals = (dirs @ cloud.points.T).max(axis=1)
    return RadialFunction(np.maximum(0.0, vals))


def delta_radial(rho: RadialFunction) -> RadialFunction:
    """One sweep step of a radial profile (dispatches to the active kernel)."""
    return RadialFunction(kernels.delta_max_correlate(rho.values))


def iterate_sweep(
    rho0: RadialFunction,
    tol: float = 1e-6,
    max_iter: int = 500,
    keep_first: int = 0,
) -> SweepResult:
    """Apply the sweep until the sup-norm step drops below ``tol`` or
    ``max_iter`` is reached.

    Iterates grow pointwise and stay bounded by max(rho0); non-convergence
    within the budget is reported, not raised.  ``keep_first`` retains the
    first few iterates for plotting.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    cur = rho0
    kept: list[RadialFunction] = []
    sup_deltas: list[float] = []
    converged = False
    iterations = 0
    for it in range(1, max_iter + 1):
        nxt = delta_radial(cur)
        step = float(np.abs(nxt.values - cur.values).max())
        sup_deltas.append(step)
        if step < tol:
            converged = True
            break
        cur = nxt
        iterations = it
        if len(kept) < keep_first:
            kept.append(cur)
    return SweepResult(
        iterates_kept=kept,
        final=cur,
        iterations=iterations,
        sup_deltas=sup_deltas,
        converged=converged,
    )


def cardioid_reference(a: float, theta):
    """Closed form for the one-step sweep of a circle of radius ``a`` through
    the base point: a * (1 + cos(theta)), cusp at theta = pi, value 2a at the
    antipodal touch point theta = 0."""
    if a <= 0:
        raise ValueError("a must be positive")
    out = a * (1.0 + np.cos(theta))
    return float(out) if np.isscalar(theta) else out


def is_ball(rho: RadialFunction, tol: float) -> bool:
    """Whether the profile is constant to within ``tol`` (a centered ball)."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    return float(rho.values.max() - rho.values.min()) < tol


# ---------------------------------------------------------------------------
# bundled input profiles
# ---------------------------------------------------------------------------

def spike_profile(grid_size: int = 2048, radius: float = 1.0) -> RadialFunction:
    """A single point at distance ``radius`` along angle zero."""
    _validate_grid(grid_size)
    values = np.zeros(grid_size)
    values[0] = float(radius)
    return RadialFunction(values)


def circle_profile(a: float = 1.0, grid_size: int = 2048) -> RadialFunction:
    """Circle of radius ``a`` through the base point, centered at (a, 0):
    rho(theta) = max(0, 2a cos(theta))."""
    if a <= 0:
        raise ValueError("a must be positive")
    _validate_grid(grid_size)
    theta = 2.0 * np.pi * np.arange(grid_size) / grid_size
    return RadialFunction(np.maximum(0.0, 2.0 * a * np.cos(theta)))


def random_star_profile(rng: np.random.Generator, grid_size: int = 2048) -> RadialFunction:
    """Rough random star-shaped profile with guaranteed spread.

    Values are grid-scale uniform noise rescaled to an exact range drawn
    from [0.1, 1.0] above a base level in [0.1, 1.0]; the roughness makes
    one sweep step move the profile by a sizable fraction of the range.
    """
    _validate_grid(grid_size)
    base = rng.uniform(0.1, 1.0)
    spread = rng.uniform(0.1, 1.0)
    u = rng.random(grid_size)
    u = (u - u.min()) / (u.max() - u.min())
    return RadialFunction(base + spread * u)
