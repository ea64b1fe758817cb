"""Subspace arithmetic over real or complex scalars.

A subspace of an n-dimensional inner-product space is stored as an n x k
matrix with orthonormal columns (k = 0 encodes the zero subspace).  All
operations are pure; subspaces are immutable values and safe to share.

Tolerances follow one regime throughout the package:

* ``RANK_RTOL``      -- a singular value below ``RANK_RTOL * s_max`` counts
  as zero when deciding ranks (orthonormalize, projections, sums).
* ``ANGLE_COS_TOL``  -- a principal cosine at least ``1 - ANGLE_COS_TOL``
  counts as a zero angle (intersections, numerical intersection dimension).
* ``EQUALITY_TOL``   -- two same-dimension subspaces within this chordal
  distance are considered equal (deduplication, verdict checks).
* ``CONTAIN_TOL``    -- residual norm threshold for containment checks.
"""

from __future__ import annotations

import dataclasses

import numpy as np

REAL = "real"
COMPLEX = "complex"

RANK_RTOL = 1e-8
ANGLE_COS_TOL = 1e-8
EQUALITY_TOL = 1e-6
CONTAIN_TOL = 1e-8
ORTHONORMAL_ATOL = 1e-12

#: dense-algebra guard; everything here is meant for small ambient dimensions
MAX_AMBIENT_DIM = 32


class AmbientMismatchError(ValueError):
    """Operands live in different ambient spaces (dimension or scalar field)."""


class DimensionError(ValueError):
    """Requested dimensions are inconsistent or infeasible."""


class ContainmentError(ValueError):
    """A required containment between subspaces fails beyond tolerance."""


def _dtype_for(field: str):
    if field == REAL:
        return np.float64
    if field == COMPLEX:
        return np.complex128
    raise ValueError(f"unknown scalar field {field!r}")


def _cht(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose of the last two axes."""
    return np.conj(np.swapaxes(m, -1, -2))


class Subspace:
    """An r-plane in an n-dimensional real or complex inner-product space.

    Attributes
    ----------
    ambient_dim : int
        Dimension n of the surrounding space.
    field : str
        ``"real"`` or ``"complex"``; fixed per ambient space.
    basis : ndarray, shape (n, k)
        Orthonormal columns spanning the subspace, read-only.  k = 0 is the
        zero subspace.
    """

    __slots__ = ("ambient_dim", "field", "basis")

    def __init__(self, basis, field: str | None = None, *, _trusted: bool = False):
        basis = np.asarray(basis)
        if basis.ndim != 2:
            raise DimensionError(f"basis must be 2-d, got shape {basis.shape}")
        n, k = basis.shape
        if n < 1 or n > MAX_AMBIENT_DIM:
            raise DimensionError(f"ambient dimension {n} outside [1, {MAX_AMBIENT_DIM}]")
        if k > n:
            raise DimensionError(f"{k} orthonormal columns cannot fit in dimension {n}")
        if field is None:
            field = COMPLEX if np.iscomplexobj(basis) else REAL
        basis = np.ascontiguousarray(basis, dtype=_dtype_for(field))
        if not _trusted and k > 0:
            gram = _cht(basis) @ basis
            if np.max(np.abs(gram - np.eye(k))) > 1e2 * ORTHONORMAL_ATOL:
                raise ValueError("basis columns are not orthonormal; use orthonormalize()")
        basis.setflags(write=False)
        object.__setattr__(self, "ambient_dim", n)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "basis", basis)

    def __setattr__(self, name, value):
        raise AttributeError("Subspace is immutable")

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @classmethod
    def zero(cls, ambient_dim: int, field: str = REAL) -> "Subspace":
        return cls(np.zeros((ambient_dim, 0), dtype=_dtype_for(field)), field, _trusted=True)

    @classmethod
    def full(cls, ambient_dim: int, field: str = REAL) -> "Subspace":
        return cls(np.eye(ambient_dim, dtype=_dtype_for(field)), field, _trusted=True)

    @classmethod
    def coordinate(cls, ambient_dim: int, indices, field: str = REAL) -> "Subspace":
        """Span of the given coordinate axes (0-based indices)."""
        eye = np.eye(ambient_dim, dtype=_dtype_for(field))
        return cls(eye[:, list(indices)], field, _trusted=True)

    def projector(self) -> np.ndarray:
        """The n x n orthogonal projector onto this subspace."""
        if self.dim == 0:
            return np.zeros((self.ambient_dim, self.ambient_dim), dtype=self.basis.dtype)
        return self.basis @ _cht(self.basis)

    def project_vector(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=self.basis.dtype)
        if self.dim == 0:
            return np.zeros_like(v)
        return self.basis @ (_cht(self.basis) @ v)

    def contains(self, other: "Subspace", tol: float = CONTAIN_TOL) -> bool:
        """Whether ``other`` lies inside this subspace, up to residual ``tol``."""
        _check_same_ambient(self, other)
        if other.dim == 0:
            return True
        if other.dim > self.dim:
            return False
        resid = other.basis - self.project_vector(other.basis)
        return float(np.linalg.norm(resid, ord=2)) <= tol

    def equals(self, other: "Subspace", tol: float = EQUALITY_TOL) -> bool:
        _check_same_ambient(self, other)
        if self.dim != other.dim:
            return False
        return chordal_distance(self, other) < tol

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim}, field={self.field})"

    def to_json_dict(self) -> dict:
        """JSON form: {ambient_dim, field, basis} with basis entries row-major,
        each entry ``[re]`` (real) or ``[re, im]`` (complex)."""
        if self.field == REAL:
            entries = [[float(x)] for x in self.basis.ravel(order="C")]
        else:
            entries = [[float(x.real), float(x.imag)] for x in self.basis.ravel(order="C")]
        return {"ambient_dim": self.ambient_dim, "field": self.field, "basis": entries}

    @classmethod
    def from_json_dict(cls, data: dict) -> "Subspace":
        n = int(data["ambient_dim"])
        field = data["field"]
        entries = data["basis"]
        k = len(entries) // n if n else 0
        if n * k != len(entries):
            raise ValueError("basis entry count is not a multiple of ambient_dim")
        if field == REAL:
            flat = np.array([e[0] for e in entries], dtype=np.float64)
        else:
            flat = np.array([complex(e[0], e[1]) for e in entries], dtype=np.complex128)
        return cls(flat.reshape(n, k), field)


def _check_same_ambient(a: Subspace, b: Subspace) -> None:
    if a.ambient_dim != b.ambient_dim or a.field != b.field:
        raise AmbientMismatchError(
            f"ambient mismatch: ({a.ambient_dim}, {a.field}) vs ({b.ambient_dim}, {b.field})"
        )


def orthonormalize(raw: np.ndarray, tol: float = RANK_RTOL, field: str | None = None) -> Subspace:
    """Orthonormal basis of the numerical column space of ``raw``.

    Rank is the number of singular values exceeding ``tol`` times the largest
    one; a zero matrix yields the zero subspace.
    """
    raw = np.asarray(raw)
    if raw.ndim != 2 or raw.shape[0] < 1:
        raise DimensionError(f"expected an n x m matrix with n >= 1, got shape {raw.shape}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if field is None:
        field = COMPLEX if np.iscomplexobj(raw) else REAL
    raw = np.asarray(raw, dtype=_dtype_for(field))
    n, m = raw.shape
    if m == 0:
        return Subspace.zero(n, field)
    u, s, _ = np.linalg.svd(raw, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return Subspace.zero(n, field)
    rank = int(np.sum(s > tol * s[0]))
    return Subspace(u[:, :rank], field, _trusted=True)


def project_subspace(pi: Subspace, zeta: Subspace) -> Subspace:
    """Image of ``zeta`` under the orthogonal projection onto ``pi``.

    The dimension can drop below ``zeta.dim`` when ``zeta`` meets the
    orthogonal complement of ``pi``.
    """
    _check_same_ambient(pi, zeta)
    if pi.dim == 0 or zeta.dim == 0:
        return Subspace.zero(pi.ambient_dim, pi.field)
    return orthonormalize(pi.basis @ (_cht(pi.basis) @ zeta.basis), field=pi.field)


def intersect(a: Subspace, b: Subspace, cos_tol: float = ANGLE_COS_TOL) -> Subspace:
    """Numerical intersection: span of principal vectors with cosine >= 1 - cos_tol."""
    _check_same_ambient(a, b)
    if a.dim == 0 or b.dim == 0:
        return Subspace.zero(a.ambient_dim, a.field)
    u, s, _ = np.linalg.svd(_cht(a.basis) @ b.basis)
    keep = int(np.sum(s >= 1.0 - cos_tol))
    if keep == 0:
        return Subspace.zero(a.ambient_dim, a.field)
    return Subspace(a.basis @ u[:, :keep], a.field, _trusted=True)


def sum_subspaces(a: Subspace, b: Subspace) -> Subspace:
    """Span of the union: orthonormalization of the concatenated bases."""
    _check_same_ambient(a, b)
    if a.dim == 0:
        return b
    if b.dim == 0:
        return a
    return orthonormalize(np.hstack([a.basis, b.basis]), field=a.field)


def complement_within(outer: Subspace, inner: Subspace, tol: float = EQUALITY_TOL) -> Subspace:
    """Orthogonal complement of ``inner`` inside ``outer``.

    Requires ``inner <= outer`` up to ``tol``; with ``outer`` the full space
    this is the usual orthogonal complement.
    """
    _check_same_ambient(outer, inner)
    if not outer.contains(inner, tol):
        raise ContainmentError("inner subspace does not lie inside outer")
    if inner.dim == 0:
        return outer
    if inner.dim == outer.dim:
        return Subspace.zero(outer.ambient_dim, outer.field)
    resid = outer.basis - inner.basis @ (_cht(inner.basis) @ outer.basis)
    comp = orthonormalize(resid, field=outer.field)
    # rank must close exactly: dim outer = dim inner + dim complement
    if comp.dim != outer.dim - inner.dim:
        raise ContainmentError(
            f"complement rank {comp.dim} != {outer.dim - inner.dim}; containment is marginal"
        )
    return comp


@dataclasses.dataclass(frozen=True)
class PrincipalAngleReport:
    """Principal angles between two subspaces plus derived metrics.

    ``angles`` is ascending in [0, pi/2] (nonincreasing cosines);
    ``dim_intersection`` counts angles whose cosine clears the zero-angle
    tolerance; ``chordal_distance`` is sqrt(sum sin^2(theta_i)).
    """

    angles: np.ndarray
    chordal_distance: float
    dim_intersection: int


def principal_angles(a: Subspace, b: Subspace, cos_tol: float = ANGLE_COS_TOL) -> PrincipalAngleReport:
    """Principal angles computed with full accuracy at both ends.

    Cosines (singular values of A* B) resolve angles near pi/2; sines
    (singular values of the residual of A off b) resolve angles near zero,
    where the cosine route loses half the working precision.  Angles combine
    both via arctan2."""
    _check_same_ambient(a, b)
    if a.dim == 0 or b.dim == 0:
        return PrincipalAngleReport(np.zeros(0), 0.0, 0)
    k = min(a.dim, b.dim)
    cosines = np.linalg.svd(_cht(a.basis) @ b.basis, compute_uv=False)
    cosines = np.clip(cosines, 0.0, 1.0)
    small, big = (a, b) if a.dim <= b.dim else (b, a)
    resid = small.basis - big.basis @ (_cht(big.basis) @ small.basis)
    sines = np.linalg.svd(resid, compute_uv=False)
    sines = np.clip(np.sort(sines), 0.0, 1.0)  # ascending, pairs with cosines desc
    angles = np.arctan2(sines, cosines)
    return PrincipalAngleReport(
        angles=angles,
        chordal_distance=float(np.linalg.norm(sines)),
        dim_intersection=int(np.sum(cosines >= 1.0 - cos_tol)),
    )


def chordal_distance(a: Subspace, b: Subspace) -> float:
    return principal_angles(a, b).chordal_distance


def random_subspace(
    n: int,
    k: int,
    *,
    within: Subspace | None = None,
    containing: Subspace | None = None,
    rng: np.random.Generator,
    field: str = REAL,
) -> Subspace:
    """Haar-random k-plane, conditioned to lie inside ``within`` and to
    contain ``containing``.

    Gaussian directions are drawn in ``within`` minus ``containing``,
    orthonormalized, and adjoined to the basis of ``containing``; the result
    is rotation-invariant under the stabilizer of the constraints and fully
    determined by the generator state.
    """
    if within is not None:
        field = within.field
    elif containing is not None:
        field = containing.field
    if within is None:
        within = Subspace.full(n, field)
    if containing is None:
        containing = Subspace.zero(n, field)
    _check_same_ambient(within, containing)
    if within.ambient_dim != n:
        raise AmbientMismatchError("constraints live in a different ambient dimension")
    if not (0 <= k <= n):
        raise DimensionError(f"k={k} outside [0, {n}]")
    if not (containing.dim <= k <= within.dim):
        raise DimensionError(
            f"infeasible constraints: need {containing.dim} <= k={k} <= {within.dim}"
        )
    if not within.contains(containing, EQUALITY_TOL):
        raise ContainmentError("`containing` does not lie inside `within`")
    extra = k - containing.dim
    if extra == 0:
        return containing
    free = complement_within(within, containing)
    for _ in range(8):
        g = rng.standard_normal((free.dim, extra))
        if field == COMPLEX:
            g = g + 1j * rng.standard_normal((free.dim, extra))
        cand = orthonormalize(free.basis @ g, field=field)
        if cand.dim == extra:
            break
    else:  # pragma: no cover - Gaussian rank deficiency has measure zero
        raise RuntimeError("failed to draw a full-rank Gaussian frame")
    if containing.dim == 0:
        return cand
    return Subspace(np.hstack([containing.basis, cand.basis]), field)
