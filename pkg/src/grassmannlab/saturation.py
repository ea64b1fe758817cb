"""Projection relations between r-planes, saturation closures, and spines.

The central relation: given r-planes ``zeta`` and ``zeta_prime`` and a
d-plane ``pi`` containing ``zeta``, project ``zeta_prime`` onto ``pi``.  When
the image keeps full rank r it is a witness of the relation; a set of
r-planes closed under taking all such images of its own pairs is *saturated*.

Saturation over a continuum cannot be certified symbolically, so the closure
engine here witnesses it by sampling: admissible d-planes over sampled
ordered pairs, with deduplicated insertion, until no new planes appear for a
configured number of rounds (or a size cap is reached).  The proposal policy
mixes uniform draws with spread-, gap-, and spine-seeking blocks (see
``_plan_round``); every inserted plane is a genuine full-rank image of two
members under a d-plane containing the first, so the policy affects only how
fast the closure is explored, never what counts as a member.  Verdicts carry
the probe evidence that justified them and are never proofs.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .subspaces import (
    COMPLEX,
    CONTAIN_TOL,
    EQUALITY_TOL,
    RANK_RTOL,
    REAL,
    ContainmentError,
    DimensionError,
    Subspace,
    _cht,
    _check_same_ambient,
    chordal_distance,
    complement_within,
    intersect,
    orthonormalize,
    project_subspace,
    random_subspace,
    sum_subspaces,
)


class FeasibilityError(ValueError):
    """A prescribed-intersection target violates a dimension constraint."""


class VerificationError(RuntimeError):
    """A constructed object failed its numerical postcondition after retries."""


# ---------------------------------------------------------------------------
# the projection relation
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class TauWitness:
    """A verified instance of the projection relation.

    ``image`` is the full-rank projection of ``zeta_prime`` onto the d-plane
    ``pi`` containing ``zeta``.  Rank-dropping projections yield no witness.
    """

    zeta: Subspace
    zeta_prime: Subspace
    pi: Subspace
    image: Subspace


def tau_project(
    zeta: Subspace,
    zeta_prime: Subspace,
    pi: Subspace,
    *,
    contain_tol: float = CONTAIN_TOL,
) -> TauWitness | None:
    """Project ``zeta_prime`` onto ``pi`` (a plane containing ``zeta``).

    Returns a witness when the image keeps the common dimension r of the two
    input planes, and ``None`` when the projection drops rank.
    """
    _check_same_ambient(zeta, zeta_prime)
    _check_same_ambient(zeta, pi)
    r = zeta.dim
    if zeta_prime.dim != r:
        raise DimensionError(f"planes have different dimensions {r} != {zeta_prime.dim}")
    if pi.dim < r:
        raise DimensionError(f"pi has dimension {pi.dim} < r = {r}")
    if not pi.contains(zeta, contain_tol):
        raise ContainmentError("pi does not contain zeta")
    image = project_subspace(pi, zeta_prime)
    if image.dim != r:
        return None
    return TauWitness(zeta=zeta, zeta_prime=zeta_prime, pi=pi, image=image)


# ---------------------------------------------------------------------------
# projection locus of a point over all 2-planes containing a line (3d)
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class LocusCircle:
    """Circle traced by projections of a fixed point onto all 2-planes
    through a fixed line in R^3.

    The circle has diameter from p (the projection of the point onto the
    line) to the point itself, and lies in the affine plane through p
    orthogonal to the line.
    """

    center: np.ndarray
    radius: float
    plane_normal: np.ndarray

    def distance_to(self, q: np.ndarray) -> float:
        """Euclidean distance from ``q`` to the circle."""
        q = np.asarray(q, dtype=float)
        rel = q - self.center
        h = float(rel @ self.plane_normal)
        in_plane = rel - h * self.plane_normal
        return math.hypot(h, float(np.linalg.norm(in_plane)) - self.radius)


def projection_locus_circle(ell: Subspace, p_prime: np.ndarray) -> LocusCircle:
    """Locus of ``P_pi p_prime`` over 2-planes ``pi`` containing the line ``ell``."""
    if ell.ambient_dim != 3 or ell.field != REAL or ell.dim != 1:
        raise DimensionError("ell must be a line in real 3-space")
    p_prime = np.asarray(p_prime, dtype=float).reshape(3)
    if np.linalg.norm(p_prime) == 0.0:
        raise ValueError("p_prime must be nonzero")
    u = ell.basis[:, 0]
    p = u * float(u @ p_prime)
    center = (p + p_prime) / 2.0
    radius = float(np.linalg.norm(p_prime - p)) / 2.0
    return LocusCircle(center=center, radius=radius, plane_normal=u.copy())


# ---------------------------------------------------------------------------
# sets of r-planes with deduplication and a running core
# ---------------------------------------------------------------------------

def _embed_projectors(bases: np.ndarray) -> np.ndarray:
    """Flatten projectors of a stack of orthonormal bases into real vectors.

    For planes a, b of dimension r the squared chordal distance equals
    ``r - <emb_a, emb_b>``, so nearest-member queries reduce to one GEMM.
    """
    projs = bases @ _cht(bases)
    if np.iscomplexobj(projs):
        flat = projs.reshape(projs.shape[0], -1)
        return np.concatenate([flat.real, flat.imag], axis=1)
    return projs.reshape(projs.shape[0], -1)


def _min_chordal_sq(emb_queries: np.ndarray, emb_members: np.ndarray, r: int,
                    chunk: int = 512) -> np.ndarray:
    """Minimum squared chordal distance from each query to the member set.

    Works for float64 and float32 embeddings alike; inner products are taken
    in the input precision."""
    out = np.full(emb_queries.shape[0], float(r))
    if emb_members.shape[0] == 0:
        return out
    for lo in range(0, emb_queries.shape[0], chunk):
        hi = min(lo + chunk, emb_queries.shape[0])
        best = np.full(hi - lo, -np.inf, dtype=emb_queries.dtype)
        for mlo in range(0, emb_members.shape[0], 16384):
            mhi = min(mlo + 16384, emb_members.shape[0])
            ip = emb_queries[lo:hi] @ emb_members[mlo:mhi].T
            np.maximum(best, ip.max(axis=1), out=best)
        out[lo:hi] = np.maximum(0.0, float(r) - best.astype(np.float64))
    return out


#: coarse squared-chordal radius for the float32 dedup prefilter; far above
#: float32 inner-product noise (~5e-6) and the dedup tolerance (1e-6 chordal)
_COARSE_SQ = 4e-4


class RPlaneSet:
    """A finite, deduplicated collection of same-dimension subspaces.

    Maintains a stacked array of the member bases for vectorized queries and
    the running intersection (core) of all members.  Two planes within
    ``EQUALITY_TOL`` chordal distance are treated as the same member;
    candidate screening runs in float32 and only near-coincidences are
    re-checked in full precision.
    """

    def __init__(self, planes: list[Subspace], dedup_tol: float = EQUALITY_TOL):
        if not planes:
            raise ValueError("RPlaneSet needs at least one plane")
        first = planes[0]
        self.r = first.dim
        self.ambient_dim = first.ambient_dim
        self.field = first.field
        if self.r < 1:
            raise DimensionError("members must have dimension >= 1")
        self.dedup_tol = float(dedup_tol)
        self._stack = np.zeros((0, self.ambient_dim, self.r), dtype=first.basis.dtype)
        self._emb = np.zeros((0, 0))
        self._emb32 = np.zeros((0, 0), dtype=np.float32)
        self.core = first  # provisional; add_batch folds intersections
        for p in planes:
            _check_same_ambient(first, p)
            if p.dim != self.r:
                raise DimensionError("all members must share the same dimension")
        self.add_batch(np.stack([p.basis for p in planes]))

    def __len__(self) -> int:
        return self._stack.shape[0]

    @property
    def planes(self) -> list[Subspace]:
        return [Subspace(self._stack[i], self.field, _trusted=True) for i in range(len(self))]

    @property
    def bases(self) -> np.ndarray:
        """Read-only view of the stacked member bases, shape (M, n, r)."""
        return self._stack

    def min_chordal_sq(self, bases: np.ndarray) -> np.ndarray:
        """Min squared chordal distance from each query plane to the set."""
        emb = _embed_projectors(bases)
        return _min_chordal_sq(emb, self._emb, self.r)

    def covers(self, bases: np.ndarray, eps: float) -> tuple[float, float]:
        """Fraction of query planes within chordal ``eps`` of a member, and the
        largest observed nearest distance."""
        d2 = self.min_chordal_sq(bases)
        return float(np.mean(d2 <= eps * eps)), float(np.sqrt(d2.max()))

    def contains_plane(self, plane: Subspace) -> bool:
        if plane.dim != self.r:
            return False
        return bool(self.min_chordal_sq(plane.basis[None])[0] <= self.dedup_tol ** 2)

    def add(self, plane: Subspace) -> bool:
        _check_same_ambient(self.planes[0] if len(self) else plane, plane)
        if plane.dim != self.r:
            raise DimensionError("dimension mismatch on insert")
        return self.add_batch(plane.basis[None]) == 1

    def _fresh_mask(self, emb: np.ndarray, emb32: np.ndarray) -> np.ndarray:
        """True for candidates farther than the dedup tolerance from all
        members: float32 screen first, exact check only where it is close."""
        if len(self) == 0:
            return np.ones(emb.shape[0], dtype=bool)
        coarse = _min_chordal_sq(emb32, self._emb32, self.r)
        fresh = coarse > _COARSE_SQ
        unsure = np.flatnonzero(~fresh)
        if unsure.size:
            exact = _min_chordal_sq(emb[unsure], self._emb, self.r)
            fresh[unsure] = exact > self.dedup_tol ** 2
        return fresh

    def add_batch(self, bases: np.ndarray, cap: int | None = None) -> int:
        """Insert planes not already present; returns how many were added.

        Insertion stops silently once ``cap`` members are reached.
        """
        return self.add_batch_indexed(bases, cap).size

    def add_batch_indexed(self, bases: np.ndarray, cap: int | None = None) -> np.ndarray:
        """Like :meth:`add_batch` but returns the candidate positions that
        were inserted (aligned with ``bases``); new members occupy indices
        ``len(self) - k .. len(self) - 1`` in insertion order."""
        if bases.shape[0] == 0:
            return np.zeros(0, dtype=np.int64)
        emb = _embed_projectors(bases)
        emb32 = emb.astype(np.float32)
        idx = np.flatnonzero(self._fresh_mask(emb, emb32))
        if idx.size == 0:
            return np.zeros(0, dtype=np.int64)
        limit = None if cap is None else max(0, cap - len(self))
        if limit == 0:
            return np.zeros(0, dtype=np.int64)
        chosen = self._dedup_within(emb, emb32, idx, limit)
        if chosen.size == 0:
            return np.zeros(0, dtype=np.int64)
        new_stack = bases[chosen]
        if len(self) == 0:
            self._stack = np.array(new_stack)
            self._emb = emb[chosen]
            self._emb32 = emb32[chosen]
            self.core = Subspace(self._stack[0], self.field, _trusted=True)
            self._fold_core(self._stack[1:])
            return chosen
        self._stack = np.concatenate([self._stack, new_stack])
        self._emb = np.concatenate([self._emb, emb[chosen]])
        self._emb32 = np.concatenate([self._emb32, emb32[chosen]])
        self._fold_core(new_stack)
        return chosen

    def _dedup_within(self, emb, emb32, idx, limit):
        """Order-preserving dedup inside one candidate batch (chunked)."""
        if idx.size == 1:
            return idx[:1]
        tol_sq = self.dedup_tol ** 2
        kept: list[np.ndarray] = []
        kept32_blocks: list[np.ndarray] = []
        total = 0
        for lo in range(0, idx.size, 4096):
            if limit is not None and total >= limit:
                break
            chunk = idx[lo:lo + 4096]
            c32 = emb32[chunk]
            ok = np.ones(chunk.size, dtype=bool)
            if kept32_blocks:
                prev = np.concatenate(kept32_blocks)
                d2 = _min_chordal_sq(c32, prev, self.r)
                near = np.flatnonzero(d2 <= _COARSE_SQ)
                for pos in near:
                    exact = _min_chordal_sq(emb[chunk[pos]][None],
                                            emb[np.concatenate(kept)], self.r)
                    ok[pos] = exact[0] > tol_sq
            ip = c32 @ c32.T
            np.fill_diagonal(ip, -np.inf)
            if float(self.r) - float(ip.max()) <= _COARSE_SQ:
                # rare: near-coincidences inside the chunk, resolve greedily
                sub = emb[chunk]
                sel: list[int] = []
                for pos in range(chunk.size):
                    if not ok[pos]:
                        continue
                    if sel and float(self.r) - np.max(sub[sel] @ sub[pos]) <= tol_sq:
                        continue
                    sel.append(pos)
                picked = np.array(sel, dtype=int)
            else:
                picked = np.flatnonzero(ok)
            if limit is not None and total + picked.size > limit:
                picked = picked[: limit - total]
            if picked.size:
                kept.append(chunk[picked])
                kept32_blocks.append(c32[picked])
                total += picked.size
        return np.concatenate(kept) if kept else idx[:0]

    def _fold_core(self, new_bases: np.ndarray) -> None:
        """Shrink the running core by the newly inserted planes."""
        if new_bases.shape[0] == 0 or self.core.dim == 0:
            return
        cb = self.core.basis
        # residual of the core inside each new plane; containment leaves the core alone
        coeff = _cht(new_bases) @ cb
        resid = cb[None] - new_bases @ coeff
        norms = np.linalg.norm(resid.reshape(new_bases.shape[0], -1), axis=1)
        for i in np.flatnonzero(norms > CONTAIN_TOL):
            plane = Subspace(new_bases[i], self.field, _trusted=True)
            self.core = intersect(self.core, plane)
            if self.core.dim == 0:
                return

    def to_json_dict(self, d: int | None = None) -> dict:
        out = {"r": self.r, "planes": [p.to_json_dict() for p in self.planes]}
        if d is not None:
            out["d"] = d
        return out

    @classmethod
    def from_json_dict(cls, data: dict) -> "RPlaneSet":
        return cls([Subspace.from_json_dict(p) for p in data["planes"]])


# ---------------------------------------------------------------------------
# spines
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class SpineCore:
    """A core plane together with the family of r-planes containing it."""

    core: Subspace
    r: int

    def __post_init__(self):
        if not (self.core.dim <= self.r <= self.core.ambient_dim):
            raise DimensionError(
                f"need dim core <= r <= ambient, got {self.core.dim}, {self.r}, "
                f"{self.core.ambient_dim}"
            )


def spine_contains(spine: SpineCore, zeta: Subspace, tol: float = CONTAIN_TOL) -> bool:
    """Membership test: is ``zeta`` an r-plane containing the core?"""
    if zeta.dim != spine.r:
        raise DimensionError(f"zeta has dimension {zeta.dim}, spine expects {spine.r}")
    return zeta.contains(spine.core, tol)


def spine_sample(spine: SpineCore, rng: np.random.Generator) -> Subspace:
    """Haar-random r-plane containing the core."""
    return random_subspace(
        spine.core.ambient_dim,
        spine.r,
        containing=spine.core,
        rng=rng,
        field=spine.core.field,
    )


# ---------------------------------------------------------------------------
# saturation closure by sampled expansion
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class ClosureParams:
    """Sampling budgets for the closure engine.

    Defaults keep small experiments interactive; density-type closures in
    larger Grassmannians need a bigger ``max_planes`` (see the experiment
    registry for calibrated values).
    """

    pair_budget: int = 2000
    pi_samples_per_pair: int = 8
    stability_rounds: int = 5
    max_planes: int = 5000
    max_rounds: int = 150


@dataclasses.dataclass(frozen=True)
class ClosureVerdict:
    """Evidence-carrying classification of a stable closure state.

    ``kind`` is one of ``"spine"``, ``"full"``, ``"two_element"``,
    ``"unresolved"``.  ``core`` is set for spine verdicts and equals the
    running intersection of the set.  ``metrics`` records probe density and
    stability evidence.
    """

    kind: str
    core: Subspace | None
    metrics: dict

    def to_json_dict(self) -> dict:
        out = {"kind": self.kind}
        out.update(self.metrics)
        if self.core is not None:
            out["core"] = self.core.to_json_dict()
        return out


def _haar_planes(count: int, n: int, r: int, rng: np.random.Generator,
                 field: str) -> np.ndarray:
    g = rng.standard_normal((count, n, r))
    if field == COMPLEX:
        g = g + 1j * rng.standard_normal((count, n, r))
    q, _ = np.linalg.qr(g)
    return q


def _nearest_member(s: RPlaneSet, emb32: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Index of and squared chordal distance to the nearest member, per query."""
    m = len(s)
    best_ip = np.full(emb32.shape[0], -np.inf, dtype=np.float32)
    best_idx = np.zeros(emb32.shape[0], dtype=np.int64)
    for lo in range(0, m, 16384):
        ip = emb32 @ s._emb32[lo:lo + 16384].T
        arg = ip.argmax(axis=1)
        val = ip[np.arange(emb32.shape[0]), arg]
        better = val > best_ip
        best_ip[better] = val[better]
        best_idx[better] = arg[better] + lo
    d2 = np.maximum(0.0, float(s.r) - best_ip.astype(np.float64))
    return best_idx, d2


class _LineRegistry:
    """Active spine families for the closure sampler.

    Each entry is a unit line vector plus the indices of members known to
    contain it.  The registry holds few families at a time so each gets a
    meaningful share of the pair budget; a family retires once it has
    matured (enough members to have swept its quotient)."""

    MATURE = 600

    def __init__(self, max_lines: int = 8):
        self.max_lines = max_lines
        self.vecs: list[np.ndarray] = []
        self.members: list[list[int]] = []

    def __len__(self) -> int:
        return len(self.vecs)

    def has_room(self) -> bool:
        return len(self.vecs) < self.max_lines

    def retire_mature(self) -> None:
        keep = [i for i, mm in enumerate(self.members) if len(mm) < self.MATURE]
        if len(keep) != len(self.vecs):
            self.vecs = [self.vecs[i] for i in keep]
            self.members = [self.members[i] for i in keep]

    def activate(self, vec: np.ndarray, member_idx: int) -> int:
        self.vecs.append(vec)
        self.members.append([member_idx])
        return len(self.vecs) - 1

    def record(self, line_id: int, member_idx: int) -> None:
        if line_id < len(self.members):
            self.members[line_id].append(member_idx)


def _principal_directions(planes: np.ndarray, targets: np.ndarray):
    """Per row: the unit vector of ``planes`` closest to ``targets`` and the
    sine of the angle between them (first principal angle)."""
    prod = _cht(planes) @ targets
    u, sv, _ = np.linalg.svd(prod)
    vec = (planes @ u[..., :, :1])[..., 0]
    cos1 = np.clip(sv[..., 0], 0.0, 1.0)
    return vec, np.sqrt(np.maximum(0.0, 1.0 - cos1 ** 2))


class _RoundPlan:
    """One round of pair proposals: index pairs plus optional line
    conditioning (the sampled d-plane will contain the pair's first element
    and, where set, the conditioning line)."""

    __slots__ = ("pair_idx", "cond_vecs", "cond_line")

    def __init__(self, pair_idx, cond_vecs, cond_line):
        self.pair_idx = pair_idx
        self.cond_vecs = cond_vecs
        self.cond_line = cond_line


def _activate_spine(s: RPlaneSet, registry: _LineRegistry, x_idx: int,
                    t_vec: np.ndarray, d: int, rng: np.random.Generator) -> None:
    """Seed the family of r-planes over the line ``t_vec`` (a line of member
    ``x_idx``) with a second exact member, manufactured by prescribing the
    intersection of a sampled projection with that line."""
    x = Subspace(s.bases[x_idx], s.field, _trusted=True)
    t = orthonormalize(t_vec[:, None], field=s.field)
    for _ in range(4):
        y_idx = int(rng.integers(0, len(s)))
        y = Subspace(s.bases[y_idx], s.field, _trusted=True)
        try:
            pi = prescribe_intersection(x, y, t, d, rng, retries=4)
        except (FeasibilityError, VerificationError, ContainmentError):
            continue
        image = project_subspace(pi, y)
        if image.dim != s.r or not image.contains(t, 1e-8):
            continue
        base = len(s)
        if s.add_batch_indexed(image.basis[None]).size:
            line_id = registry.activate(np.array(t.basis[:, 0]), x_idx)
            registry.record(line_id, base)
            return


def _plan_round(s: RPlaneSet, budget: int, rng: np.random.Generator, eps: float,
                registry: _LineRegistry, d: int) -> _RoundPlan:
    """Propose ordered pairs in blocks: spread, gap, spine, uniform.

    Sampled images of a pair lie on the locus spanned between the two
    members, so they never leave the reach of the current set; a tight
    cluster grows only through pairs of near-boundary members whose
    directions from the cluster differ.  The spread block pairs two
    independent far-from-anchor members (each the farthest of a few dozen
    uniform candidates from its own uniform anchor), which keeps the set
    diameter growing multiplicatively where uniform pairs would crawl.

    Line closures (r = 1, and any closure whose running core is nontrivial,
    which is a line closure in the quotient over the core) additionally get
    a gap block: fresh probe planes farther than ``0.8 * eps`` from every
    member select the nearest member as the projection base, so images
    accumulate where the density check would fail.

    Trivial-core plane closures (r > 1) face a stronger barrier: an image
    always shares an (r-1)-plane with the member it was projected from, so
    plain sampling densifies only planes incident to the existing web.  The
    spine block breaks this by conditioning the sampled d-plane to contain
    a chosen line of the projected member: images then land in the family
    of r-planes over that line and sweep it like a line closure one
    dimension down.  Gap probes decide which lines get activated (each
    aimed at an uncovered region via the best of a few dozen members), and
    a small registry that retires matured families keeps the active ones
    few enough to grow deep.  Every inserted plane remains a genuine image
    of two members under an admissible d-plane.
    """
    m = len(s)
    n = s.ambient_dim
    anchors = rng.integers(0, m, size=budget)
    partners = rng.integers(0, m, size=budget)
    cond_vecs = np.zeros((budget, n), dtype=s.bases.dtype)
    cond_line = np.full(budget, -1, dtype=np.int64)
    quarter = budget // 4
    if m <= 2 or quarter == 0:
        return _RoundPlan(np.stack([anchors, partners], axis=1), cond_vecs, cond_line)

    # spread block: two independent far-from-anchor picks
    width = min(m, 48)
    cand = rng.integers(0, m, size=(2 * quarter, width))
    anch = rng.integers(0, m, size=2 * quarter)
    ip = np.einsum("ie,ike->ik", s._emb32[anch], s._emb32[cand])
    far = cand[np.arange(2 * quarter), ip.argmin(axis=1)]
    anchors[:quarter] = far[:quarter]
    partners[:quarter] = far[quarter:]

    # gap probes (spine samples over the core when it is nontrivial)
    nprobe = min(96, quarter)
    core = s.core
    if 0 < core.dim < s.r:
        probe_bases = _haar_superspace_stack(
            np.broadcast_to(core.basis, (nprobe, n, core.dim)).copy(),
            s.r, rng, s.field)
    elif core.dim == 0:
        probe_bases = _haar_planes(nprobe, n, s.r, rng, s.field)
    else:
        return _RoundPlan(np.stack([anchors, partners], axis=1), cond_vecs, cond_line)
    emb32p = _embed_projectors(probe_bases).astype(np.float32)
    near_idx, d2 = _nearest_member(s, emb32p)
    gaps = np.flatnonzero(d2 > (0.8 * eps) ** 2)
    endgame = gaps.size <= nprobe // 4

    if s.r == 1 or core.dim > 0:
        # effectively a line closure: project from the member nearest each gap
        if gaps.size:
            lo = 0 if endgame else quarter
            count = 3 * quarter - lo
            anchors[lo:3 * quarter] = near_idx[gaps[np.arange(count) % gaps.size]]
        return _RoundPlan(np.stack([anchors, partners], axis=1), cond_vecs, cond_line)

    # trivial-core plane closure: activate spine families aimed at the worst
    # gaps.  A family needs two exact members to sweep, and images of plain
    # pairs only ever drift off the existing web, so each activation
    # manufactures the second member by prescribing the intersection of a
    # projection with the line; the result is still a genuine image of two
    # members under an admissible d-plane.
    registry.retire_mature()
    if gaps.size and 2 * s.r <= d and registry.has_room():
        order = np.argsort(d2[gaps])[::-1]
        gcount = min(gaps.size, 2)
        pick = gaps[order[:gcount]]
        cand = rng.integers(0, m, size=(gcount, 24))
        planes = s.bases[cand]
        targets = np.broadcast_to(probe_bases[pick, None], planes.shape).copy()
        vec, sin1 = _principal_directions(planes, targets)
        best = sin1.argmin(axis=1)
        for g in range(gcount):
            if not registry.has_room():
                break
            x_idx = int(cand[g, best[g]])
            t_vec = vec[g, best[g]]
            _activate_spine(s, registry, x_idx, t_vec, d, rng)
    if len(registry) == 0:
        return _RoundPlan(np.stack([anchors, partners], axis=1), cond_vecs, cond_line)

    # spine slots: focus a few families per round so each family's quotient
    # sweep compounds; pairs inside a family are extreme picks (two
    # independent farthest-from-anchor members over the whole family), the
    # rest project a family member from a uniform outside base
    emb32 = s._emb32
    focus = rng.permutation(len(registry))[:min(4, len(registry))]
    slots = list(range(quarter, 3 * quarter))
    per = max(1, len(slots) // len(focus))
    for fi, line_id in enumerate(focus):
        members = np.asarray(registry.members[line_id], dtype=np.int64)
        chunk = slots[fi * per:(fi + 1) * per] if fi < len(focus) - 1 else slots[fi * per:]
        if members.size == 0 or not chunk:
            continue
        memb_emb = emb32[members]
        for pos, slot in enumerate(chunk):
            if members.size > 1 and pos % 4 != 3:
                a0 = memb_emb[int(rng.integers(0, members.size))]
                far1 = int((memb_emb @ a0).argmin())
                a1 = memb_emb[int(rng.integers(0, members.size))]
                far2 = int((memb_emb @ a1).argmin())
                anchors[slot] = members[far1]
                partners[slot] = members[far2]
                # line lies inside the anchor: no conditioning column needed
                cond_line[slot] = line_id
            else:
                anchors[slot] = rng.integers(0, m)
                partners[slot] = members[int(rng.integers(0, members.size))]
                cond_vecs[slot] = registry.vecs[line_id]
                cond_line[slot] = line_id
    return _RoundPlan(np.stack([anchors, partners], axis=1), cond_vecs, cond_line)


def _haar_superspace_stack(bases: np.ndarray, d: int, rng: np.random.Generator,
                           field: str) -> np.ndarray:
    """Haar d-planes containing each plane of the stack, shape (B, n, d)."""
    b, n, r = bases.shape
    g = rng.standard_normal((b, n, d - r))
    if field == COMPLEX:
        g = g + 1j * rng.standard_normal((b, n, d - r))
    raw = np.concatenate([bases, g.astype(bases.dtype)], axis=2)
    q, _ = np.linalg.qr(raw)
    return q


def _conditioned_superspace_stack(bases: np.ndarray, cond: np.ndarray,
                                  d: int, rng: np.random.Generator,
                                  field: str) -> np.ndarray:
    """Haar d-planes containing each plane of the stack and, where the
    conditioning row is nonzero, the given extra line."""
    b, n, r = bases.shape
    g = rng.standard_normal((b, n, d - r))
    if field == COMPLEX:
        g = g + 1j * rng.standard_normal((b, n, d - r))
    g = g.astype(bases.dtype)
    has = np.abs(cond).sum(axis=1) > 0
    g[has, :, 0] = cond[has]
    raw = np.concatenate([bases, g], axis=2)
    q, _ = np.linalg.qr(raw)
    return q


def _tau_image_stack(pis: np.ndarray, zps: np.ndarray, r: int) -> tuple[np.ndarray, np.ndarray]:
    """Full-rank projections of ``zps`` onto ``pis``; returns (bases, mask)."""
    imgs = pis @ (_cht(pis) @ zps)
    u, s, _ = np.linalg.svd(imgs, full_matrices=False)
    full = s[:, r - 1] > RANK_RTOL * s[:, 0]
    return u[:, :, :r], full


def closure(
    initial: RPlaneSet,
    d: int,
    params: ClosureParams,
    rng: np.random.Generator,
    *,
    eps: float = 0.1,
    probe_count: int = 1000,
) -> tuple[RPlaneSet, ClosureVerdict]:
    """Saturate ``initial`` under sampled projections onto admissible
    d-planes.

    Each round draws ``pair_budget`` ordered pairs from the current set
    (see ``_plan_round`` for the proposal policy) and
    ``pi_samples_per_pair`` d-planes over the first element of each pair,
    inserting full-rank images that are new.  Stops after
    ``stability_rounds`` rounds without additions, or at ``max_planes``.
    The returned verdict comes from :func:`classify_closure`.
    """
    r = initial.r
    n = initial.ambient_dim
    if not (1 <= r < d < n):
        raise DimensionError(f"need 1 <= r < d < n, got r={r}, d={d}, n={n}")
    if params.pair_budget < 1 or params.pi_samples_per_pair < 1:
        raise ValueError("pair and plane budgets must be positive")
    s = initial
    registry = _LineRegistry()
    added_per_round: list[int] = []
    quiet = 0
    for _ in range(params.max_rounds):
        if len(s) >= params.max_planes:
            break
        plan = _plan_round(s, params.pair_budget, rng, eps, registry, d)
        reps = params.pi_samples_per_pair
        zetas = np.repeat(s.bases[plan.pair_idx[:, 0]], reps, axis=0)
        zps = np.repeat(s.bases[plan.pair_idx[:, 1]], reps, axis=0)
        cond = np.repeat(plan.cond_vecs, reps, axis=0)
        lines = np.repeat(plan.cond_line, reps)
        pis = _conditioned_superspace_stack(zetas, cond, d, rng, s.field)
        images, full = _tau_image_stack(pis, zps, r)
        base = len(s)
        positions = s.add_batch_indexed(images[full], cap=params.max_planes)
        added = positions.size
        if added and len(registry):
            img_lines = lines[full][positions]
            img_vecs = cond[full][positions]
            new_bases = s.bases[base:base + added]
            # record only images that really contain their conditioning line
            resid = img_vecs - np.einsum(
                "bnr,br->bn", new_bases,
                np.einsum("bnr,bn->br", new_bases.conj(), img_vecs))
            good = (np.abs(resid).max(axis=1) < 1e-8) & (img_lines >= 0)
            for off in np.flatnonzero(good):
                registry.record(int(img_lines[off]), base + int(off))
        added_per_round.append(added)
        quiet = quiet + 1 if added == 0 else 0
        if quiet >= params.stability_rounds:
            break
    verdict = classify_closure(s, d, eps=eps, probe_count=probe_count, rng=rng)
    metrics = dict(verdict.metrics)
    metrics["rounds"] = len(added_per_round)
    metrics["added_per_round"] = added_per_round
    metrics["stable"] = quiet >= params.stability_rounds
    metrics["hit_cap"] = len(s) >= params.max_planes
    return s, ClosureVerdict(verdict.kind, verdict.core, metrics)


def classify_closure(
    s: RPlaneSet,
    d: int,
    *,
    eps: float = 0.1,
    probe_count: int = 1000,
    rng: np.random.Generator,
    expansion_budget: int = 2000,
    contain_tol: float = CONTAIN_TOL,
) -> ClosureVerdict:
    """Classify a (presumed stable) set of r-planes.

    Spine: the core is nontrivial, every member contains it, and Haar probes
    of the planes over the core are all within ``eps`` of some member.
    Full: the core is trivial and Haar probes of the whole Grassmannian are
    covered likewise.  TwoElement: exactly two members and a sampled
    expansion yields nothing new.  Anything else is Unresolved.
    """
    n, r, field = s.ambient_dim, s.r, s.field
    core = s.core
    metrics: dict = {"size": len(s), "core_dim": core.dim}

    if core.dim > 0:
        probes = _haar_superspace_stack(
            np.broadcast_to(core.basis, (probe_count, n, core.dim)).copy(), r, rng, field
        ) if core.dim < r else np.broadcast_to(core.basis, (probe_count, n, r)).copy()
        frac, worst = s.covers(probes, eps)
        resid = s.bases @ (_cht(s.bases) @ core.basis) - core.basis[None]
        max_resid = float(np.linalg.norm(resid.reshape(len(s), -1), axis=1).max())
        metrics.update(density=frac, max_probe_dist=worst, max_core_residual=max_resid)
        if frac == 1.0 and max_resid <= contain_tol * math.sqrt(max(1, core.dim)):
            return ClosureVerdict("spine", core, metrics)
    else:
        g = rng.standard_normal((probe_count, n, r))
        if field == COMPLEX:
            g = g + 1j * rng.standard_normal((probe_count, n, r))
        probes, _ = np.linalg.qr(g)
        frac, worst = s.covers(probes, eps)
        metrics.update(density=frac, max_probe_dist=worst)
        if frac == 1.0:
            return ClosureVerdict("full", None, metrics)

    if len(s) == 2:
        escapes, attempts = _expansion_escapes(s, d, expansion_budget, rng)
        metrics.update(expansion_attempts=attempts, expansion_escapes=escapes)
        if escapes == 0:
            return ClosureVerdict("two_element", None, metrics)
    return ClosureVerdict("unresolved", None, metrics)


def _expansion_escapes(s: RPlaneSet, d: int, budget: int,
                       rng: np.random.Generator) -> tuple[int, int]:
    """Count sampled full-rank images that fall outside the set."""
    m = len(s)
    idx = rng.integers(0, m, size=(budget, 2))
    zetas = s.bases[idx[:, 0]]
    zps = s.bases[idx[:, 1]]
    pis = _haar_superspace_stack(zetas, d, rng, s.field)
    images, full = _tau_image_stack(pis, zps, s.r)
    if not full.any():
        return 0, int(budget)
    d2 = s.min_chordal_sq(images[full])
    return int(np.sum(d2 > s.dedup_tol ** 2)), int(budget)


# ---------------------------------------------------------------------------
# explicit constructions
# ---------------------------------------------------------------------------

def build_lemma_pair(r: int, d: int, n: int, field: str = REAL) -> tuple[Subspace, Subspace]:
    """Two r-planes forming a saturated pair when ``2r > d``.

    The planes are ``zeta + beta`` and ``zeta' + beta`` for coordinate blocks
    ``zeta``, ``zeta'`` of dimension d - r + 1 and a shared block ``beta`` of
    dimension 2r - d - 1; every admissible projection of one onto a d-plane
    over the other drops rank, so the pair expands to nothing new.
    """
    if not (1 <= r < d < n):
        raise DimensionError(f"need 1 <= r < d < n, got ({r}, {d}, {n})")
    if 2 * r <= d:
        raise DimensionError("construction needs 2r > d; no such pair exists otherwise")
    block = d - r + 1
    shared = 2 * r - d - 1
    if n < 2 * block + shared:
        raise DimensionError(f"need n >= d + 1 = {2 * block + shared}, got {n}")
    beta = list(range(2 * block, 2 * block + shared))
    eta = Subspace.coordinate(n, list(range(block)) + beta, field)
    eta_prime = Subspace.coordinate(n, list(range(block, 2 * block)) + beta, field)
    return eta, eta_prime


def build_asymmetry_example(n: int = 5, field: str = REAL) -> tuple[Subspace, Subspace, Subspace]:
    """A triple (eta, eta_prime, pi) where projecting eta_prime onto pi gives
    exactly eta, while eta + eta_prime has dimension 4 > 3 so no 3-plane can
    contain both and the reversed relation is structurally impossible.
    """
    if n < 5:
        raise DimensionError(f"need n >= 5, got {n}")
    e = np.eye(n, dtype=np.float64)
    eta = Subspace.coordinate(n, [0, 1], field)
    s = 1.0 / math.sqrt(2.0)
    basis = np.stack([(e[:, 0] + e[:, 3]) * s, (e[:, 1] + e[:, 4]) * s], axis=1)
    eta_prime = Subspace(basis.astype(np.complex128) if field == COMPLEX else basis, field)
    pi = Subspace.coordinate(n, [0, 1, 2], field)
    return eta, eta_prime, pi


def prescribe_intersection(
    eta: Subspace,
    eta_prime: Subspace,
    target: Subspace,
    d: int,
    rng: np.random.Generator,
    retries: int = 16,
) -> Subspace:
    """Find a d-plane ``pi`` over ``eta`` whose projection of ``eta_prime``
    meets ``eta`` exactly in ``target``.

    Construction: take the preimage U of ``target`` under the projection of
    ``eta_prime`` onto ``eta``, put the complement-part of U into the
    orthogonal complement of ``pi``, and fill the remaining complement
    dimensions generically inside the complement of ``eta``.  The returned
    plane is verified numerically against the target and regenerated with a
    fresh generic completion on failure.
    """
    _check_same_ambient(eta, eta_prime)
    _check_same_ambient(eta, target)
    n = eta.ambient_dim
    r = eta.dim
    if eta_prime.dim != r:
        raise DimensionError("eta and eta_prime must have equal dimension")
    if not (r < d < n):
        raise DimensionError(f"need r < d < n, got ({r}, {d}, {n})")
    if 2 * r > d:
        raise DimensionError("construction assumes 2r <= d")
    if not eta.contains(target, EQUALITY_TOL):
        raise FeasibilityError("target must lie inside eta")
    mutual = intersect(eta, eta_prime)
    if not target.contains(mutual, EQUALITY_TOL):
        raise FeasibilityError(
            f"target must contain the mutual intersection (dim {mutual.dim})"
        )
    reachable = sum_subspaces(mutual, project_subspace(eta, eta_prime))
    if not reachable.contains(target, EQUALITY_TOL):
        raise FeasibilityError(
            f"target (dim {target.dim}) exceeds the reachable image "
            f"(dim {reachable.dim}) of eta_prime inside eta"
        )

    # preimage U = {u in eta_prime : P_eta u in target}; the kernel matrix is
    # a product of norm-bounded factors, so singular values need an absolute
    # floor too (a numerically-zero matrix must not look full-rank)
    k = (eta.projector() - target.projector()) @ eta_prime.basis
    _, sv, vh = np.linalg.svd(k)
    floor = max(RANK_RTOL * sv[0], 1e-10) if sv.size else 1e-10
    rank = int(np.sum(sv > floor))
    coeff = _cht(vh)[:, rank:]
    u_space = orthonormalize(eta_prime.basis @ coeff, field=eta.field) \
        if coeff.shape[1] else Subspace.zero(n, eta.field)

    full = Subspace.full(n, eta.field)
    eta_perp = complement_within(full, eta)
    v_u = project_subspace(eta_perp, u_space) if u_space.dim else Subspace.zero(n, eta.field)
    if v_u.dim > n - d:
        raise FeasibilityError(
            f"complement part of the preimage has dimension {v_u.dim} > n - d = {n - d}"
        )

    last_err = None
    for _ in range(max(1, retries)):
        pi_perp = random_subspace(n, n - d, within=eta_perp, containing=v_u, rng=rng,
                                  field=eta.field)
        pi = complement_within(full, pi_perp)
        got = intersect(project_subspace(pi, eta_prime), eta)
        if got.dim == target.dim and (
            target.dim == 0 or chordal_distance(got, target) < EQUALITY_TOL
        ):
            return pi
        last_err = (got.dim, target.dim)
    raise VerificationError(
        f"no sampled completion met the target after {retries} retries "
        f"(last intersection dim {last_err[0]}, wanted {last_err[1]})"
    )


def grassmann_path(a: Subspace, b: Subspace) -> list[Subspace]:
    """Path from ``a`` to ``b`` moving one basis direction at a time.

    Consecutive planes intersect in dimension r - 1; the path has
    ``r - dim(a & b)`` edges, swapping one direction of a off the mutual
    intersection for one of b per step.
    """
    _check_same_ambient(a, b)
    if a.dim != b.dim:
        raise DimensionError("endpoints must have equal dimension")
    core = intersect(a, b)
    a_extra = complement_within(a, core)
    b_extra = complement_within(b, core)
    m = a_extra.dim
    path = [a]
    for i in range(1, m + 1):
        if i == m:
            path.append(b)
            break
        raw = np.hstack([core.basis, b_extra.basis[:, :i], a_extra.basis[:, i:]])
        step = orthonormalize(raw, field=a.field)
        if step.dim != a.dim:  # pragma: no cover - guaranteed by construction
            raise VerificationError("path step lost rank")
        path.append(step)
    return path


def lift_projection_check(ell: Subspace, pi: Subspace, hyperplane: Subspace) -> float:
    """Discrepancy between projecting inside a hyperplane and projecting onto
    the plane enlarged by the hyperplane's complement.

    Both projections agree for any ``ell`` inside the hyperplane; the
    returned chordal distance is the numerical witness (contract: < 1e-10).
    """
    if not hyperplane.contains(ell, CONTAIN_TOL):
        raise ContainmentError("ell must lie inside the hyperplane")
    if not hyperplane.contains(pi, CONTAIN_TOL):
        raise ContainmentError("pi must lie inside the hyperplane")
    full = Subspace.full(ell.ambient_dim, ell.field)
    lifted = sum_subspaces(pi, complement_within(full, hyperplane))
    inside = project_subspace(pi, ell)
    outside = project_subspace(lifted, ell)
    if inside.dim != outside.dim:
        return float(max(inside.dim, outside.dim))
    return chordal_distance(inside, outside)
