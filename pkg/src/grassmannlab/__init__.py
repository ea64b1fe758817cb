"""grassmannlab: a numerical laboratory for subspace projection relations,
saturation closures on Grassmannians, and diametric sweeps of planar regions.

The package has three layers: exact-tolerance subspace arithmetic
(``subspaces``), the projection relation with its closure engine and
explicit constructions (``saturation``), and the sweep dynamical system on
radial profiles (``sweep``), plus a seeded experiment harness
(``experiments``, ``cli``) with bit-stable reports.
"""

from .kernels import BACKEND as SWEEP_KERNEL_BACKEND
from .rng import stream
from .saturation import (
    ClosureParams,
    ClosureVerdict,
    FeasibilityError,
    LocusCircle,
    RPlaneSet,
    SpineCore,
    TauWitness,
    VerificationError,
    build_asymmetry_example,
    build_lemma_pair,
    classify_closure,
    closure,
    grassmann_path,
    lift_projection_check,
    prescribe_intersection,
    projection_locus_circle,
    spine_contains,
    spine_sample,
    tau_project,
)
from .subspaces import (
    COMPLEX,
    REAL,
    AmbientMismatchError,
    ContainmentError,
    DimensionError,
    PrincipalAngleReport,
    Subspace,
    chordal_distance,
    complement_within,
    intersect,
    orthonormalize,
    principal_angles,
    project_subspace,
    random_subspace,
    sum_subspaces,
)
from .sweep import (
    PointCloud2D,
    RadialFunction,
    SweepResult,
    cardioid_reference,
    circle_profile,
    delta_radial,
    is_ball,
    iterate_sweep,
    radial_from_points,
    random_star_profile,
    spike_profile,
)

__version__ = "0.1.0"

__all__ = [
    "AmbientMismatchError", "COMPLEX", "ClosureParams", "ClosureVerdict",
    "ContainmentError", "DimensionError", "FeasibilityError", "LocusCircle",
    "PointCloud2D", "PrincipalAngleReport", "RPlaneSet", "RadialFunction",
    "REAL", "SpineCore", "Subspace", "SweepResult", "SWEEP_KERNEL_BACKEND",
    "TauWitness", "VerificationError", "build_asymmetry_example",
    "build_lemma_pair", "cardioid_reference", "chordal_distance",
    "circle_profile", "classify_closure", "closure", "complement_within",
    "delta_radial", "grassmann_path", "intersect", "is_ball", "iterate_sweep",
    "lift_projection_check", "orthonormalize", "prescribe_intersection",
    "principal_angles", "project_subspace", "projection_locus_circle",
    "radial_from_points", "random_star_profile", "random_subspace",
    "spike_profile", "spine_contains", "spine_sample", "stream",
    "sum_subspaces", "tau_project",
]
