"""Complex-scalar runs of the relation and closure machinery.

The bundled experiments default to real scalars; these direct complex runs
corroborate that the whole pipeline (sampling, projection images,
deduplication, verdicts) is field-agnostic.
"""

import numpy as np

from grassmannlab import rng as rng_mod
from grassmannlab.saturation import (
    ClosureParams,
    RPlaneSet,
    SpineCore,
    build_lemma_pair,
    closure,
    spine_contains,
    spine_sample,
    tau_project,
)
from grassmannlab.subspaces import COMPLEX, random_subspace


def test_complex_singleton_is_spine():
    rng = rng_mod.stream(70)
    zeta = random_subspace(4, 2, rng=rng, field=COMPLEX)
    params = ClosureParams(pair_budget=50, pi_samples_per_pair=4)
    final, verdict = closure(RPlaneSet([zeta]), 3, params, rng, probe_count=100)
    assert verdict.kind == "spine"
    assert len(final) == 1
    assert verdict.core.equals(zeta)


def test_complex_lemma_pair_is_stable():
    rng = rng_mod.stream(71)
    eta, eta_prime = build_lemma_pair(2, 3, 4, field=COMPLEX)
    params = ClosureParams(pair_budget=100, pi_samples_per_pair=4)
    final, verdict = closure(RPlaneSet([eta, eta_prime]), 3, params, rng)
    assert verdict.kind == "two_element"
    assert len(final) == 2


def test_complex_line_pair_fills_projective_plane():
    # the complex projective plane has twice the real dimension, so the
    # density probe runs at a wider radius than its real counterpart
    rng = rng_mod.stream(72)
    l1 = random_subspace(3, 1, rng=rng, field=COMPLEX)
    l2 = random_subspace(3, 1, rng=rng, field=COMPLEX)
    params = ClosureParams(pair_budget=50, pi_samples_per_pair=4,
                           max_planes=20000, max_rounds=150)
    final, verdict = closure(RPlaneSet([l1, l2]), 2, params, rng,
                             eps=0.2, probe_count=400)
    assert verdict.kind == "full"
    assert np.iscomplexobj(final.bases)


def test_complex_spine_saturation():
    rng = rng_mod.stream(73)
    witnesses = 0
    for _ in range(60):
        core = random_subspace(5, 1, rng=rng, field=COMPLEX)
        spine = SpineCore(core=core, r=2)
        zeta = spine_sample(spine, rng)
        zeta_prime = spine_sample(spine, rng)
        sigma = random_subspace(5, 3, containing=zeta, rng=rng)
        witness = tau_project(zeta, zeta_prime, sigma)
        if witness is None:
            continue
        witnesses += 1
        assert spine_contains(spine, witness.image, 1e-8)
    assert witnesses > 0
