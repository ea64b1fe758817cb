"""Deterministic random streams.

All randomness in the package flows through Philox, a counter-based 64-bit
generator with stable cross-platform output.  Independent streams are derived
by seeding a ``SeedSequence`` with the tuple ``(seed, *path)``, so the same
seed and derivation path always reproduce the same stream, and distinct paths
(worker indices, experiment indices) give statistically independent streams.
"""

from __future__ import annotations

import numpy as np


def stream(seed: int, *path: int) -> np.random.Generator:
    """Return the Philox generator for derivation path ``(seed, *path)``."""
    entropy = (int(seed),) + tuple(int(p) for p in path)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))
