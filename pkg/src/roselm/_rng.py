"""Seed plumbing: every random draw in the package flows through
numpy SeedSequences so results are reproducible and derived streams
(ensemble members, trials, swarm iterations) never collide."""

from __future__ import annotations

import numpy as np


def seed_sequence(seed) -> np.random.SeedSequence:
    """Normalize an int, tuple of ints, or SeedSequence into a SeedSequence."""
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def spawn(seed, n: int) -> list[np.random.SeedSequence]:
    """Derive n independent child seeds from a root seed."""
    return seed_sequence(seed).spawn(n)
