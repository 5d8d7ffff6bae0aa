"""Seed derivation and counter-based per-trial RNG substreams.

Every stochastic routine in the package takes an explicit integer seed.
Sub-seeds for sweep points, kernels, and similar nested uses come from
``derive_seed``; Monte Carlo trials get their own Philox substream keyed
by (seed, trial index), so an estimate is bit-identical no matter how the
trial loop is ordered or partitioned.
"""

from __future__ import annotations

import numpy as np


def derive_seed(master: int, *path: int) -> int:
    """Derive a 64-bit sub-seed from a master seed and an index path."""
    ss = np.random.SeedSequence(master, spawn_key=tuple(path))
    return int(ss.generate_state(1, np.uint64)[0])


def trial_generator(seed: int, trial: int) -> np.random.Generator:
    """Counter-based generator for one Monte Carlo trial.

    Substreams are disjoint by construction: trial ``t`` owns the Philox
    counter block starting at ``t * 2**64``, which leaves 2**66 draws of
    headroom per trial.
    """
    bitgen = np.random.Philox(key=seed, counter=trial << 64)
    return np.random.Generator(bitgen)
