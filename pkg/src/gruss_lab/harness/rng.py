"""Reproducible randomness.

Every random draw in the workbench comes from a Philox4x64 counter-based
generator keyed by ``SeedSequence((master_seed, trial_index))``. Gaussians are
produced from uniform doubles by the Box-Muller transform, so the only
primitive consumed from the bit generator is ``random()`` on [0, 1).
"""
from __future__ import annotations

import numpy as np


def trial_rng(master_seed: int, trial_index: int, stream: int = 0) -> np.random.Generator:
    seq = np.random.SeedSequence([int(master_seed) & 0xFFFFFFFFFFFFFFFF, int(trial_index), int(stream)])
    return np.random.Generator(np.random.Philox(seq))


def gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard normal draws via Box-Muller on uniform doubles."""
    size = int(np.prod(shape)) if shape != () else 1
    half = (size + 1) // 2
    u1 = 1.0 - rng.random(half)  # (0, 1]
    u2 = rng.random(half)
    r = np.sqrt(-2.0 * np.log(u1))
    z = np.concatenate([r * np.cos(2 * np.pi * u2), r * np.sin(2 * np.pi * u2)])[:size]
    return z.reshape(shape)


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return gaussian(rng, shape) + 1j * gaussian(rng, shape)
