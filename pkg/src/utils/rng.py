"""
Seeded random generators for fixtures.
"""

import numpy as np


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based Philox generator keyed by (seed, stream)."""
    return np.random.Generator(np.random.Philox(key=[seed, stream]))
