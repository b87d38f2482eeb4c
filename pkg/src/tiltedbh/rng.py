"""Seeded random generators for state sampling and random-matrix helpers.

Philox is counter based, so a fixed seed gives bit-identical streams on
every platform and for any worker count; the seed is echoed into every
output file that depends on it.
"""

from __future__ import annotations

import numpy as np

__all__ = ["make_rng"]


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed)))
