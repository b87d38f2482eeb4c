"""Random-matrix references: GOE samples, Poisson spectra, two-level form factor."""

from __future__ import annotations

import numpy as np

__all__ = ["goe_matrix", "goe_spectrum", "poisson_spectrum", "b2_form_factor"]


def goe_matrix(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Real symmetric GOE sample: off-diagonal variance 1/2, diagonal variance 1."""
    a = rng.standard_normal((dim, dim))
    return (a + a.T) / 2.0


def goe_spectrum(dim: int, rng: np.random.Generator) -> np.ndarray:
    return np.linalg.eigvalsh(goe_matrix(dim, rng))


def poisson_spectrum(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Sorted iid uniform levels on [0, dim), i.e. unit mean spacing."""
    return np.sort(rng.uniform(0.0, float(dim), size=dim))


def b2_form_factor(tau):
    """GOE two-level form factor b2(tau).

    b2(0) = 1, decays monotonically to 0, continuous at tau = 1:

        b2(tau) = 1 - 2 tau + tau ln(1 + 2 tau),            0 <= tau <= 1
        b2(tau) = -1 + tau ln((2 tau + 1) / (2 tau - 1)),   tau > 1
    """
    t = np.asarray(tau, dtype=np.float64)
    if (t < 0).any():
        raise ValueError("form factor argument must be non-negative")
    out = np.empty_like(t)
    lo = t <= 1.0
    tl = t[lo]
    out[lo] = 1.0 - 2.0 * tl + tl * np.log1p(2.0 * tl)
    th = t[~lo]
    out[~lo] = -1.0 + th * np.log((2.0 * th + 1.0) / (2.0 * th - 1.0))
    if np.ndim(tau) == 0:
        return float(out)
    return out
