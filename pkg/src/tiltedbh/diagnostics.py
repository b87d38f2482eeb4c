"""Per-eigenstate static indicators: participation ratio, single-site
entanglement entropy against its typical-state reference, and half-chain
imbalance.

Because total boson number is fixed, the reduced density matrix of one
site is diagonal in the occupation basis (the rest of the chain pins the
site occupation), so S^(i) = -sum_n p_n ln p_n with
p_n = sum over basis states with n bosons on site i of |c|^2.  The dense
partial trace exists only as a test oracle.  All entropies are in nats.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log, log1p

import numpy as np
from scipy.special import xlogy

from .basis import FockBasis
from .spectrum import SpectralData

__all__ = [
    "NotNormalizedError",
    "EmptyWindowError",
    "participation_ratio",
    "goe_participation_reference",
    "single_site_entropy",
    "page_value",
    "half_chain_imbalance",
    "left_half_site_count",
    "imbalance_diagonal",
    "occupation_distributions",
    "entropy_from_distributions",
    "central_window_average",
    "EigenstateDiagnostics",
    "eigenstate_diagnostics",
    "write_eigenstate_csv",
]

NORM_ATOL = 1e-10


class NotNormalizedError(ValueError):
    pass


class EmptyWindowError(ValueError):
    pass


def _probabilities(state) -> np.ndarray:
    c = np.asarray(state)
    p = np.abs(c) ** 2 if np.iscomplexobj(c) else c.astype(np.float64) ** 2
    total = p.sum()
    if abs(total - 1.0) > NORM_ATOL:
        raise NotNormalizedError(f"state norm^2 = {total!r}, expected 1")
    return p


def participation_ratio(amplitudes) -> float:
    """PR = 1 / sum_k |c_k|^4 of a normalized state; 1 (localized) to dim."""
    p = _probabilities(amplitudes)
    return float(1.0 / (p ** 2).sum())


def goe_participation_reference(dim: int) -> float:
    """Delocalization reference for chaotic states, dim / 3."""
    return dim / 3.0


def single_site_entropy(state, basis: FockBasis, site: int) -> float:
    """Entanglement entropy (nats) between site ``site`` (0-based) and the rest."""
    if not 0 <= site < basis.n_sites:
        raise IndexError(f"site {site} out of range [0, {basis.n_sites})")
    p = _probabilities(state)
    occ_probs = np.bincount(
        basis.states[:, site], weights=p, minlength=basis.n_bosons + 1
    )
    return float(-xlogy(occ_probs, occ_probs).sum())


def page_value(n_bosons: int, n_sites: int) -> float:
    """Typical single-site entanglement entropy of chaotic states (nats).

    With volume V = M, subsystem fraction f = 1/M and density n = N/V:

        S = V f [(n+1) ln(n+1) - n ln n] + (f + ln(1 - f)) / 2
    """
    if n_sites < 2:
        raise ValueError("need at least two sites")
    v = n_sites
    f = 1.0 / n_sites
    n = n_bosons / v
    return v * f * ((n + 1.0) * log(n + 1.0) - n * log(n)) + 0.5 * (f + log1p(-f))


def left_half_site_count(n_sites: int) -> int:
    """ceil(M/2): for odd chains the left half holds the extra site."""
    return (n_sites + 1) // 2


def imbalance_diagonal(basis: FockBasis) -> np.ndarray:
    """(n_left - n_right)/N for every basis state, as a length-dim vector."""
    left = left_half_site_count(basis.n_sites)
    n_l = basis.states[:, :left].sum(axis=1)
    n_r = basis.states[:, left:].sum(axis=1)
    return (n_l - n_r) / float(basis.n_bosons)


def half_chain_imbalance(state, basis: FockBasis) -> float:
    """Expectation of (n_left - n_right)/N, in [-1, 1]."""
    p = _probabilities(state)
    return float(p @ imbalance_diagonal(basis))


def occupation_distributions(probabilities, basis: FockBasis) -> np.ndarray:
    """Site-occupation distributions p[..., i, n] from Fock-basis probabilities.

    ``probabilities`` has shape (..., dim); the result has shape
    (..., M, N+1) and each (i, :) slice sums to 1.
    """
    p = np.atleast_2d(np.asarray(probabilities, dtype=np.float64))
    m, nmax = basis.n_sites, basis.n_bosons
    onehot = np.zeros((m * (nmax + 1), basis.dim))
    for i in range(m):
        occ = basis.states[:, i]
        onehot[i * (nmax + 1) + occ, np.arange(basis.dim)] = 1.0
    dist = p @ onehot.T
    dist = dist.reshape(p.shape[:-1] + (m, nmax + 1))
    if np.ndim(probabilities) == 1:
        return dist[0]
    return dist


def entropy_from_distributions(distributions) -> np.ndarray:
    """-sum_n p_n ln p_n over the last axis, with 0 ln 0 = 0."""
    d = np.asarray(distributions)
    return -xlogy(d, d).sum(axis=-1)


def central_window_average(values, window: float = 0.8) -> float:
    """Mean over the central fraction of entries, selected by index.

    ``values`` must be ordered by spectral index; ``window`` = 0.8 keeps
    the middle 80% of the eigenstates.
    """
    if not 0.0 < window <= 1.0:
        raise EmptyWindowError(f"window must lie in (0, 1], got {window}")
    v = np.asarray(values)
    keep = int(round(window * v.size))
    if keep < 1:
        raise EmptyWindowError(
            f"window {window} selects no entries out of {v.size}"
        )
    start = (v.size - keep) // 2
    return float(v[start: start + keep].mean())


@dataclass
class EigenstateDiagnostics:
    """Static per-eigenstate indicators, ordered by eigenvalue index."""

    participation: np.ndarray        # (dim,)
    site_entropy: np.ndarray         # (dim, M), nats
    entropy_mean: np.ndarray         # (dim,), site average
    imbalance: np.ndarray            # (dim,)
    page: float                      # reference entropy
    participation_goe: float         # dim / 3


def eigenstate_diagnostics(spectral: SpectralData,
                           chunk: int = 2048) -> EigenstateDiagnostics:
    """All static indicators for every eigenstate of a diagonalized point."""
    from .dynamics import MissingEigenvectorsError  # local to avoid cycle

    if not spectral.has_vectors:
        raise MissingEigenvectorsError("eigenvectors required for diagnostics")
    basis = spectral.basis
    dim = spectral.dim
    imb_diag = imbalance_diagonal(basis)
    pr = np.empty(dim)
    ent = np.empty((dim, basis.n_sites))
    imb = np.empty(dim)
    vecs = spectral.eigenvectors
    for a in range(0, dim, chunk):
        b = min(a + chunk, dim)
        probs = (vecs[:, a:b] ** 2).T  # rows = eigenstates
        pr[a:b] = 1.0 / (probs ** 2).sum(axis=1)
        ent[a:b] = entropy_from_distributions(
            occupation_distributions(probs, basis)
        )
        imb[a:b] = probs @ imb_diag
    return EigenstateDiagnostics(
        participation=pr,
        site_entropy=ent,
        entropy_mean=ent.mean(axis=1),
        imbalance=imb,
        page=page_value(basis.n_bosons, basis.n_sites),
        participation_goe=goe_participation_reference(dim),
    )


def write_eigenstate_csv(path, eigenvalues, diag: EigenstateDiagnostics,
                         metadata: dict | None = None) -> None:
    """Per-state CSV: index, energy, normalized energy, PR, site entropies,
    entropy average, imbalance."""
    from .spectrum import normalized_energies

    eps = normalized_energies(eigenvalues)
    m = diag.site_entropy.shape[1]
    site_cols = ",".join(f"s_site_{i + 1}" for i in range(m))
    with open(path, "w") as fh:
        for key, val in (metadata or {}).items():
            fh.write(f"# {key}={val}\n")
        fh.write(f"index,energy,normalized_energy,pr,{site_cols},s_avg,imbalance\n")
        for i in range(len(eigenvalues)):
            sites = ",".join(repr(float(x)) for x in diag.site_entropy[i])
            fh.write(
                f"{i},{float(eigenvalues[i])!r},{float(eps[i])!r},"
                f"{float(diag.participation[i])!r},{sites},"
                f"{float(diag.entropy_mean[i])!r},{float(diag.imbalance[i])!r}\n"
            )
