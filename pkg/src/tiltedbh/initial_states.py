"""Ensembles of initial Fock product states for the quench protocols.

Two protocols are implemented:

* occupation-capped random states whose diagonal energies fall in a window
  around the spectral center of a fixed *reference* Hamiltonian (the same
  state set is reused while the quench parameters are swept);
* maximally imbalanced states, all bosons on the right half of the chain.

The mean energy of a Fock state equals its diagonal matrix element since
the hopping expectation vanishes in occupation eigenstates, so selection
never requires diagonalization.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import hamiltonian
from .basis import FockBasis
from .diagnostics import left_half_site_count
from .hamiltonian import HamiltonianMatrix, ModelParams
from .rng import make_rng

__all__ = [
    "EnergyWindowProtocol",
    "ImbalanceProtocol",
    "StateEnsemble",
    "InsufficientCandidatesError",
    "spectral_moments",
    "sample_energy_window",
    "maximally_imbalanced_states",
    "write_state_manifest",
]


class InsufficientCandidatesError(ValueError):
    pass


@dataclass(frozen=True)
class EnergyWindowProtocol:
    """Random capped Fock states inside a central energy window.

    The window is [E_c - w * dE, E_c + w * dE] with (E_c, dE) the mean and
    standard deviation of the reference spectrum and w the halfwidth.
    """

    sample_count: int = 200
    reference_params: ModelParams = field(
        default_factory=lambda: ModelParams(u=0.5, d=0.8)
    )
    window_halfwidth: float = 0.4
    occupation_cap: int = 3
    rng_seed: int = 0

    def __post_init__(self):
        if self.sample_count < 1:
            raise ValueError("sample_count must be at least 1")
        if self.window_halfwidth <= 0:
            raise ValueError("window_halfwidth must be positive")
        if self.occupation_cap < 1:
            raise ValueError("occupation_cap must be at least 1")


@dataclass(frozen=True)
class ImbalanceProtocol:
    """Capped Fock states with every boson on the right half (imbalance -1)."""

    occupation_cap: int = 3
    max_states: int | None = None
    rng_seed: int = 0

    def __post_init__(self):
        if self.occupation_cap < 1:
            raise ValueError("occupation_cap must be at least 1")
        if self.max_states is not None and self.max_states < 1:
            raise ValueError("max_states must be at least 1 when set")


@dataclass
class StateEnsemble:
    """A selected set of Fock states, with everything needed to reproduce it."""

    indices: np.ndarray        # canonical basis indices, ascending
    occupations: np.ndarray    # (n_states, M)
    diagonal_energies: np.ndarray | None
    metadata: dict

    def __len__(self) -> int:
        return self.indices.size

    def to_manifest(self) -> dict:
        out = dict(self.metadata)
        out["n_states"] = int(self.indices.size)
        out["basis_indices"] = [int(i) for i in self.indices]
        out["occupations"] = [list(map(int, row)) for row in self.occupations]
        if self.diagonal_energies is not None:
            out["diagonal_energies"] = [float(e) for e in self.diagonal_energies]
        return out


def spectral_moments(h: HamiltonianMatrix) -> tuple[float, float]:
    """Spectral mean and standard deviation from traces, no diagonalization.

    E_c = tr(H)/dim and dE = sqrt(tr(H^2)/dim - E_c^2).
    """
    dim = h.dim
    center = h.trace() / dim
    second = h.trace_of_square() / dim
    return center, float(np.sqrt(second - center ** 2))


def sample_energy_window(basis: FockBasis,
                         protocol: EnergyWindowProtocol) -> StateEnsemble:
    """Seeded sample, without replacement, of capped states in the window."""
    h_ref = hamiltonian.build(basis, protocol.reference_params)
    e_center, e_sd = spectral_moments(h_ref)
    half = protocol.window_halfwidth * e_sd
    capped = (basis.states <= protocol.occupation_cap).all(axis=1)
    inside = np.abs(h_ref.diagonal - e_center) <= half
    candidates = np.nonzero(capped & inside)[0]
    if candidates.size < protocol.sample_count:
        raise InsufficientCandidatesError(
            f"window holds {candidates.size} candidate states, "
            f"need {protocol.sample_count}"
        )
    if candidates.size == protocol.sample_count:
        chosen = candidates
    else:
        rng = make_rng(protocol.rng_seed)
        pick = rng.choice(candidates.size, size=protocol.sample_count,
                          replace=False, shuffle=False)
        chosen = np.sort(candidates[pick])
    occ = basis.states[chosen]
    energies = h_ref.diagonal[chosen]
    meta = {
        "protocol": "energy_window",
        "sampling": "uniform_without_replacement",
        "rng": "philox",
        "rng_seed": int(protocol.rng_seed),
        "n_bosons": basis.n_bosons,
        "n_sites": basis.n_sites,
        "occupation_cap": int(protocol.occupation_cap),
        "window_halfwidth": float(protocol.window_halfwidth),
        "window_bounds": [float(e_center - half), float(e_center + half)],
        "spectral_center": float(e_center),
        "spectral_sd": float(e_sd),
        "reference_u": protocol.reference_params.u,
        "reference_d": protocol.reference_params.d,
        "reference_j": protocol.reference_params.j,
        "n_candidates": int(candidates.size),
    }
    return StateEnsemble(chosen, occ, energies, meta)


def maximally_imbalanced_states(basis: FockBasis,
                                protocol: ImbalanceProtocol) -> StateEnsemble:
    """All capped states with an empty left half; optionally subsampled."""
    left = left_half_site_count(basis.n_sites)
    ok = (basis.states[:, :left] == 0).all(axis=1)
    ok &= (basis.states <= protocol.occupation_cap).all(axis=1)
    chosen = np.nonzero(ok)[0]
    n_qualifying = int(chosen.size)
    if protocol.max_states is not None and chosen.size > protocol.max_states:
        rng = make_rng(protocol.rng_seed)
        pick = rng.choice(chosen.size, size=protocol.max_states,
                          replace=False, shuffle=False)
        chosen = np.sort(chosen[pick])
    meta = {
        "protocol": "maximal_imbalance",
        "target_imbalance": -1.0,
        "rng": "philox",
        "rng_seed": int(protocol.rng_seed),
        "n_bosons": basis.n_bosons,
        "n_sites": basis.n_sites,
        "occupation_cap": int(protocol.occupation_cap),
        "left_sites": left,
        "n_qualifying": n_qualifying,
        "max_states": protocol.max_states,
    }
    return StateEnsemble(chosen, basis.states[chosen], None, meta)


def write_state_manifest(path, ensemble: StateEnsemble,
                         extra: dict | None = None) -> None:
    manifest = ensemble.to_manifest()
    if extra:
        manifest.update(extra)
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
