"""Shared test oracles, all independent of the library implementation paths
they are used to check."""

import numpy as np
import pytest


def compositions(n, m):
    """Recursive generator of all occupation tuples of n bosons on m sites."""
    if m == 1:
        yield (n,)
        return
    for k in range(n, -1, -1):
        for rest in compositions(n - k, m - 1):
            yield (k,) + rest


def brute_force_dense(states, u, d, j=1.0):
    """Dense Hamiltonian built by applying the operators state by state,
    with a dictionary lookup instead of combinatorial ranking."""
    states = [tuple(int(x) for x in row) for row in states]
    index = {s: i for i, s in enumerate(states)}
    dim = len(states)
    m = len(states[0])
    h = np.zeros((dim, dim))
    for i, s in enumerate(states):
        for site in range(m):
            n = s[site]
            h[i, i] += 0.5 * u * n * (n - 1) + d * (site + 1) * n
        for site in range(m - 1):
            if s[site] > 0:
                # b_{site+1}^dag b_site |s>
                t = list(s)
                amp = np.sqrt(t[site] * (t[site + 1] + 1))
                t[site] -= 1
                t[site + 1] += 1
                jdx = index[tuple(t)]
                h[jdx, i] += -j * amp
                h[i, jdx] += -j * amp
    return h


def dense_partial_trace_entropy(state, states, site, n_bosons):
    """Entropy of the one-site reduced density matrix built explicitly.

    Groups basis states by the occupations of all *other* sites, assembles
    the full (N+1) x (N+1) matrix and diagonalizes it.
    """
    state = np.asarray(state)
    groups = {}
    for k, occ in enumerate(states):
        rest = tuple(int(x) for i, x in enumerate(occ) if i != site)
        groups.setdefault(rest, []).append((int(occ[site]), k))
    rho = np.zeros((n_bosons + 1, n_bosons + 1), dtype=complex)
    for members in groups.values():
        for n_a, k_a in members:
            for n_b, k_b in members:
                rho[n_a, n_b] += state[k_a] * np.conj(state[k_b])
    evals = np.linalg.eigvalsh(rho)
    evals = evals[evals > 1e-14]
    return float(-(evals * np.log(evals)).sum())


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
