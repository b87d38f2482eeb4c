"""Walk through the building blocks: the number-conserving Fock basis,
combinatorial ranking, and the sparse tilted-chain Hamiltonian.

Run from the repository root:  python demos/01_basis_and_hamiltonian.py
"""

import numpy as np

from tiltedbh import FockBasis, ModelParams, build, diagonal_energy, dimension

print("Hilbert-space dimensions grow combinatorially, C(M+N-1, N):")
for nm in (4, 6, 8, 10, 12):
    print(f"  N = M = {nm:2d}: dim = {dimension(nm, nm):>9,}")

print("\nThe canonical basis is ordered by decreasing occupation vectors.")
basis = FockBasis(3, 3)
for i, state in enumerate(basis.states):
    print(f"  index {i}: |{','.join(map(str, state))}>")

print("\nRanking is closed-form, no table scan:")
probe = [1, 0, 2]
print(f"  rank(|1,0,2>) = {basis.rank(probe)}  "
      f"unrank(5) = {basis.unrank(5).tolist()}")

params = ModelParams(u=0.5, d=0.5)
h = build(basis, params)
print(f"\nHamiltonian at u={params.u}, d={params.d} (j = 1 is the unit):")
print(f"  stored off-diagonal elements: {len(h.values)} "
      f"(bound {basis.dim * (basis.n_sites - 1)})")
print(f"  trace = {h.trace():.6f}")
print("  diagonal energies are interaction plus tilt ladder, e.g.")
for state in ([3, 0, 0], [1, 1, 1], [0, 0, 3]):
    print(f"    E_diag(|{','.join(map(str, state))}>) = "
          f"{diagonal_energy(state, params):.3f}")

dense = h.to_dense()
print(f"\n  symmetric: {np.array_equal(dense, dense.T)}")
print("  matrix in full:")
with np.printoptions(precision=3, suppress=True, linewidth=120):
    print(dense)
