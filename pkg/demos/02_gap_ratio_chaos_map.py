"""Chart the chaos-to-regularity landscape with the mean gap ratio.

The mean ratio of consecutive level spacings needs no unfolding: it sits
near 0.535 for chaotic (GOE-like) spectra and near 0.386 for regular
(Poisson-like) ones.  A coarse (U, D) grid at N = M = 6 already shows the
chaotic valley at U ~ D ~ J, the fast suppression of chaos with tilt, and
its robustness against interaction.

Run:  python demos/02_gap_ratio_chaos_map.py      (about a minute)
"""

import numpy as np

from tiltedbh import (
    FockBasis,
    ModelParams,
    R_GOE,
    build,
    chaos_distance,
    diagonalize,
    mean_gap_ratio,
)

nm = 6
basis = FockBasis(nm, nm)
u_values = [0.1, 0.5, 1.0, 2.0, 4.0]
d_values = [0.01, 0.5, 1.0, 2.0, 4.0]

print(f"N = M = {nm}, dim = {basis.dim}; entries are |<r> - {R_GOE}| "
      "(small = chaotic)\n")
print("        " + "".join(f"  U={u:<5g}" for u in u_values))
for d in d_values:
    cells = []
    for u in u_values:
        spec = diagonalize(build(basis, ModelParams(u=u, d=d)),
                           compute_vectors=False)
        stats = mean_gap_ratio(spec.eigenvalues)
        cells.append(chaos_distance(stats))
    print(f"  D={d:<5g}" + "".join(f"  {c:7.3f}" for c in cells))

print("\nReading the map: the row at small D stays chaotic over a wide U")
print("range; moving down any column, chaos dies quickly once D dominates.")
print("The same map at production scale: tiltedbh chaos-map "
      "--config configs/chaos_map_8x8.json --out out/map")
