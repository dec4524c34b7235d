"""Crystal field, spin-orbit coupling and the two ground Kramers doublets.

Builds the single-electron model at the fitted point, prints the low-energy
spectrum, the irreps of the two lowest doublets, their g-factors and the
zero-field splitting between them.
"""

import numpy as np

from tmspin.eigen import cluster_degenerate, label_clusters
from tmspin.hamiltonian import ModelParams, h_crystal
from tmspin.spectra import g_factors, gs_splitting, solve

p = ModelParams(delta_ev=1.0, eta=-0.4, delta_a1_mev=10.0, k=0.3, lambda_mev=15.0, a_hf_hz=0.0, g_n=1.4711, nuclear_spin=0.0)

# orbital levels first: tetrahedral e / t2 split by Delta, then trigonal splitting
w = np.linalg.eigvalsh(h_crystal(p)) / p.delta_hz
print("crystal-field levels (units of Delta):", np.round(w, 4))

# spin-orbit coupling splits the lowest orbital doublet into two Kramers doublets
es = label_clusters(cluster_degenerate(solve(p), 1e3), p.basis.dims)
for c, lab in list(zip(es.clusters, es.labels))[:3]:
    e = es.values[list(c)].mean()
    print(f"  levels {list(c)}: {e / 1e12:9.4f} THz  {lab}")

print(f"Delta_GS = {gs_splitting(p) / 1e9:.1f} GHz")
for name, (gpar, gperp) in zip(("lowest", "second"), g_factors(p, 0.1, method="linear")):
    print(f"{name} doublet: g_par = {gpar:.4f}, g_perp = {gperp:.2e}")
