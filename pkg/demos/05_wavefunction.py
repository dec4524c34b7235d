"""Angular shape and phase winding of the lowest state.

The orbital part of the ground state is dominated by m = +-1 components, so
its phase winds around the trigonal axis.
"""

import numpy as np

from tmspin.hamiltonian import ModelParams
from tmspin.spectra import azimuthal_winding, orbital_amplitudes, solve, wavefunction_grid

p = ModelParams(delta_ev=1.0, eta=-0.4, delta_a1_mev=10.0, k=0.3, lambda_mev=15.0, a_hf_hz=0.0, g_n=1.4711, nuclear_spin=0.0)
es = solve(p)
for s in (0, 1, 2):
    c = orbital_amplitudes(es.vectors[:, s], p.basis.dims)
    grid = wavefunction_grid(c)
    weights = np.abs(c) ** 2
    print(f"state {s}: |c_m|^2 for m=-2..2 = {np.round(weights, 3)}, winding {azimuthal_winding(grid)}")

# a pure d0 orbital has no winding
print("d0:", azimuthal_winding(wavefunction_grid([0, 0, 1, 0, 0])))
