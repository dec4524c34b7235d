"""Magnetic and electric driving of the ground doublet with the central nucleus.

Without hyperfine coupling the parallel drive cannot flip the effective spin
and the perpendicular drive is weak (g_perp is small). With hyperfine the
parallel drive reaches MHz Rabi frequencies at low field. An electric drive,
modelled as a modulation of the trigonal splitting, also acts only through the
hyperfine mixing.
"""

import numpy as np

from tmspin.hamiltonian import FieldConfig, ModelParams
from tmspin.spectra import transitions

p = ModelParams(delta_ev=1.0, eta=-0.4, delta_a1_mev=10.0, k=0.3, lambda_mev=15.0, a_hf_hz=474.694e6, g_n=1.4711)
b1 = 100e-6  # drive amplitude, T
deta = 1e-3 / p.delta_ev  # delta_eta * Delta = 1 meV

print(" B0 (mT)   Bpar max (MHz)   Bperp max (kHz)   Ez max (kHz)")
for b0 in (0.0, 0.01, 0.02, 0.05, 0.1):
    f = FieldConfig(b_static=(0, 0, b0), b_drive=(0, 0, b1), delta_eta=deta)
    r = {d: transitions(p, f, d, n_levels=12).max_rabi() for d in ("Bpar", "Bperp", "Ez")}
    print(f"{b0 * 1e3:7.0f}   {r['Bpar'] / 1e6:14.3f}   {r['Bperp'] / 1e3:15.2f}   {r['Ez'] / 1e3:12.1f}")

# the strongest parallel-drive lines at 20 mT
f = FieldConfig(b_static=(0, 0, 0.02), b_drive=(0, 0, b1))
table = sorted(transitions(p, f, "Bpar", n_levels=12), key=lambda t: -t.rabi_hz)
print("\nstrongest Bpar lines at 20 mT:")
for t in table[:5]:
    print(f"  {t.i:2d} -> {t.f:2d}  {t.freq_hz / 1e6:9.2f} MHz  Rabi {t.rabi_hz / 1e6:.3f} MHz")

# switching the hyperfine off removes the hyperfine-enabled lines
q = p.with_(include_hf=False)
print("\nwithout hyperfine, max Bpar Rabi between the two electron states:",
      f"{max((t.rabi_hz for t in transitions(q, f, 'Bpar', n_levels=12, cluster_tol_hz=1e6)), default=0.0):.3g} Hz")
