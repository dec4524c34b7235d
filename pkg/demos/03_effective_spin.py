"""Effective spin-1/2 description of each ground doublet.

Projects hyperfine and Zeeman operators onto each doublet, fits the
effective forms, calibrates the hyperfine scale so that a_perp = 332 MHz, and
compares the effective 12-level spectrum with the full model.
"""

import numpy as np

from tmspin.effective import calibrate_a, compare_full, extract, spectral_fingerprint
from tmspin.hamiltonian import ModelParams

p = ModelParams(delta_ev=1.0, eta=-0.4, delta_a1_mev=10.0, k=0.3, lambda_mev=15.0, a_hf_hz=1e8, g_n=1.4711)

a = calibrate_a(p, 332e6)
p = p.with_(a_hf_hz=a)
print(f"calibrated A = {a / 1e6:.3f} MHz")

for d in (0, 1):
    ep = extract(p, d)
    fp = spectral_fingerprint(ep, p.nuclear_spin, p.g_n)
    print(f"{ep.irrep:8s} a_par={ep.a_par / 1e6:8.2f} MHz  a_perp={ep.a_perp / 1e6:7.2f} MHz  "
          f"g_par={ep.g_par:.4f}  g_perp={ep.g_perp:.2e}  linear pair: {fp.present}")

ep = extract(p, 0)
print(f"a_par/a_perp = {ep.a_par / ep.a_perp:.4f}")
if ep.alt_residual is not None:
    print(f"residual of the S+I+ form {ep.fit_residual:.2e} Hz, of the S+I- form {ep.alt_residual / 1e6:.1f} MHz")

bs = np.linspace(0, 0.1, 11)
full, eff, rms = compare_full(p, ep, 0, bs)
print(f"\neffective vs full, 0-100 mT: RMS {rms / 1e6:.3f} MHz over a {np.ptp(full[0]) / 1e6:.0f} MHz span")
print(" B (mT)  lowest three levels, full | effective (MHz)")
for b, f, e in zip(bs[::2], full[::2], eff[::2]):
    print(f"{b * 1e3:6.0f}  " + " ".join(f"{x / 1e6:8.1f}" for x in f[:3]) + "  | " + " ".join(f"{x / 1e6:8.1f}" for x in e[:3]))
