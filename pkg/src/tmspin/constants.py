"""Physical constants (CODATA, via scipy) expressed in frequency units."""

from scipy.constants import physical_constants as _pc

#: 1 eV in Hz
EV_HZ = _pc["electron volt-hertz relationship"][0]
#: 1 meV in Hz
MEV_HZ = 1e-3 * EV_HZ
#: mu_B / h in Hz/T
MU_B_HZ_PER_T = _pc["Bohr magneton in Hz/T"][0]
#: mu_N / h in Hz/T
MU_N_HZ_PER_T = _pc["nuclear magneton in MHz/T"][0] * 1e6
#: free-electron g-factor (positive convention)
G_E = abs(_pc["electron g factor"][0])
