"""Microscopic and effective spin models of a single d electron at a trigonal site."""

from .angular import Basis, EulerAngles
from .eigen import GAMMA4, GAMMA56, EigenSystem, eig_hermitian
from .effective import EffectiveParams, calibrate_a, effective_energies, extract, spectral_fingerprint
from .fitting import ExperimentalTargets, GridSpec, scan, scan_k_range
from .hamiltonian import FieldConfig, ModelParams, assemble
from .spectra import g_factors, gs_splitting, matrix_map, solve, sweep_field, transitions

__version__ = "0.1.0"
