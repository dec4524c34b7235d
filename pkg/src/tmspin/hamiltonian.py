"""Microscopic Hamiltonian of one d electron at a trigonal transition-metal site.

The total Hamiltonian is crystal field + spin-orbit + hyperfine + Zeeman,
assembled on the orbital x spin x nuclear product space of
:class:`tmspin.angular.Basis`. Every operator returned here is in Hz.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .angular import (
    Basis,
    EulerAngles,
    dipolar_tensor,
    kron_embed,
    l2_operators,
    spin_operators,
    wigner_d_l2,
)
from .constants import EV_HZ, G_E, MEV_HZ, MU_B_HZ_PER_T, MU_N_HZ_PER_T

# Cubic frame (z between two bonds) -> trigonal frame (z along the C3 bond).
CUBIC_TO_TRIGONAL = EulerAngles(np.pi / 4, np.arccos(1 / np.sqrt(3)), 0.0)


@dataclass(frozen=True)
class ModelParams:
    """Static parameters of the defect model.

    Parameters
    ----------
    delta_ev : float
        Tetrahedral splitting between the e doublet and the t2 triplet (eV).
    eta : float
        Trigonal splitting as a fraction of ``delta_ev``.
    delta_a1_mev : float
        Offset of the a1 singlet above the upper trigonal doublet (meV).
    k : float
        Orbital reduction factor, in (0, 1].
    lambda_mev : float
        Spin-orbit reduced matrix element (meV).
    a_hf_hz : float
        Hyperfine scale A (Hz).
    g_n : float
        Nuclear g-factor. No default on purpose.
    nuclear_spin : float
        Spin of the central nucleus; 0 for spinless isotopes.
    g_e : float
        Electron g-factor.
    include_hf : bool
        Whether :func:`assemble` adds the hyperfine term.
    """

    delta_ev: float
    eta: float
    delta_a1_mev: float
    k: float
    lambda_mev: float
    a_hf_hz: float
    g_n: float
    nuclear_spin: float = 2.5
    g_e: float = G_E
    include_hf: bool = True

    def __post_init__(self):
        if not self.delta_ev > 0:
            raise ValueError("delta_ev must be positive")
        if not 0 < self.k <= 1:
            raise ValueError("k must lie in (0, 1]")
        Basis(self.nuclear_spin)  # validates the spin value

    @property
    def delta_hz(self) -> float:
        return self.delta_ev * EV_HZ

    @property
    def delta_a1_hz(self) -> float:
        return self.delta_a1_mev * MEV_HZ

    @property
    def lambda_hz(self) -> float:
        return self.lambda_mev * MEV_HZ

    @property
    def basis(self) -> Basis:
        return Basis(self.nuclear_spin)

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class FieldConfig:
    """Static field, drive amplitude (both Tesla) and electric drive as a change of eta."""

    b_static: tuple = (0.0, 0.0, 0.0)
    b_drive: tuple = (0.0, 0.0, 0.0)
    delta_eta: float = 0.0

    def __post_init__(self):
        for name in ("b_static", "b_drive"):
            vec = tuple(float(x) for x in getattr(self, name))
            if len(vec) != 3 or not np.all(np.isfinite(vec)):
                raise ValueError(f"{name} must be a finite 3-vector")
            object.__setattr__(self, name, vec)
        if not np.isfinite(self.delta_eta):
            raise ValueError("delta_eta must be finite")

    def check_against(self, p: ModelParams) -> None:
        if abs(self.delta_eta) > 0.5 * abs(p.eta):
            warnings.warn(
                f"|delta_eta|={abs(self.delta_eta):g} is not small compared with |eta|={abs(p.eta):g}",
                stacklevel=2,
            )


def _embed_many(ops, slot, dims):
    return [kron_embed(op, slot, dims) for op in ops]


def _trigonal_levels(p: ModelParams, eta: float) -> np.ndarray:
    e_trig = eta * p.delta_hz
    return np.array([0.0, e_trig, max(0.0, e_trig) + p.delta_a1_hz, e_trig, 0.0])


def h_crystal(p: ModelParams, eta: float | None = None) -> np.ndarray:
    """5x5 crystal-field Hamiltonian (Hz) in the trigonal m basis.

    Tetrahedral part: e doublet at 0 and t2 triplet at Delta in the cubic
    frame, rotated onto the trigonal axis. Trigonal part: diagonal with
    d(+-2) at 0, d(+-1) at eta*Delta and d0 at max(0, eta*Delta) + Delta_A1.
    """
    eta = p.eta if eta is None else eta
    delta = p.delta_hz
    # cubic frame: e = {d0, (d2 + d-2)/sqrt2}
    e_states = np.zeros((5, 2), dtype=complex)
    e_states[2, 0] = 1.0
    e_states[[0, 4], 1] = 1 / np.sqrt(2)
    h_tet = delta * (np.eye(5) - e_states @ e_states.conj().T)
    D = wigner_d_l2(CUBIC_TO_TRIGONAL)
    h_tet = D.conj().T @ h_tet @ D
    h = h_tet + np.diag(_trigonal_levels(p, eta))
    return (h + h.conj().T) / 2


def h_soc(p: ModelParams) -> np.ndarray:
    """``lambda k L.S`` on orbital x spin (10x10, Hz)."""
    L = l2_operators()
    S = spin_operators(0.5)
    out = sum(np.kron(L[i], S[i]) for i in range(3))
    return p.lambda_hz * p.k * out


def h_hyperfine(p: ModelParams) -> np.ndarray:
    """``A (k L.I + 3 (S.n)(I.n) - S.I)`` on the full product space (Hz).

    The orbital average of ``3 n_i n_j - delta_ij`` is taken inside the l=2
    manifold via :func:`tmspin.angular.dipolar_tensor`. A spinless nucleus
    gives a zero operator and a warning.
    """
    basis = p.basis
    dims = basis.dims
    if p.nuclear_spin == 0:
        warnings.warn("nuclear spin is zero; hyperfine term vanishes", stacklevel=2)
        return np.zeros((basis.dim, basis.dim), dtype=complex)
    L = l2_operators()
    S = spin_operators(0.5)
    I = spin_operators(p.nuclear_spin)
    T = dipolar_tensor()
    eye2 = np.eye(2)
    out = np.zeros((basis.dim, basis.dim), dtype=complex)
    for i in range(3):
        out += p.k * np.kron(np.kron(L[i], eye2), I[i])
        for j in range(3):
            out += np.kron(np.kron(T[i, j], S[i]), I[j])
    return p.a_hf_hz * out


def zeeman_moment_operators(p: ModelParams, nuclear: bool = True):
    """Operators M_a with ``H_Zee = sum_a B_a M_a`` (Hz/T), a = x, y, z."""
    dims = p.basis.dims
    L = _embed_many(l2_operators(), "orbital", dims)
    S = _embed_many(spin_operators(0.5), "spin", dims)
    out = [-MU_B_HZ_PER_T * (p.k * L[a] + p.g_e * S[a]) for a in range(3)]
    if nuclear and dims[2] > 1:
        I = _embed_many(spin_operators(p.nuclear_spin), "nuclear", dims)
        out = [out[a] - p.g_n * MU_N_HZ_PER_T * I[a] for a in range(3)]
    return out


def h_zeeman(p: ModelParams, f: FieldConfig, which: str = "static") -> np.ndarray:
    """Electron (orbital + spin) and nuclear Zeeman operator for the static or drive field (Hz)."""
    if which not in ("static", "drive"):
        raise ValueError("which must be 'static' or 'drive'")
    b = f.b_static if which == "static" else f.b_drive
    moments = zeeman_moment_operators(p)
    return sum(b[a] * moments[a] for a in range(3))


def assemble(p: ModelParams, f: FieldConfig | None = None) -> np.ndarray:
    """Total static Hamiltonian (Hz) on the product space."""
    f = FieldConfig() if f is None else f
    dims = p.basis.dims
    h = np.kron(np.kron(h_crystal(p), np.eye(2)), np.eye(dims[2]))
    h = h + np.kron(h_soc(p), np.eye(dims[2]))
    if p.include_hf and p.nuclear_spin > 0:
        h = h + h_hyperfine(p)
    if any(f.b_static):
        h = h + h_zeeman(p, f, "static")
    return h


def drive_magnetic(p: ModelParams, f: FieldConfig) -> np.ndarray:
    """Oscillating-field operator: the Zeeman operator at ``f.b_drive``."""
    return h_zeeman(p, f, "drive")


def drive_electric(p: ModelParams, f: FieldConfig) -> np.ndarray:
    """Electric drive modelled as the change of the crystal field under eta -> eta + delta_eta.

    Raises ValueError for ``delta_eta == 0``.
    """
    if f.delta_eta == 0:
        raise ValueError("electric drive needs a non-zero delta_eta")
    f.check_against(p)
    dims = p.basis.dims
    # the tetrahedral part is eta-independent and cancels exactly
    dh = np.diag(_trigonal_levels(p, p.eta + f.delta_eta) - _trigonal_levels(p, p.eta))
    return np.kron(np.kron(dh, np.eye(2)), np.eye(dims[2]))


__all__ = [
    "CUBIC_TO_TRIGONAL",
    "FieldConfig",
    "ModelParams",
    "assemble",
    "drive_electric",
    "drive_magnetic",
    "h_crystal",
    "h_hyperfine",
    "h_soc",
    "h_zeeman",
    "zeeman_moment_operators",
]
