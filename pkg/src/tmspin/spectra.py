"""Field sweeps, drive matrix elements, Rabi frequencies and ground-state observables.

Rabi frequencies are ``|<f|V|i>|`` with V the full oscillating-amplitude
operator in Hz; no rotating-wave factor 1/2 is applied.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .angular import spherical_harmonics_l2
from .constants import MU_B_HZ_PER_T
from .eigen import EigenSystem, cluster_degenerate, eig_hermitian
from .hamiltonian import FieldConfig, ModelParams, assemble, drive_electric, drive_magnetic

AXES = {"x": 0, "y": 1, "z": 2}
DRIVES = ("Bpar", "Bperp", "Ez")


class DegenerateLevelError(ValueError):
    """Raised by :func:`rabi` when a level is degenerate; use :func:`block_rabi`."""


def _field_vector(axis: str, b: float) -> tuple:
    vec = [0.0, 0.0, 0.0]
    vec[AXES[axis]] = float(b)
    return tuple(vec)


def _map(fn, items, threads: int):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def solve(p: ModelParams, f: FieldConfig | None = None) -> EigenSystem:
    """Diagonalise ``assemble(p, f)``, using symmetry sectors whenever the field allows.

    With hyperfine the label is the total C3 phase; without it the electronic
    C3 phase and m_I are conserved separately.
    """
    b = p.basis
    if p.include_hf and p.nuclear_spin > 0:
        sectors = b.sectors(total=True)
    else:
        sectors = 6 * np.rint(2 * (b.m_i + p.nuclear_spin)).astype(int) + b.sectors(total=False)
    return eig_hermitian(assemble(p, f), sectors=sectors)


def ground_levels(p: ModelParams) -> int:
    """Number of states in the lowest Kramers doublet times the nucleus."""
    return 2 * p.basis.dims[2]


@dataclass
class SweepResult:
    axis: str
    b_values: np.ndarray
    energies: np.ndarray
    params: ModelParams
    vectors: list | None = None

    @property
    def n_levels(self) -> int:
        return self.energies.shape[1]


def track_levels(vectors: list) -> np.ndarray:
    """Reorder levels along a sweep by maximal overlap between neighbouring points.

    Returns an integer array ``perm`` so that ``energies[k, perm[k]]`` follows
    one adiabatic level per column.
    """
    perm = [np.arange(vectors[0].shape[1])]
    for prev, cur in zip(vectors[:-1], vectors[1:]):
        prev_sorted = prev[:, perm[-1]]
        overlap = np.abs(prev_sorted.conj().T @ cur) ** 2
        _, cols = linear_sum_assignment(-overlap)
        perm.append(cols)
    return np.array(perm)


def sweep_field(
    p: ModelParams,
    axis: str = "z",
    b_range=(0.0, 0.1),
    n_points: int = 51,
    include_hf: bool | None = None,
    n_levels: int | None = None,
    threads: int = 1,
    track: bool = False,
    keep_vectors: bool = False,
) -> SweepResult:
    """Eigenvalues of the full Hamiltonian for a static field swept along one axis.

    ``n_levels`` defaults to the ground manifold ``2(2I+1)``; pass
    ``n_levels=-1`` for all levels.
    """
    if axis not in AXES:
        raise ValueError(f"axis must be one of {sorted(AXES)}")
    if n_points < 2:
        raise ValueError("n_points must be at least 2")
    b_lo, b_hi = map(float, b_range)
    if not (np.isfinite(b_lo) and np.isfinite(b_hi)) or b_hi <= b_lo:
        raise ValueError(f"invalid field range {b_range!r}")
    if include_hf is not None:
        p = p.with_(include_hf=include_hf)
    n = ground_levels(p) if n_levels is None else (p.basis.dim if n_levels == -1 else n_levels)
    bs = np.linspace(b_lo, b_hi, n_points)

    def point(b):
        es = solve(p, FieldConfig(b_static=_field_vector(axis, b)))
        return es.values[:n], es.vectors[:, :n]

    results = _map(point, bs, threads)
    energies = np.array([r[0] for r in results])
    vecs = [r[1] for r in results]
    if track:
        perm = track_levels(vecs)
        energies = np.take_along_axis(energies, perm, axis=1)
        vecs = [v[:, q] for v, q in zip(vecs, perm)]
    return SweepResult(axis, bs, energies, p, vecs if keep_vectors else None)


def rabi(es: EigenSystem, v: np.ndarray, i: int, f: int, tol_hz: float = 1e3) -> float:
    """``|<f|V|i>|`` between two non-degenerate levels (Hz)."""
    if i == f:
        raise ValueError("initial and final level coincide")
    w = es.values
    for k in (i, f):
        near = np.abs(w - w[k]) < tol_hz
        if near.sum() > 1:
            raise DegenerateLevelError(f"level {k} is degenerate within {tol_hz:g} Hz; use block_rabi")
    return float(abs(es.vectors[:, f].conj() @ v @ es.vectors[:, i]))


def block_rabi(es: EigenSystem, v: np.ndarray, cluster_i, cluster_f) -> float:
    """Largest singular value of the block of V between two clusters (gauge invariant)."""
    vi = es.vectors[:, list(cluster_i)]
    vf = es.vectors[:, list(cluster_f)]
    block = vf.conj().T @ v @ vi
    return float(np.linalg.svd(block, compute_uv=False)[0])


def drive_operator(p: ModelParams, f: FieldConfig, drive: str) -> np.ndarray:
    """Drive operator for a tag: Bpar (|b_drive| along z), Bperp (along x) or Ez."""
    b1 = float(np.linalg.norm(f.b_drive))
    if drive == "Bpar":
        return drive_magnetic(p, FieldConfig(b_drive=(0.0, 0.0, b1)))
    if drive == "Bperp":
        return drive_magnetic(p, FieldConfig(b_drive=(b1, 0.0, 0.0)))
    if drive == "Ez":
        return drive_electric(p, f)
    raise ValueError(f"drive must be one of {DRIVES}")


@dataclass(frozen=True)
class Transition:
    i: int
    f: int
    freq_hz: float
    rabi_hz: float
    drive: str
    b_t: float


@dataclass
class TransitionTable:
    rows: list = field(default_factory=list)

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def max_rabi(self) -> float:
        return max((r.rabi_hz for r in self.rows), default=0.0)


def transitions(
    p: ModelParams,
    f: FieldConfig,
    drive: str,
    n_levels: int | None = None,
    floor_hz: float | None = 1.0,
    cluster_tol_hz: float = 1e3,
    b_label: float | None = None,
) -> TransitionTable:
    """All transitions among the lowest ``n_levels`` states at one static field.

    Degenerate levels are merged into clusters; the index of a cluster is its
    first level and its Rabi frequency the block singular value. Rows are
    sorted by frequency; those below ``floor_hz`` are dropped (``None`` keeps all).
    """
    n = ground_levels(p) if n_levels is None else n_levels
    es = solve(p, f)
    v = drive_operator(p, f, drive)
    sub = EigenSystem(es.values[:n], es.vectors[:, :n])
    sub = cluster_degenerate(sub, cluster_tol_hz)
    centroids = [sub.values[list(c)].mean() for c in sub.clusters]
    b = float(np.linalg.norm(f.b_static)) if b_label is None else b_label
    rows = []
    for a, ca in enumerate(sub.clusters):
        for c in range(a + 1, len(sub.clusters)):
            cb = sub.clusters[c]
            r = block_rabi(sub, v, ca, cb)
            if floor_hz is not None and r < floor_hz:
                continue
            rows.append(Transition(ca[0], cb[0], abs(centroids[c] - centroids[a]), r, drive, b))
    rows.sort(key=lambda t: (t.freq_hz, t.i, t.f))
    return TransitionTable(rows)


def transition_sweep(
    p: ModelParams,
    f: FieldConfig,
    drive: str,
    b_values,
    axis: str = "z",
    n_levels: int | None = None,
    floor_hz: float | None = 1.0,
    threads: int = 1,
) -> TransitionTable:
    """Transition tables over a static-field sweep, concatenated in field order."""

    def point(b):
        fb = FieldConfig(b_static=_field_vector(axis, b), b_drive=f.b_drive, delta_eta=f.delta_eta)
        return transitions(p, fb, drive, n_levels=n_levels, floor_hz=floor_hz, b_label=float(b))

    tables = _map(point, list(b_values), threads)
    return TransitionTable([row for t in tables for row in t.rows])


def matrix_map(
    p: ModelParams,
    b1: float = 100e-6,
    b0: float = 0.02,
    include_hf: bool = True,
    n_states: int = 24,
) -> np.ndarray:
    """Drive matrix-element magnitudes (Hz) over the lowest ``n_states`` eigenstates.

    Diagonal and upper triangle: drive along the C3 axis; lower triangle:
    drive perpendicular to it. The static field ``b0`` is along the axis.
    """
    q = p.with_(include_hf=include_hf)
    es = solve(q, FieldConfig(b_static=(0.0, 0.0, b0)))
    vecs = es.vectors[:, :n_states]
    par = np.abs(vecs.conj().T @ drive_magnetic(q, FieldConfig(b_drive=(0.0, 0.0, b1))) @ vecs)
    perp = np.abs(vecs.conj().T @ drive_magnetic(q, FieldConfig(b_drive=(b1, 0.0, 0.0))) @ vecs)
    return np.triu(par) + np.tril(perp, -1)


def _electronic(p: ModelParams) -> ModelParams:
    return p.with_(nuclear_spin=0.0, include_hf=False)


def _doublet_splittings(p: ModelParams, axis: str, b: float) -> tuple[float, float]:
    q = _electronic(p)
    w = solve(q, FieldConfig(b_static=_field_vector(axis, b))).values
    s1, s2 = w[1] - w[0], w[3] - w[2]
    if max(s1, s2) >= 0.5 * (w[2] - w[1]):
        raise RuntimeError(f"cannot separate the two ground doublets at {b:g} T along {axis}")
    return s1, s2


def g_factors(p: ModelParams, b0: float = 0.1, method: str = "splitting") -> list[tuple[float, float]]:
    """(g_par, g_perp) of the two lowest Kramers doublets, hyperfine off.

    ``method="splitting"`` returns ``h df / (mu_B b0)`` at the given field.
    ``method="linear"`` removes the cubic term of the splitting by combining
    fields b0 and b0/2, giving the zero-field linear coefficient.
    """
    out = {}
    for axis in ("z", "x"):
        s = np.array(_doublet_splittings(p, axis, b0))
        if method == "linear":
            s_half = np.array(_doublet_splittings(p, axis, b0 / 2))
            s = (8 * s_half - s) / 3
        elif method != "splitting":
            raise ValueError("method must be 'splitting' or 'linear'")
        out[axis] = np.abs(s) / (MU_B_HZ_PER_T * b0)
    return [(float(out["z"][d]), float(out["x"][d])) for d in range(2)]


def gs_splitting(p: ModelParams) -> float:
    """Zero-field gap between the centroids of the two lowest Kramers doublets (Hz)."""
    w = solve(_electronic(p)).values
    return float((w[2] + w[3] - w[0] - w[1]) / 2)


def orbital_amplitudes(vector: np.ndarray, dims) -> np.ndarray:
    """Normalised orbital part of a state, taken from its dominant electron-spin component."""
    psi = np.asarray(vector).reshape(dims)
    weights = (np.abs(psi) ** 2).sum(axis=(0, 2))
    spin = int(np.argmax(weights))
    nuc = int(np.argmax((np.abs(psi[:, spin, :]) ** 2).sum(axis=0)))
    c = psi[:, spin, nuc]
    return c / np.linalg.norm(c)


@dataclass
class WavefunctionGrid:
    theta: np.ndarray
    phi: np.ndarray
    density: np.ndarray
    phase: np.ndarray


def wavefunction_grid(coeffs, n_theta: int = 61, n_phi: int = 120) -> WavefunctionGrid:
    """Angular wavefunction ``sum_m c_m Y_2m`` on a regular (theta, phi) grid.

    theta spans [0, pi] inclusive, phi spans [0, 2 pi) exclusive. Arrays are
    shaped (n_theta, n_phi).
    """
    c = np.asarray(coeffs, dtype=complex)
    if c.shape != (5,):
        raise ValueError("need five orbital amplitudes for m = -2..2")
    norm = np.linalg.norm(c)
    if not np.isclose(norm, 1.0, atol=1e-8):
        raise ValueError(f"coefficients must be normalised (norm {norm:.6g})")
    theta = np.linspace(0.0, np.pi, n_theta)
    phi = np.arange(n_phi) * (2 * np.pi / n_phi)
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    psi = np.tensordot(c, spherical_harmonics_l2(tt, pp), axes=1)
    return WavefunctionGrid(tt, pp, np.abs(psi) ** 2, np.angle(psi))


def azimuthal_winding(grid: WavefunctionGrid) -> int:
    """Net phase winding (in units of 2 pi) around phi on the densest theta ring."""
    row = int(np.argmax(grid.density.mean(axis=1)))
    ph = np.append(grid.phase[row], grid.phase[row, 0])
    steps = np.angle(np.exp(1j * np.diff(ph)))
    return int(np.rint(steps.sum() / (2 * np.pi)))
