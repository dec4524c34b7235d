"""Consistency scan of (eta, lambda) against measured ground-state splittings."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hamiltonian import ModelParams
from .effective import calibrate_a
from .spectra import _map, g_factors, gs_splitting


@dataclass(frozen=True)
class ExperimentalTargets:
    """Measured ground-doublet splitting and g-factors with their tolerances.

    ``g_perp_max`` is an upper bound on the perpendicular g-factor of the
    lowest doublet; ``b0`` is the field (T) at which splittings are evaluated.
    """

    delta_gs_hz: float
    delta_gs_tol_hz: float
    g_par: float
    g_par_tol: float
    g_perp_max: float
    b0: float = 0.1

    def __post_init__(self):
        if self.delta_gs_tol_hz <= 0 or self.g_par_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.b0 <= 0:
            raise ValueError("b0 must be positive")


@dataclass(frozen=True)
class GridSpec:
    eta_min: float
    eta_max: float
    eta_step: float
    lambda_min_mev: float
    lambda_max_mev: float
    lambda_step_mev: float

    @staticmethod
    def _axis(lo, hi, step):
        if step <= 0 or hi < lo:
            raise ValueError(f"empty grid axis [{lo}, {hi}] step {step}")
        n = int(np.floor((hi - lo) / step + 1e-9)) + 1
        return lo + step * np.arange(n)

    def etas(self) -> np.ndarray:
        return self._axis(self.eta_min, self.eta_max, self.eta_step)

    def lambdas(self) -> np.ndarray:
        return self._axis(self.lambda_min_mev, self.lambda_max_mev, self.lambda_step_mev)


@dataclass
class ScanGrid:
    """Per-cell observables and match flags, arrays shaped (n_eta, n_lambda)."""

    k: float
    etas: np.ndarray
    lambdas_mev: np.ndarray
    delta_gs_hz: np.ndarray
    g_par: np.ndarray
    g_perp: np.ndarray
    match_dgs: np.ndarray
    match_gpar: np.ndarray
    match_gperp: np.ndarray

    @property
    def match_all(self) -> np.ndarray:
        return self.match_dgs & self.match_gpar & self.match_gperp

    def contains(self, eta: float, lambda_mev: float) -> bool:
        i = int(np.argmin(np.abs(self.etas - eta)))
        j = int(np.argmin(np.abs(self.lambdas_mev - lambda_mev)))
        return bool(self.match_all[i, j])

    def centroid(self) -> tuple[float, float] | None:
        """Mean (eta, lambda_meV) of the consistent cells, or None when there are none."""
        ii, jj = np.nonzero(self.match_all)
        if len(ii) == 0:
            return None
        return float(self.etas[ii].mean()), float(self.lambdas_mev[jj].mean())


def evaluate_cell(p: ModelParams, b0: float) -> tuple[float, float, float]:
    """(Delta_GS in Hz, g_par, g_perp) of the lowest doublet for one parameter set.

    g-factors are NaN when the two doublets cannot be told apart at ``b0``
    (e.g. without spin-orbit coupling).
    """
    try:
        (g_par, g_perp), _ = g_factors(p, b0)
    except RuntimeError:
        g_par = g_perp = float("nan")
    return gs_splitting(p), g_par, g_perp


def classify_cells(dgs, gpar, gperp, targets: ExperimentalTargets):
    dgs, gpar, gperp = map(np.asarray, (dgs, gpar, gperp))
    return (
        np.abs(dgs - targets.delta_gs_hz) <= targets.delta_gs_tol_hz,
        np.abs(gpar - targets.g_par) <= targets.g_par_tol,
        gperp <= targets.g_perp_max,
    )


def scan(p_base: ModelParams, targets: ExperimentalTargets, grid: GridSpec, threads: int = 1) -> ScanGrid:
    """Evaluate every (eta, lambda) cell at fixed ``p_base.k``; hyperfine is ignored."""
    etas, lams = grid.etas(), grid.lambdas()
    base = p_base.with_(nuclear_spin=0.0, include_hf=False)
    cells = [(e, l) for e in etas for l in lams]

    def run(cell):
        return evaluate_cell(base.with_(eta=cell[0], lambda_mev=cell[1]), targets.b0)

    out = np.array(_map(run, cells, threads)).reshape(len(etas), len(lams), 3)
    m_dgs, m_gpar, m_gperp = classify_cells(out[..., 0], out[..., 1], out[..., 2], targets)
    return ScanGrid(p_base.k, etas, lams, out[..., 0], out[..., 1], out[..., 2], m_dgs, m_gpar, m_gperp)


@dataclass(frozen=True)
class KSummary:
    k: float
    n_consistent: int
    centroid: tuple | None

    @property
    def nonempty(self) -> bool:
        return self.n_consistent > 0


def scan_k_range(p_base, targets, grid: GridSpec, k_values, threads: int = 1):
    """Run :func:`scan` for each k; returns (list of ScanGrid, list of KSummary)."""
    grids, summaries = [], []
    for k in k_values:
        g = scan(p_base.with_(k=float(k)), targets, grid, threads)
        grids.append(g)
        summaries.append(KSummary(float(k), int(g.match_all.sum()), g.centroid()))
    return grids, summaries
