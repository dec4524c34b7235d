"""Hermitian diagonalisation, degeneracy clusters and Kramers-doublet labels."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .angular import c3_rotation, time_reversal_unitary

GAMMA4 = "Gamma4"
GAMMA56 = "Gamma56"


class NotHermitianError(ValueError):
    pass


class ClassificationError(ValueError):
    pass


@dataclass(frozen=True)
class EigenSystem:
    """Ascending eigenvalues (Hz), eigenvectors as columns, optional clusters and labels."""

    values: np.ndarray
    vectors: np.ndarray
    clusters: tuple = ()
    labels: tuple = ()

    def __len__(self):
        return len(self.values)

    def cluster_of(self, index: int) -> range:
        for c in self.clusters:
            if index in c:
                return c
        return range(index, index + 1)


def _fix_gauge(vectors: np.ndarray) -> np.ndarray:
    # largest-magnitude component made real positive; ties go to the lowest index
    mags = np.abs(vectors)
    peak = mags.max(axis=0)
    idx = np.argmax(mags >= peak * (1 - 1e-9), axis=0)
    comp = vectors[idx, np.arange(vectors.shape[1])]
    return vectors * (np.abs(comp) / comp)[None, :]


def eig_hermitian(h: np.ndarray, sectors=None, herm_tol: float = 1e-12, block_tol: float = 1e-13) -> EigenSystem:
    """Full spectral decomposition of a complex Hermitian matrix.

    Parameters
    ----------
    h : ndarray
        Square complex matrix, Hermitian to ``herm_tol`` relative to its largest entry.
    sectors : array of int, optional
        Symmetry label of each basis state (e.g. :meth:`Basis.sectors`). When
        the couplings between differently labelled states are below
        ``block_tol`` relative, the sectors are diagonalised separately so
        eigenvectors carry exact symmetry labels; otherwise the labels are
        ignored.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise NotHermitianError(f"expected a square matrix, got shape {h.shape}")
    scale = np.abs(h).max() or 1.0
    asym = np.abs(h - h.conj().T).max()
    if asym > herm_tol * scale:
        raise NotHermitianError(f"matrix is not Hermitian: max |H - H^+| = {asym:.3e} (scale {scale:.3e})")
    h = (h + h.conj().T) / 2
    n = h.shape[0]

    blocks = [np.arange(n)]
    if sectors is not None:
        sectors = np.asarray(sectors)
        cross = sectors[:, None] != sectors[None, :]
        if not cross.any() or np.abs(h[cross]).max() <= block_tol * scale:
            blocks = [np.flatnonzero(sectors == s) for s in np.unique(sectors)]

    values = np.empty(n)
    vectors = np.zeros((n, n), dtype=complex)
    col = 0
    for idx in blocks:
        w, v = np.linalg.eigh(h[np.ix_(idx, idx)])
        values[col : col + len(idx)] = w
        vectors[idx, col : col + len(idx)] = v
        col += len(idx)
    order = np.argsort(values, kind="stable")
    values, vectors = values[order], _fix_gauge(vectors[:, order])

    resid = np.linalg.norm(h @ vectors - vectors * values, axis=0).max()
    if resid > 1e-12 * max(np.linalg.norm(h), 1e-300) + 1e-300:
        raise np.linalg.LinAlgError(f"eigensolver residual {resid:.3e} exceeds bound")
    return EigenSystem(values, vectors)


def cluster_degenerate(es: EigenSystem, tol_hz: float = 1e3) -> EigenSystem:
    """Group contiguous eigenvalues whose neighbours are within ``tol_hz``."""
    if tol_hz <= 0:
        raise ValueError("tol_hz must be positive")
    gaps = np.diff(es.values) > tol_hz
    starts = np.concatenate([[0], np.flatnonzero(gaps) + 1])
    stops = np.concatenate([starts[1:], [len(es.values)]])
    clusters = tuple(range(a, b) for a, b in zip(starts, stops))
    return replace(es, clusters=clusters, labels=(None,) * len(clusters))


def c3_phases(es: EigenSystem, cluster, dims) -> np.ndarray:
    """Eigenvalues of the electronic C3 rotation restricted to a cluster."""
    v = es.vectors[:, list(cluster)]
    u = v.conj().T @ c3_rotation(dims, total=False) @ v
    return np.linalg.eigvals(u)


def classify_doublet(es: EigenSystem, cluster, dims, tol: float = 1e-6) -> str:
    """Label a Kramers doublet Gamma4 (C3 phases exp(-+i pi/3)) or Gamma56 (both -1)."""
    cluster = list(cluster)
    if len(cluster) != 2:
        raise ClassificationError(f"expected a two-dimensional cluster, got {len(cluster)} states")
    ph = c3_phases(es, cluster, dims)
    ang = np.sort(np.angle(ph))
    if np.allclose(np.abs(ph), 1, atol=tol):
        if np.allclose(ang, [-np.pi / 3, np.pi / 3], atol=tol):
            return GAMMA4
        if np.allclose(np.abs(ang), np.pi, atol=tol):
            return GAMMA56
    raise ClassificationError(f"C3 phases {ph} match neither Gamma4 nor Gamma56")


def label_clusters(es: EigenSystem, dims) -> EigenSystem:
    """Attach irrep labels to every two-fold cluster (``None`` elsewhere)."""
    labels = []
    for c in es.clusters:
        try:
            labels.append(classify_doublet(es, c, dims) if len(c) == 2 else None)
        except ClassificationError:
            labels.append(None)
    return replace(es, labels=tuple(labels))


def kramers_partner_check(es: EigenSystem, cluster, dims, tol: float = 1e-10) -> tuple[bool, float]:
    """Check that the time-reversed image of a cluster member stays in the cluster.

    Returns ``(ok, residual)`` with residual the norm of the part of
    ``Theta |v>`` outside the cluster span, ``v`` the first member.
    """
    v = es.vectors[:, list(cluster)]
    image = time_reversal_unitary(dims) @ v[:, 0].conj()
    outside = image - v @ (v.conj().T @ image)
    resid = float(np.linalg.norm(outside))
    return resid <= tol, resid


__all__ = [
    "GAMMA4",
    "GAMMA56",
    "ClassificationError",
    "EigenSystem",
    "NotHermitianError",
    "c3_phases",
    "classify_doublet",
    "cluster_degenerate",
    "eig_hermitian",
    "kramers_partner_check",
    "label_clusters",
]
