import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from tmspin.eigen import (
    GAMMA4,
    GAMMA56,
    ClassificationError,
    EigenSystem,
    NotHermitianError,
    classify_doublet,
    cluster_degenerate,
    eig_hermitian,
    kramers_partner_check,
    label_clusters,
)
from tmspin.hamiltonian import assemble
from tmspin.spectra import solve

from conftest import random_hermitian


def real_embedding_eigenvalues(h):
    # [[A, -B], [B, A]] is real symmetric with every eigenvalue of A + iB twice
    a, b = h.real, h.imag
    w = np.linalg.eigvalsh(np.block([[a, -b], [b, a]]))
    return w[::2]


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 24), seed=st.integers(0, 2**31 - 1), log_scale=st.floats(-3, 14))
def test_random_hermitian(n, seed, log_scale):
    h = random_hermitian(np.random.default_rng(seed), n, 10.0**log_scale)
    es = eig_hermitian(h)
    assert np.all(np.diff(es.values) >= 0)
    scale = np.linalg.norm(h)
    assert np.abs(es.values - real_embedding_eigenvalues(h)).max() <= 1e-11 * scale
    assert_allclose(es.vectors.conj().T @ es.vectors, np.eye(n), atol=1e-12)
    assert np.linalg.norm(h @ es.vectors - es.vectors * es.values) <= 1e-12 * scale * np.sqrt(n)


def test_gauge_fix_and_determinism():
    h = random_hermitian(np.random.default_rng(3), 12)
    a, b = eig_hermitian(h), eig_hermitian(h.copy())
    assert np.array_equal(a.values, b.values) and np.array_equal(a.vectors, b.vectors)
    for k in range(12):
        v = a.vectors[:, k]
        i = np.argmax(np.abs(v))
        assert abs(v[i].imag) <= 1e-15 and v[i].real > 0


def test_rejects_bad_input():
    with pytest.raises(NotHermitianError):
        eig_hermitian(np.array([[0, 1], [0, 0]]))
    with pytest.raises(NotHermitianError):
        eig_hermitian(np.zeros((2, 3)))


def test_sector_blocking_gives_exact_zeros():
    rng = np.random.default_rng(5)
    blocks = [random_hermitian(rng, 3), random_hermitian(rng, 2)]
    h = np.zeros((5, 5), complex)
    idx = [np.array([0, 2, 4]), np.array([1, 3])]
    for b, i in zip(blocks, idx):
        h[np.ix_(i, i)] = b
    es = eig_hermitian(h, sectors=np.array([0, 1, 0, 1, 0]))
    for k in range(5):
        v = es.vectors[:, k]
        support = np.flatnonzero(v)
        assert set(support) <= set(idx[0]) or set(support) <= set(idx[1])
    # a coupled matrix falls back to the unblocked solve
    h[0, 1] = h[1, 0] = 0.5
    es = eig_hermitian(h, sectors=np.array([0, 1, 0, 1, 0]))
    assert_allclose(es.values, np.linalg.eigvalsh(h), atol=1e-13)


def test_cluster_degenerate():
    es = EigenSystem(np.array([0.0, 10.0, 5e3, 5e3 + 1, 9e3]), np.eye(5))
    c = cluster_degenerate(es, tol_hz=100)
    assert c.clusters == (range(0, 2), range(2, 4), range(4, 5))
    assert c.cluster_of(3) == range(2, 4)
    with pytest.raises(ValueError):
        cluster_degenerate(es, 0)


def test_kramers_doublets_and_labels(fitted_no_hf):
    es = cluster_degenerate(solve(fitted_no_hf), 1e3)
    dims = fitted_no_hf.basis.dims
    n_nuc = dims[2]
    # every level of the 60-state problem is 2(2I+1)-fold degenerate without hyperfine
    assert all(len(c) == 2 * n_nuc for c in es.clusters)
    q = fitted_no_hf.with_(nuclear_spin=0.0)
    el = label_clusters(cluster_degenerate(solve(q), 1e3), q.basis.dims)
    assert el.labels[:2] == (GAMMA4, GAMMA56)
    for c in el.clusters:
        ok, resid = kramers_partner_check(el, c, q.basis.dims)
        assert ok, resid
    with pytest.raises(ClassificationError):
        classify_doublet(el, range(0, 3), q.basis.dims)


def test_residual_bound_on_model(fitted):
    h = assemble(fitted)
    es = eig_hermitian(h, sectors=fitted.basis.sectors())
    assert np.linalg.norm(h @ es.vectors - es.vectors * es.values, axis=0).max() <= 1e-12 * np.linalg.norm(h)
