import warnings

import numpy as np
import pytest
from numpy.testing import assert_allclose

from tmspin.angular import c3_rotation, kron_embed, l2_operators, spin_operators, time_reversal_unitary
from tmspin.constants import MU_B_HZ_PER_T
from tmspin.hamiltonian import (
    FieldConfig,
    ModelParams,
    assemble,
    drive_electric,
    drive_magnetic,
    h_crystal,
    h_hyperfine,
    h_soc,
    h_zeeman,
    zeeman_moment_operators,
)

from conftest import G_N_V51


def params(**kw):
    base = dict(delta_ev=1.0, eta=-0.4, delta_a1_mev=10.0, k=0.3, lambda_mev=15.0, a_hf_hz=474.694e6, g_n=G_N_V51)
    base.update(kw)
    return ModelParams(**base)


def rel_hermitian_error(h):
    return np.abs(h - h.conj().T).max() / np.abs(h).max()


def test_params_validation():
    with pytest.raises(ValueError):
        params(delta_ev=0)
    with pytest.raises(ValueError):
        params(k=0)
    with pytest.raises(ValueError):
        params(k=1.2)
    with pytest.raises(ValueError):
        params(nuclear_spin=0.3)
    with pytest.raises(TypeError):
        ModelParams(delta_ev=1.0, eta=0.0, delta_a1_mev=0.0, k=0.3, lambda_mev=15.0, a_hf_hz=0.0)  # g_n required


def test_field_config_validation():
    with pytest.raises(ValueError):
        FieldConfig(b_static=(0, 0))
    with pytest.raises(ValueError):
        FieldConfig(b_static=(0, np.inf, 0))
    with pytest.raises(ValueError):
        FieldConfig(delta_eta=np.nan)
    with pytest.warns(UserWarning):
        FieldConfig(delta_eta=0.3).check_against(params(eta=-0.4))


def test_tetrahedral_limit():
    p = params(eta=0.0, delta_a1_mev=0.0)
    w = np.linalg.eigvalsh(h_crystal(p))
    assert np.abs(w - p.delta_hz * np.array([0, 0, 1, 1, 1])).max() <= 1e-12 * p.delta_hz


def test_tetrahedral_e_doublet_contents():
    # in the trigonal frame the e doublet has no m=0 weight (it sits in m = +-1, +-2)
    p = params(eta=0.0, delta_a1_mev=0.0)
    w, v = np.linalg.eigh(h_crystal(p))
    e = v[:, :2]
    assert_allclose(np.linalg.norm(e[2]), 0, atol=1e-12)


@pytest.mark.parametrize("eta", [-0.8, -0.4, 0.0, 0.3])
def test_crystal_field_c3_symmetric(eta):
    p = params(eta=eta)
    h = np.kron(h_crystal(p), np.eye(2))
    c3 = c3_rotation((5, 2, 1))
    assert np.abs(c3 @ h - h @ c3).max() <= 1e-10 * p.delta_hz


@pytest.mark.parametrize("eta", [-0.4, 0.25])
def test_trigonal_part(eta):
    # trigonal part: d(+-1) at eta*Delta, d0 at max(0, eta*Delta) + Delta_A1, d(+-2) at 0
    p = params(eta=eta)
    dh = h_crystal(p) - h_crystal(p, eta=0.0)
    e = eta * p.delta_hz
    ref = np.diag([0, e, max(0.0, e), e, 0])
    assert np.abs(dh - ref).max() <= 1e-12 * p.delta_hz


def test_hermiticity_all_terms(fitted):
    f = FieldConfig(b_static=(0.01, -0.02, 0.05), b_drive=(1e-4, 2e-4, 3e-4), delta_eta=0.001)
    for h in (h_crystal(fitted), h_soc(fitted), h_hyperfine(fitted), h_zeeman(fitted, f), assemble(fitted, f)):
        assert rel_hermitian_error(h) <= 1e-14
    assert rel_hermitian_error(drive_magnetic(fitted, f)) <= 1e-14
    assert rel_hermitian_error(drive_electric(fitted, f)) == 0


def test_soc_spectrum():
    # lambda L.S on l=2: j=5/2 at +lambda, j=3/2 at -3/2 lambda
    p = params(k=1.0, lambda_mev=10.0)
    w = np.linalg.eigvalsh(h_soc(p)) / p.lambda_hz
    assert_allclose(w, [-1.5] * 4 + [1.0] * 6, atol=1e-12)


def test_hyperfine_commutes_with_total_jz(fitted):
    dims = fitted.basis.dims
    jz = sum(kron_embed(op[2], s, dims) for op, s in [(l2_operators(), "orbital"), (spin_operators(0.5), "spin"),
                                                     (spin_operators(2.5), "nuclear")])
    h = h_hyperfine(fitted)
    # the dipolar part mixes m but conserves F_z = L_z + S_z + I_z
    assert np.abs(jz @ h - h @ jz).max() <= 1e-12 * np.abs(h).max()


def test_hamiltonian_time_reversal_even(fitted):
    u = time_reversal_unitary(fitted.basis.dims)
    h = assemble(fitted)
    assert np.abs(u @ h.conj() @ u.conj().T - h).max() <= 1e-12 * np.abs(h).max()
    z = h_zeeman(fitted, FieldConfig(b_static=(0.1, 0.2, 0.3)))
    assert np.abs(u @ z.conj() @ u.conj().T + z).max() <= 1e-12 * np.abs(z).max()


def test_spinless_nucleus():
    p = params(nuclear_spin=0.0)
    with pytest.warns(UserWarning):
        h = h_hyperfine(p)
    assert h.shape == (10, 10) and not h.any()
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert assemble(p).shape == (10, 10)


def test_assemble_is_linear():
    p0 = params(lambda_mev=0.0, a_hf_hz=0.0)
    h0 = assemble(p0)
    for change in (dict(lambda_mev=15.0), dict(a_hf_hz=3e8)):
        h1 = assemble(p0.with_(**change))
        h2 = assemble(p0.with_(**{k: 2 * v for k, v in change.items()}))
        assert np.abs((h2 - h0) - 2 * (h1 - h0)).max() <= 1e-15 * np.abs(h0).max()
    for a in range(3):
        b = [0.0, 0.0, 0.0]
        b[a] = 0.05
        h1 = assemble(p0, FieldConfig(b_static=b))
        h2 = assemble(p0, FieldConfig(b_static=[2 * x for x in b]))
        assert np.abs((h2 - h0) - 2 * (h1 - h0)).max() <= 1e-15 * np.abs(h0).max()


def test_zeeman_free_spin():
    # g_e mu_B B S_z: +-1/2 spin states split by g_e mu_B B (sign: moment opposite to S)
    p = params(nuclear_spin=0.0)
    m = zeeman_moment_operators(p, nuclear=False)[2]
    sz = kron_embed(spin_operators(0.5)[2], "spin", p.basis.dims)
    lz = kron_embed(l2_operators()[2], "orbital", p.basis.dims)
    assert_allclose(m, -MU_B_HZ_PER_T * (p.k * lz + p.g_e * sz))
    assert_allclose(p.g_e, 2.00231930436, rtol=1e-10)


def test_drive_matches_static_zeeman(fitted):
    f = FieldConfig(b_drive=(1e-4, 0, 0))
    assert_allclose(drive_magnetic(fitted, f), h_zeeman(fitted, FieldConfig(b_static=(1e-4, 0, 0))))


def test_electric_drive(fitted):
    with pytest.raises(ValueError):
        drive_electric(fitted, FieldConfig())
    f = FieldConfig(delta_eta=1e-3)
    v = drive_electric(fitted, f)
    # equals the change of the full Hamiltonian under eta -> eta + delta_eta
    ref = assemble(fitted.with_(eta=fitted.eta + 1e-3)) - assemble(fitted)
    assert np.abs(v - ref).max() <= 1e-6 * np.abs(v).max()
    # diagonal in m_l, with d(+-1) shifted by delta_eta*Delta
    d = np.diag(v).real.reshape(5, 2, 6)[:, 0, 0]
    assert_allclose(d, [0, 1e-3 * fitted.delta_hz, 0, 1e-3 * fitted.delta_hz, 0], atol=1e-3)
