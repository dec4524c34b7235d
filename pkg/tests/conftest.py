import numpy as np
import pytest

from tmspin.hamiltonian import ModelParams

# 51V: I = 7/2 in nature; the model is exercised with I = 5/2 throughout to keep 24-state manifolds
G_N_V51 = 1.4711


@pytest.fixture(scope="session")
def fitted():
    """Reported fitted point with hyperfine calibrated so that a_perp(Gamma4) = 332 MHz."""
    return ModelParams(
        delta_ev=1.0, eta=-0.4, delta_a1_mev=10.0, k=0.3, lambda_mev=15.0, a_hf_hz=474.694e6, g_n=G_N_V51
    )


@pytest.fixture(scope="session")
def fitted_no_hf(fitted):
    return fitted.with_(include_hf=False)


def random_hermitian(rng, n, scale=1.0):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (a + a.conj().T) / 2


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
