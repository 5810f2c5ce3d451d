"""
Shared fixtures for the transport lab test suite.
"""
import numpy as np
import pytest

from itl_transport_lab.core.models.enums import ModelKind, Reality
from itl_transport_lab.core.models.params import BbmParams, CutoffSpec, GaussianSpec, NlsParams
from itl_transport_lab.settings import get_settings
from itl_transport_lab.spectral.field import TorusField, hermitian_from_nonnegative


@pytest.fixture(autouse=True)
def isolated_settings(monkeypatch, tmp_path):
    """Fresh runtime settings per test, artifacts under the test's tmp dir."""
    for name in ("ITL_LAB_THREADS", "ITL_LAB_LOG_LEVEL", "ITL_LAB_OUTPUT_DIR"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setenv("ITL_LAB_OUTPUT_DIR", str(tmp_path / "runs"))
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_real_field(rng, n_max: int, scale: float = 1.0, decay: float = 1.0) -> TorusField:
    """Real field with coefficients of size scale / (1 + |n|)^decay."""
    n = np.arange(n_max + 1)
    positive = (rng.standard_normal(n_max + 1) + 1j * rng.standard_normal(n_max + 1)) * scale
    positive = positive / (1.0 + n) ** decay
    return TorusField(hermitian_from_nonnegative(positive), Reality.REAL)


def random_complex_field(rng, n_max: int, scale: float = 1.0, decay: float = 1.0) -> TorusField:
    n = np.abs(np.arange(-n_max, n_max + 1))
    coeffs = (rng.standard_normal(2 * n_max + 1) + 1j * rng.standard_normal(2 * n_max + 1)) * scale
    return TorusField(coeffs / (1.0 + n) ** decay, Reality.COMPLEX)


@pytest.fixture
def make_real_field(rng):
    return lambda n_max, scale=1.0, decay=1.0: random_real_field(rng, n_max, scale, decay)


@pytest.fixture
def make_complex_field(rng):
    return lambda n_max, scale=1.0, decay=1.0: random_complex_field(rng, n_max, scale, decay)


@pytest.fixture
def real_field(rng):
    return random_real_field(rng, 8, scale=0.3, decay=1.5)


@pytest.fixture
def complex_field(rng):
    return random_complex_field(rng, 6, scale=0.3, decay=1.5)


@pytest.fixture
def bbm_params():
    return BbmParams(beta=1.5, N=6, dt=1e-3)


@pytest.fixture
def nls_params():
    return NlsParams(N=4, dt=1e-3)


@pytest.fixture
def bbm_gaussian():
    return GaussianSpec(model=ModelKind.BBM, s=2.0, beta=1.5, n_samp=16)


@pytest.fixture
def bbm_cutoff():
    return CutoffSpec(model=ModelKind.BBM, r=3.0, R=3.0, N=4, s=2.0)


@pytest.fixture
def nls_gaussian():
    return GaussianSpec(model=ModelKind.NLS, k=2, n_samp=8)


@pytest.fixture
def nls_cutoff():
    return CutoffSpec(model=ModelKind.NLS, r=2.0, R=10.0, N=4, k=2)
