import numpy as np
import pytest

from kclosed import GridField, GridSpec
from kclosed.corpus import gen_corpus


@pytest.fixture(scope="session")
def spec1():
    return GridSpec(1, 64)


@pytest.fixture(scope="session")
def spec2():
    return GridSpec(2, 32)


@pytest.fixture(scope="session")
def corpus64():
    return gen_corpus(GridSpec(2, 64), 6, seed=42)


def random_band_limited(spec, rng, band=None):
    """Mean-zero real field with Fourier support in ``0 < |k| <= band`` (default N/3)."""
    band = spec.points // 3 if band is None else band
    k = np.fft.fftfreq(spec.points, 1.0 / spec.points)
    kk = np.sqrt(sum(g**2 for g in np.meshgrid(*([k] * spec.dim), indexing="ij")))
    hat = (rng.standard_normal(spec.shape) + 1j * rng.standard_normal(spec.shape)) * ((kk > 0) & (kk <= band))
    f = np.fft.ifftn(hat).real
    return GridField(spec, f / np.abs(f).max())


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
