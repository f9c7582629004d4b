import warnings

import numpy as np
import pytest

from kclosed import GridField, GridSpec, TLadder, build_psi, dt_poisson, masked_synthesis, poisson_extend, riesz
from kclosed.spectral import (
    MultiplierTable,
    bump,
    bump_transform,
    conjugate_system,
    grad_poisson,
    kernel_symbols,
    poisson_eval,
    reproduction_defect,
    reproduction_weights,
    square_function_constant,
)

from conftest import random_band_limited
from oracles import KERNEL_SCALE


def cos_mode(spec, k):
    k = np.asarray(k, float)
    return GridField.from_function(spec, lambda *x: np.cos(2 * np.pi * sum(ki * xi for ki, xi in zip(k, x)) / spec.period))


def sin_mode(spec, k):
    k = np.asarray(k, float)
    return GridField.from_function(spec, lambda *x: np.sin(2 * np.pi * sum(ki * xi for ki, xi in zip(k, x)) / spec.period))


@pytest.mark.parametrize("k", [(1, 0), (0, 3), (2, 5), (-4, 1)])
def test_riesz_single_mode(k):
    s = GridSpec(2, 32, 2.0)
    f = cos_mode(s, k)
    norm = np.hypot(*k)
    for ax in range(2):
        assert np.allclose(riesz(f, ax).samples, k[ax] / norm * sin_mode(s, k).samples, atol=1e-12)


def test_riesz_1d_is_hilbert():
    s = GridSpec(1, 64)
    assert np.allclose(riesz(cos_mode(s, [3]), 0).samples, sin_mode(s, [3]).samples, atol=1e-13)
    assert np.allclose(riesz(sin_mode(s, [3]), 0).samples, -cos_mode(s, [3]).samples, atol=1e-13)


def test_riesz_square_sum(rng):
    s = GridSpec(2, 32)
    f = random_band_limited(s, rng)
    total = sum(riesz(riesz(f, i), i).samples for i in range(2))
    assert np.allclose(total, -f.samples, atol=1e-12)
    # Nyquist rows are dropped so the output stays real and the transform is an isometry on the band
    assert np.isclose(np.sum(riesz(f, 0).samples ** 2) + np.sum(riesz(f, 1).samples ** 2), np.sum(f.samples**2))
    with pytest.raises(ValueError):
        riesz(f, 2)


def test_multiplier_grid_mismatch():
    with pytest.raises(ValueError):
        MultiplierTable.laplacian(GridSpec(1, 16)).apply(GridField.zeros(GridSpec(1, 32)))


def test_poisson_single_mode():
    s = GridSpec(2, 32)
    k = (2, 3)
    lad = TLadder.geometric(0.001, 0.5, 16)
    u = poisson_extend(cos_mode(s, k), lad)
    du = dt_poisson(cos_mode(s, k), lad)
    r = 2 * np.pi * np.hypot(*k)
    for m, t in enumerate(lad.levels):
        assert np.allclose(u.values[m], np.exp(-r * t) * cos_mode(s, k).samples, atol=1e-13)
        assert np.allclose(du.values[m], -r * np.exp(-r * t) * cos_mode(s, k).samples, atol=1e-11)


def test_grad_and_conjugate_1d():
    # u + i u_1 is holomorphic in x + i t: du/dt = -du_1/dx, du/dx = du_1/dt
    s = GridSpec(1, 64)
    lad = TLadder.geometric(0.001, 0.5, 16)
    f = cos_mode(s, [2]) + sin_mode(s, [5]) * 0.5
    dt_u, dx_u = grad_poisson(f, lad)
    dt_u1, dx_u1 = grad_poisson(riesz(f, 0), lad)
    assert np.allclose(dt_u.values, -dx_u1.values, atol=1e-10)
    assert np.allclose(dx_u.values, dt_u1.values, atol=1e-10)
    u, u1 = conjugate_system(f, lad)
    assert np.allclose(u1.values, poisson_extend(riesz(f, 0), lad).values)


def test_poisson_mean_warning():
    s = GridSpec(1, 16)
    with pytest.warns(RuntimeWarning):
        poisson_extend(GridField.constant(s, 1.0), TLadder.geometric(0.01, 1, 32))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        poisson_extend(cos_mode(s, [1]), TLadder.geometric(0.01, 1, 32))


def test_poisson_eval_matches_grid(rng):
    s = GridSpec(2, 32)
    f = random_band_limited(s, rng)
    lad = TLadder.geometric(0.002, 0.5, 40)
    u, du = poisson_extend(f, lad), dt_poisson(f, lad)
    idx = rng.integers(0, 32, (20, 2))
    m = rng.integers(0, 40, 20)
    pts = idx * s.h
    assert np.allclose(poisson_eval(f, pts, lad.levels[m]), u.values[m, idx[:, 0], idx[:, 1]], atol=1e-12)
    assert np.allclose(poisson_eval(f, pts, lad.levels[m], derivative=True), du.values[m, idx[:, 0], idx[:, 1]], atol=1e-9)


def test_bump_transform_oracle():
    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.dps = 30
    phi = lambda r: mpmath.exp(-1 / (1 - 4 * r**2)) if r < 0.5 else 0
    for s in (0.0, 1.7, 12.5):
        ref1 = 2 * mpmath.quad(lambda x: phi(x) * mpmath.cos(s * x), [0, 0.5])
        ref2 = 2 * mpmath.pi * mpmath.quad(lambda r: phi(r) * r * mpmath.besselj(0, s * r), [0, 0.5])
        assert bump_transform(np.array(s), 1) == pytest.approx(float(ref1), rel=1e-10, abs=1e-15)
        assert bump_transform(np.array(s), 2) == pytest.approx(float(ref2), rel=1e-10, abs=1e-15)
    assert bump(np.array([0.5, 0.7])).tolist() == [0.0, 0.0]


def test_kernel_constants_oracle():
    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.dps = 25
    phi = lambda r: mpmath.exp(-1 / (1 - 4 * r**2))
    i1 = 2 * mpmath.quad(lambda x: phi(x) * (1 / (1 + x**2) - 1 / (1 + x**2 / 4)), [0, 0.5])
    i2 = 2 * mpmath.pi * mpmath.quad(lambda r: phi(r) * r * (1 / mpmath.sqrt(1 + r**2) - 1 / mpmath.sqrt(1 + r**2 / 4)), [0, 0.5])
    assert float(-1 / i1) == pytest.approx(KERNEL_SCALE[1], rel=1e-15)
    assert float(-1 / i2) == pytest.approx(KERNEL_SCALE[2], rel=1e-15)


@pytest.mark.parametrize("dim", [1, 2])
def test_kernel_normalization(dim):
    k = build_psi(dim)
    assert k.scale == pytest.approx(KERNEL_SCALE[dim], rel=1e-9)
    assert k.calderon_integral() == pytest.approx(1.0, rel=1e-10)
    assert k(np.array([0.0]))[0] == 0.0
    assert k(np.array([1e5]))[0] == 0.0
    assert build_psi(dim) is k


@pytest.mark.parametrize("spec", [GridSpec(1, 256), GridSpec(2, 64)])
def test_reproduction(spec, rng):
    lad = TLadder.default(spec)
    assert reproduction_defect(spec, lad) <= 1e-4
    f = random_band_limited(spec, rng)
    full = masked_synthesis(dt_poisson(f, lad), np.ones((lad.count, *spec.shape), bool))
    assert np.linalg.norm(full.samples - f.samples) <= 1e-4 * np.linalg.norm(f.samples)
    assert masked_synthesis(dt_poisson(f, lad), np.zeros((lad.count, *spec.shape), bool)).samples.max() == 0


def test_synthesis_is_linear_in_region(rng):
    s = GridSpec(2, 32)
    lad = TLadder.default(s)
    du = dt_poisson(random_band_limited(s, rng), lad)
    a = rng.random((lad.count, *s.shape)) < 0.3
    b = ~a
    total = masked_synthesis(du, a) + masked_synthesis(du, b)
    assert np.allclose(total.samples, masked_synthesis(du, a | b).samples, atol=1e-12)
    with pytest.raises(ValueError):
        masked_synthesis(du, a[:-1])


def test_reproduction_weights_low_band_only():
    s = GridSpec(1, 64)
    lad = TLadder.geometric(s.h, s.period / 4, 24)  # too short a ladder for the top modes
    w = reproduction_weights(s, lad)
    assert abs(1 - w[1]) > 1e-3 or abs(1 - w[21]) > 1e-3


def test_square_function_constant_positive():
    s = GridSpec(2, 32)
    lad = TLadder.default(s)
    c = square_function_constant(s, lad)
    assert np.isfinite(c) and c > 0
    sym = kernel_symbols(s, lad)
    assert sym.shape == (lad.count, 32, 32) and not sym.flags.writeable
