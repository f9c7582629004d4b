import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kclosed import ConeParams, GridField, GridSpec, TLadder, hl_max, hp_quasinorm, nontangential_max, poisson_extend
from kclosed.maximal import box_mean, dyadic_radii, sliding_max_deque, window_max

from conftest import random_band_limited


def brute_ring_max(values, w):
    n = len(values)
    return [max(values[(i + d) % n] for d in range(-w, w + 1)) for i in range(n)]


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-50, 50), min_size=1, max_size=40), st.integers(0, 25))
def test_deque_matches_brute_force(values, w):
    assert sliding_max_deque(values, w) == brute_ring_max(values, w)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**31), st.integers(0, 20))
def test_window_max_matches_deque(seed, w):
    a = np.random.default_rng(seed).standard_normal((16, 32))
    got = window_max(a, w, axes=[1])
    for i in range(16):
        assert np.array_equal(got[i], sliding_max_deque(list(a[i]), w))


def test_window_max_2d_box():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((16, 16))
    got = window_max(a, 2)
    for i, j in [(0, 0), (5, 15), (15, 7)]:
        rows = [(i + d) % 16 for d in range(-2, 3)]
        cols = [(j + d) % 16 for d in range(-2, 3)]
        assert got[i, j] == a[np.ix_(rows, cols)].max()


def brute_nontangential(u, aperture):
    spec, lad = u.spec, u.ladder
    n = spec.points
    idx = np.arange(n)
    out = np.zeros(spec.shape)
    absu = np.abs(u.values)
    for m, t in enumerate(lad.levels):
        w = int(np.floor(aperture * t / spec.h * (1 + 1e-12)))
        for x in np.ndindex(*spec.shape):
            d = [np.minimum((idx - xi) % n, (xi - idx) % n) for xi in x]
            if spec.dim == 1:
                near = d[0] <= w
            else:
                near = np.maximum(d[0][:, None], d[1][None, :]) <= w
            out[x] = max(out[x], absu[m][near].max())
    return out


@pytest.mark.parametrize("spec,aperture", [(GridSpec(1, 32), 1.0), (GridSpec(2, 16), 1.0), (GridSpec(2, 16), 3.0)])
def test_nontangential_matches_brute_force(spec, aperture, rng):
    lad = TLadder.geometric(spec.h / 4, spec.period, 24)
    u = poisson_extend(random_band_limited(spec, rng), lad)
    got = nontangential_max(u, ConeParams(aperture)).samples
    assert np.array_equal(got, brute_nontangential(u, aperture))


def test_nontangential_dominates_boundary_level(rng):
    s = GridSpec(2, 32)
    lad = TLadder.default(s)
    f = random_band_limited(s, rng)
    u = poisson_extend(f, lad)
    nf = nontangential_max(u).samples
    assert np.all(nf >= np.abs(u.values[0]))
    # the lowest level sits at h/32: |u(., t_0) - f| <= (1 - exp(-t_0 |xi|_max)) sum |fhat|
    decay = 1 - np.exp(-lad.t_min * 2 * np.pi * np.sqrt(2) * 32 / 3)
    bound = decay * np.abs(np.fft.fft2(f.samples)).sum() / 32**2
    assert np.all(nf >= np.abs(f.samples) - bound)
    # wide cones saturate to the global max of each level
    wide = nontangential_max(u, ConeParams(1e6)).samples
    assert np.allclose(wide, np.abs(u.values).max())


def test_cone_validation():
    with pytest.raises(ValueError):
        ConeParams(-1)


def test_hl_max():
    s = GridSpec(2, 32)
    assert dyadic_radii(32) == [1, 2, 4, 8]
    c = GridField.constant(s, 2.5)
    assert np.allclose(hl_max(c).samples, 2.5)
    delta = np.zeros(s.shape)
    delta[3, 4] = 1
    m = hl_max(GridField(s, delta)).samples
    assert m[3, 4] == pytest.approx(1 / 9)
    a = np.random.default_rng(0).random((32, 32))
    assert box_mean(a, 1)[0, 0] == pytest.approx(a[np.ix_([31, 0, 1], [31, 0, 1])].mean())


def test_hp_quasinorm_homogeneous(rng):
    s = GridSpec(2, 32)
    f = random_band_limited(s, rng)
    a = hp_quasinorm(f, 0.8)
    assert a > 0
    assert hp_quasinorm(f * -3.0, 0.8) == pytest.approx(3 * a, rel=1e-12)
    with pytest.raises(ValueError):
        hp_quasinorm(f, 0)
