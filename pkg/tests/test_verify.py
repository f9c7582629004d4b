import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kclosed import GridField, GridSpec, split
from kclosed import verify as V

from conftest import random_band_limited


def test_report_schema(corpus64):
    jsonschema = pytest.importorskip("jsonschema")
    res = split(corpus64[0].kin)
    reps = [
        V.scalar_lemma_suite(1000, 1),
        V.layer_cake_check(res, 0.8),
        V.atom_check(res, 0.8),
        V.boundary_diagnostics(res),
        V.kclosed_verdict(corpus64[0].kin, res),
    ]
    for r in reps:
        jsonschema.validate(r.to_dict(), V.REPORT_SCHEMA)
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate({"check_name": "x", "status": "maybe", "constants": {}, "samples": 0, "seed": None}, V.REPORT_SCHEMA)


def test_scalar_lemma_suite():
    rep = V.scalar_lemma_suite(200_000, seed=3, adversarial=1000)
    assert rep.status == V.PASS and rep.constants["violations"] == 0
    assert rep.constants["max_ratio"] <= 1 + 1e-9
    assert rep.samples == 201_000 and rep.constants["premise_count"] > 1000


def test_scalar_lemma_forced_failure():
    # the sharp factor is 1: below it the equality samples must fail
    rep = V.scalar_lemma_suite(10_000, seed=3, factor=0.95, adversarial=1000)
    assert rep.status == V.FAIL and rep.constants["violations"] > 0


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-3, 1e3), st.floats(1.01, 10), st.floats(1e-6, 1e6), st.floats(1e-6, 1e6), st.floats(1e-6, 1e6))
def test_lemma_property(t, n, a, b, c):
    if t**n * a + t * b >= c:
        assert V.lemma_ratio(t, n, a, b, c) <= 2.0


def test_lemma_equality_case():
    # t^n a = c, b = 0: ratio is exactly 1
    t, n, c = 2.0, 3.0, 5.0
    assert V.lemma_ratio(t, n, c / t**n, 0.0, c) == pytest.approx(1.0)


def test_majorization(corpus64):
    kin = corpus64[1].kin
    rep = V.majorization_check(kin)
    assert rep.status == V.PASS and rep.constants["delta"] == 0.5 and rep.constants["max_excess"] <= 0
    expl = V.majorization_check(kin, delta=0.1)
    assert expl.status == V.REPORT and not expl.blocking and expl.constants["exploratory"]


def test_default_delta():
    assert V.default_delta(1) == 0.5 and V.default_delta(2) == 0.5


def test_measure_bound_identity():
    for alpha, beta in [(1.0, 2.0), (0.3, 7.0), (50.0, 0.1)]:
        y, clean = V.measure_bound_identity(alpha, beta, 0.8, 2.0)
        assert y == pytest.approx(clean, rel=1e-12)
    assert V.lambda_identity(0.3, 7.0, 0.8, 2.0) <= 1e-12


def test_split_level_checks(corpus64):
    for item in corpus64[:3]:
        res = split(item.kin)
        for rep in (
            V.measure_bound_check(item.kin, res),
            V.layer_cake_check(res, 0.8),
            V.atom_check(res, 0.8),
            V.v_norm_check(res, item.kin),
            V.kclosed_verdict(item.kin, res),
            V.maximal_domination_check(item.kin),
        ):
            assert rep.status == V.PASS, (rep.check_name, rep.constants, rep.notes)
        lc = V.layer_cake_check(res, 0.8).constants
        assert lc["constant"] == pytest.approx(2**0.8 / (2**0.8 - 1)) and lc["ratio"] <= 1
        kc = V.kclosed_verdict(item.kin, res).constants
        assert kc["reconstruction_rel_error"] <= 1e-10
        assert all(math.isfinite(kc[k]) for k in ("C_w", "C_w_atomic", "C_v"))


def test_atom_check_detects_bad_atoms(corpus64):
    res = split(corpus64[0].kin)
    a = res.atoms[0]
    object.__setattr__(a, "local", a.local + 1.0)
    rep = V.atom_check(res, 0.8)
    assert rep.status == V.FAIL and rep.constants["violations"] >= 1


def test_second_derivative_exact_on_quadratics():
    t = np.array([0.1, 0.15, 0.3, 0.32, 0.7])
    vals = (3 * t**2 - t + 2)[:, None]
    assert np.allclose(V.second_derivative_t(vals, t), 6.0)


def test_single_mode_green():
    assert V.single_mode_green() <= 1e-6


def test_green_identity_check(rng):
    s = GridSpec(2, 32)
    f = random_band_limited(s, rng, band=6)
    rep = V.green_identity_check(f)
    assert rep.status == V.PASS and 3.4 <= rep.constants["factor"] <= 4.6
    zero = V.green_identity_check(GridField.zeros(s))
    assert zero.status == V.PASS


def test_upsample_is_exact_interpolation(rng):
    s = GridSpec(2, 16)
    f = random_band_limited(s, rng, band=5)
    g = V.upsample(f)
    assert g.spec.points == 32
    assert np.allclose(g.samples[::2, ::2], f.samples, atol=1e-13)


def test_ball_divergence(rng):
    s = GridSpec(1, 64)
    f = random_band_limited(s, rng, band=8)
    rep = V.ball_divergence_check(f, seed=2, samples=6)
    assert rep.status == V.PASS
    assert rep.constants["rel_error"] <= 5e-2 and rep.constants["factor"] >= 1.7


def test_sphere_rule_area():
    # flux of the field (0, ..., 0, t) through the sphere = ball volume
    for dim, vol in [(1, np.pi * 0.09), (2, 4 / 3 * np.pi * 0.027)]:
        off, dt, w = V._sphere_rule(dim, 0.3, 48)
        assert np.sum(w * dt) == pytest.approx(vol, rel=1e-10)


def test_reproduction_check(rng):
    rep = V.reproduction_check(random_band_limited(GridSpec(2, 32), rng))
    assert rep.status == V.PASS and rep.constants["rel_defect"] <= 1e-3
