import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skewforce import (
    ConventionMismatchError,
    FieldHarmonic,
    InvalidArgumentError,
    SkewConfiguration,
    ToothForceSeries,
    TorqueSeries,
    apply_slice_shifts,
    discrete_skew_factor,
    order_amplitude,
    peak_to_peak,
    ripple_metrics,
    slice_schedule,
    spectrum_space_time,
    spectrum_time,
    suppression_ratio,
    synthesize,
    torque_total,
)
from skewforce.harmonics import RATIO_FLOOR, inverse_space_time, parseval_terms, ratio_table

H = FieldHarmonic


def direct_dft(x):
    n = len(x)
    k = np.arange(n)
    return np.array([np.sum(x * np.exp(-2j * np.pi * j * k / n)) for j in range(n // 2 + 1)])


# ---------------------------------------------------------------- 1-D

def test_constant_series():
    spec = spectrum_time(np.full(16, 3.5))
    assert spec.mean == 3.5
    assert np.allclose(spec.amplitudes[1:], 0, atol=1e-15)


def test_single_ripple_order():
    t = np.arange(128) / 128
    x = 5 + 2 * np.cos(48 * 2 * np.pi * t + 0.3)
    spec = spectrum_time(x)
    assert math.isclose(order_amplitude(spec, 0), 5, rel_tol=1e-13)
    assert math.isclose(order_amplitude(spec, 48), 2, rel_tol=1e-13)
    assert math.isclose(spec.phases[48], 0.3, abs_tol=1e-12)
    others = np.delete(spec.amplitudes, [0, 48])
    assert np.max(others) < 1e-13


@pytest.mark.parametrize("n", [16, 17, 50])
def test_matches_direct_dft(n):
    x = np.random.default_rng(n).normal(size=n)
    spec = spectrum_time(x)
    ref = direct_dft(x) / n
    ref[1:] *= 2
    if n % 2 == 0:
        ref[-1] /= 2
    assert np.allclose(spec.coefficients, ref, atol=1e-12)


def test_nyquist_bin_not_doubled():
    x = np.cos(np.pi * np.arange(8))  # +1, -1, ...
    spec = spectrum_time(x)
    assert math.isclose(spec.amplitudes[-1], 1.0, rel_tol=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.integers(4, 200), st.integers(0, 10**6))
def test_parseval(n, seed):
    x = np.random.default_rng(seed).normal(size=n) + 0.7
    assert math.isclose(parseval_terms(spectrum_time(x)), np.mean(x * x), rel_tol=1e-10)


def test_peak_to_peak_brute():
    x = np.random.default_rng(1).normal(size=37)
    brute = max(a - b for a in x for b in x)
    assert peak_to_peak(x) == brute
    with pytest.raises(InvalidArgumentError):
        peak_to_peak([])


def test_torque_series_uses_mechanical_orders():
    ts = TorqueSeries(1 + 0.1 * np.cos(12 * 2 * np.pi * np.arange(64) / 64), np.arange(64) * 0.01, 4)
    spec = spectrum_time(ts)
    assert spec.order_step == 4
    assert math.isclose(order_amplitude(spec, 48), 0.1, rel_tol=1e-12)
    with pytest.raises(InvalidArgumentError):
        order_amplitude(spec, 50)
    with pytest.raises(InvalidArgumentError):
        order_amplitude(spec, 4 * 40)
    m = ripple_metrics(ts, orders=[24, 48])
    assert math.isclose(m.mean, 1.0, rel_tol=1e-14) and m.amplitudes[24] < 1e-14
    assert math.isclose(m.peak_to_peak, 0.2, rel_tol=1e-12)


def test_rows_shape():
    spec = spectrum_time(np.arange(8.0))
    rows = spec.rows()
    assert len(rows) == 5 and all(r[0] == 0 for r in rows)
    assert [r[1] for r in rows] == [0, 1, 2, 3, 4]


def test_short_series_rejected():
    with pytest.raises(InvalidArgumentError):
        spectrum_time(np.ones(3))


# ---------------------------------------------------------------- 2-D

def direct_c(f, m, n):
    ns, nt = f.shape
    k = np.arange(ns)[:, None]
    i = np.arange(nt)[None, :]
    return np.sum(f * np.exp(-1j * (2 * np.pi * m * k / ns - 2 * np.pi * n * i / nt))) / (ns * nt)


def test_traveling_wave_2d():
    ns, nt = 48, 128
    k = np.arange(ns)[:, None]
    i = np.arange(nt)[None, :]
    f = 3.0 * np.cos(8 * 2 * np.pi * k / ns - 48 * 2 * np.pi * i / nt + 0.4) + 1.5
    spec = spectrum_space_time(f, pole_count=8)
    assert math.isclose(spec.amplitude(8, 48), 3.0, rel_tol=1e-12)
    assert math.isclose(np.angle(spec.coefficient(8, 48)), 0.4, abs_tol=1e-12)
    assert math.isclose(spec.amplitude(0, 0), 1.5, rel_tol=1e-12)
    for m, n in [(8, 48), (-8, -48), (3, 5), (0, 0), (24, 64), (-5, 17)]:
        assert abs(spec.coefficient(m, n) - direct_c(f, m, n)) < 1e-12
    rows = spec.rows()
    big = [r for r in rows if r[2] > 1e-9]
    assert sorted((r[0], r[1]) for r in big) == [(0, 0), (8, 48)]
    assert math.isclose(spec.spatial_in_poles[8], 1.0)


def test_conjugate_symmetry_and_round_trip():
    f = np.random.default_rng(5).normal(size=(48, 32))
    spec = spectrum_space_time(f)
    for m, n in [(1, 2), (7, -3), (24, 16), (-13, 9)]:
        assert abs(spec.coefficient(m, n) - np.conj(spec.coefficient(-m, -n))) < 1e-14
    assert spec.is_self_conjugate(24, 16) and spec.is_self_conjugate(0, 0)
    assert np.max(np.abs(inverse_space_time(spec) - f)) < 1e-10


def test_rows_cover_every_pair_once():
    f = np.random.default_rng(9).normal(size=(6, 8))
    spec = spectrum_space_time(f)
    rows = spec.rows()
    power = sum(r[2] ** 2 * (1 if spec.is_self_conjugate(r[0], r[1]) else 0.5) for r in rows)
    assert math.isclose(power, np.mean(f * f), rel_tol=1e-12)


def test_tooth_average_mode():
    f = np.random.default_rng(2).normal(size=(12, 16))
    spec = spectrum_space_time(f, mode="tooth_average")
    assert spec.shape == (1, 16)
    assert abs(spec.coefficient(0, 3) - direct_c(f.mean(axis=0, keepdims=True), 0, 3)) < 1e-14
    with pytest.raises(InvalidArgumentError):
        spec.coefficient(1, 0)


def test_2d_range_errors():
    spec = spectrum_space_time(np.zeros((48, 16)))
    with pytest.raises(InvalidArgumentError):
        order_amplitude(spec, (25, 0))
    with pytest.raises(InvalidArgumentError):
        order_amplitude(spec, (0, 9))


def test_synthesize_tooth_forces_recovers_table(geom):
    # tooth forces from a single radial harmonic: B^2 gives (2m, 2n) terms plus mean
    f = synthesize([H("radial", 4, 1, 1.0)], (16, 96), 1, geom)
    from skewforce import tooth_forces_one_section
    tf = tooth_forces_one_section(f, geom)
    spec = spectrum_space_time(tf, "radial", pole_count=8)
    big = sorted((r[0], r[1]) for r in spec.rows() if r[2] > 1e-9 * spec.amplitude(0, 0))
    assert big == [(0, 0), (8, 2)]


def test_field_spectrum_recovers_harmonic_table(geom):
    table = [H("radial", 4, 1, 0.9), H("radial", 20, 5, 0.1, 0.3), H("radial", 44, -1, 0.05, -1.0),
             H("radial", 0, 3, 0.02)]
    f = synthesize(table, (16, 96), 1, geom)
    spec = spectrum_space_time(f.br[0].T)  # (angle samples, time)
    found = [(r[0], r[1]) for r in spec.rows() if r[2] > 1e-9]
    expected = sorted(((h.m, h.n) if (h.n > 0 or (h.n == 0 and h.m >= 0)) else (-h.m, -h.n)) for h in table)
    assert sorted(found, key=lambda x: (x[1], x[0])) == sorted(expected, key=lambda x: (x[1], x[0]))
    for h in table:
        assert abs(spec.amplitude(h.m, h.n) - h.amplitude) < 1e-10
        c = spec.coefficient(h.m, h.n)
        assert abs(np.angle(c) - h.phase) < 1e-9


def test_component_selection():
    z = np.zeros((1, 4, 8))
    tf = ToothForceSeries(z + 1, z + 2, z + 3)
    assert spectrum_space_time(tf, "axial").amplitude(0, 0) == 3
    with pytest.raises(Exception):
        spectrum_space_time(tf, "bogus")


# ---------------------------------------------------------------- ratios

def test_ratio_identity_and_sentinel():
    x = 1 + 0.3 * np.cos(2 * np.pi * 3 * np.arange(32) / 32)
    s = spectrum_time(x)
    assert suppression_ratio(s, s, 3) == 1.0
    assert suppression_ratio(s, s, 5) is None
    assert RATIO_FLOOR == 1e-12
    assert list(ratio_table(s, s)) == [3]


def test_ratio_convention_mismatch():
    a = spectrum_time(np.ones(32))
    b = spectrum_time(np.ones(64))
    c = spectrum_time(np.ones(32), order_step=4)
    with pytest.raises(ConventionMismatchError):
        suppression_ratio(a, b, 0)
    with pytest.raises(ConventionMismatchError):
        suppression_ratio(a, c, 0)
    with pytest.raises(ConventionMismatchError):
        suppression_ratio(a, spectrum_space_time(np.ones((4, 32))), 0)


@pytest.mark.parametrize("q", [2, 3, 4])
def test_ratio_equals_discrete_factor_per_bin(geom, q):
    hs = [H("radial", 4, 1, 0.9), H("tangential", 4, 1, 0.12, 0.3),
          H("radial", 20, 5, 0.1), H("tangential", 20, -1, 0.02, 0.7),
          H("radial", 44, 11, 0.08), H("tangential", 44, -1, 0.03, -0.4),
          H("radial", 52, 13, 0.06, 0.2), H("tangential", 52, 1, 0.02),
          H("radial", 92, 23, 0.03), H("tangential", 92, -1, 0.01)]
    theta = 2 * math.pi / 48
    base = synthesize(hs, (128, 384), 1, geom)
    skewed = apply_slice_shifts(base, slice_schedule(SkewConfiguration("step", q, theta), geom))
    ref = spectrum_time(torque_total(base, geom))
    skw = spectrum_time(torque_total(skewed, geom))
    table = ratio_table(skw, ref)
    assert {24, 48, 96} <= set(table)
    for order, ratio in table.items():
        assert abs(ratio - discrete_skew_factor(theta, q, order)) < 1e-9
