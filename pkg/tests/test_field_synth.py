import math

import numpy as np
import pytest

from skewforce import (
    AirGapFieldMap,
    FieldHarmonic,
    GridMismatchError,
    InvalidArgumentError,
    SkewConfiguration,
    apply_slice_shifts,
    collapse_slices,
    discrete_skew_factor,
    slice_schedule,
    synthesize,
)
from skewforce.skew import SliceSchedule


def H(*a, **k):
    return FieldHarmonic(*a, **k)


def test_single_cosine(geom):
    f = synthesize([H("radial", 4, 1, 1.0)], (64, 256), 1, geom)
    assert f.shape == (1, 64, 256)
    assert math.isclose(np.abs(f.br).max(), 1.0, rel_tol=1e-12)
    assert not f.btheta.any() and not f.bz.any()
    th = f.angles[None, :]
    tau = f.electrical_phase[:, None]
    assert np.allclose(f.br[0], np.cos(4 * th - tau), atol=1e-14)


def test_empty_table_gives_zero(geom):
    f = synthesize([], (8, 16), 2, geom)
    assert not (f.br.any() or f.btheta.any() or f.bz.any())
    assert np.allclose(f.slice_spans, [0.05, 0.05])


def test_linearity(geom):
    a = H("radial", 4, 1, 0.7, 0.2)
    b = H("tangential", 8, -3, 0.1, 1.0)
    both = synthesize([a, b], (32, 64), 1, geom)
    fa = synthesize([a], (32, 64), 1, geom)
    fb = synthesize([b], (32, 64), 1, geom)
    assert np.allclose(both.br, fa.br + fb.br, atol=1e-15)
    assert np.allclose(both.btheta, fa.btheta + fb.btheta, atol=1e-15)


@pytest.mark.parametrize("grid", [(64, 9), (5, 64)])
def test_below_nyquist_rejected(geom, grid):
    with pytest.raises(InvalidArgumentError):
        synthesize([H("radial", 4, 2, 1.0)], grid, 1, geom)


def test_negative_amplitude_rejected():
    with pytest.raises(InvalidArgumentError):
        H("radial", 1, 1, -1.0)


def _schedule(shifts, geom):
    n = len(shifts)
    return SliceSchedule(tuple(shifts), tuple([geom.axial_length / n] * n), "test", geom.pole_pairs)


def test_zero_shift_identity_bitwise(geom):
    f = synthesize([H("radial", 4, 1, 1.0), H("axial", 3, 2, 0.1)], (16, 32), 1, geom)
    out = apply_slice_shifts(f, _schedule([0.0], geom))
    assert np.array_equal(out.br, f.br) and np.array_equal(out.bz, f.bz)
    ing = AirGapFieldMap(f.br, f.btheta, f.bz, f.slice_spans)
    out2 = apply_slice_shifts(ing, _schedule([0.0], geom))
    assert np.array_equal(out2.br, f.br)


def test_rotor_synchronous_harmonic_rotates_in_space(geom):
    # m = n*p: advancing the rotor by d moves the pattern by d, phase advanced by m*d
    d = 0.0371
    f = synthesize([H("radial", 4, 1, 1.0, 0.3)], (32, 64), 1, geom)
    out = apply_slice_shifts(f, _schedule([d], geom))
    th = f.angles[None, :]
    tau = f.electrical_phase[:, None]
    expected = np.cos(4 * (th - d) - tau + 0.3)
    assert np.allclose(out.br[0], expected, atol=1e-13)
    # phase advance of 4*d relative to the base field at the same sample
    assert np.allclose(out.br[0], np.cos(4 * th - tau + 0.3 - 4 * d), atol=1e-13)


def test_slot_pitch_shift_periodic(geom):
    # m = 48 rotor-synchronous (n = 12, p = 4); one slot pitch returns the same field
    f = synthesize([H("radial", 48, 12, 1.0)], (32, 192), 1, geom)
    out = apply_slice_shifts(f, _schedule([2 * math.pi / 48], geom))
    assert np.allclose(out.br, f.br, atol=1e-12)


def test_ingested_integer_shift_and_interpolation(geom):
    f = synthesize([H("radial", 4, 1, 1.0)], (32, 64), 1, geom)
    ing = AirGapFieldMap(f.br, f.btheta, f.bz, f.slice_spans)
    step = 2 * math.pi / 32 / geom.pole_pairs   # one time sample of rotor motion
    exact = apply_slice_shifts(f, _schedule([-3 * step, 0.0, 3 * step], geom))
    rolled = apply_slice_shifts(ing, _schedule([-3 * step, 0.0, 3 * step], geom))
    assert np.allclose(rolled.br, exact.br, atol=1e-12)
    with pytest.raises(GridMismatchError):
        apply_slice_shifts(ing, _schedule([0.5 * step], geom))
    half = apply_slice_shifts(ing, _schedule([0.5 * step], geom), interpolate=True)
    assert np.allclose(half.br[0], 0.5 * (f.br[0] + np.roll(f.br[0], -1, axis=0)))


def test_slice_count_mismatch(geom):
    f = synthesize([], (8, 16), 2, geom)
    with pytest.raises(InvalidArgumentError):
        apply_slice_shifts(f, _schedule([0.0, 0.1, 0.2], geom))


def test_shift_preserves_slice_energy(geom):
    hs = [H("radial", 4, 1, 1.0), H("radial", 20, 5, 0.2, 0.4), H("tangential", 44, -1, 0.1)]
    f = synthesize(hs, (64, 128), 1, geom)
    sched = slice_schedule(SkewConfiguration("step", 5, 0.21), geom)
    out = apply_slice_shifts(f, sched)
    e0 = np.sum(f.br[0] ** 2 + f.btheta[0] ** 2)
    for k in range(5):
        ek = np.sum(out.br[k] ** 2 + out.btheta[k] ** 2)
        assert math.isclose(ek, e0, rel_tol=1e-10)


def test_collapse_identity_cases(geom):
    f = synthesize([H("radial", 4, 1, 1.0)], (16, 32), 1, geom)
    assert collapse_slices(f, "average") is f and collapse_slices(f, "concatenate") is f
    f3 = synthesize([H("radial", 4, 1, 1.0)], (16, 32), 3, geom)
    avg = collapse_slices(f3, "average")
    assert avg.slice_count == 1 and np.allclose(avg.br[0], f3.br[1], atol=1e-15)
    assert math.isclose(avg.axial_length, geom.axial_length)


@pytest.mark.parametrize("style, q", [("step", 3), ("step", 5), ("vee", 4)])
def test_average_scales_by_discrete_factor(geom, style, q):
    theta = 2 * math.pi / 48
    hs = [H("radial", 4, 1, 1.0), H("radial", 20, 5, 0.3, 0.2), H("radial", 44, 11, 0.1), H("radial", 48, 12, 0.2)]
    base = synthesize(hs, (64, 128), 1, geom)
    sched = slice_schedule(SkewConfiguration(style, q, theta), geom)
    avg = collapse_slices(apply_slice_shifts(base, sched), "average")
    c = np.fft.fft2(avg.br[0]) / avg.br[0].size
    for h in hs:
        amp = 2 * abs(c[(-h.n) % 64, h.m])
        # phasor-mean oracle over the schedule's own shifts
        phasor = abs(np.mean(np.exp(1j * h.m * np.array(sched.shifts))))
        assert math.isclose(amp, h.amplitude * phasor, rel_tol=1e-9, abs_tol=1e-13)
        if style == "step":
            assert math.isclose(amp, h.amplitude * discrete_skew_factor(theta, q, h.m), rel_tol=1e-9, abs_tol=1e-13)
