"""
Analytic air-gap field maps built from space-time harmonic tables.

Each harmonic contributes ``amplitude * cos(m*theta - n*tau + phase)`` to one
component, where theta is the mechanical bore angle and tau the electrical
angle over one period. Rotor shifts are applied as time advances: a rotor
advanced by delta (mechanical) is seen at tau + p*delta. For rotor-synchronous
harmonics (m = n*p) this is the same as rotating the pattern by delta in space.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .core import (
    AirGapFieldMap,
    GridMismatchError,
    InvalidArgumentError,
    MachineGeometry,
)
from .skew import SliceSchedule

SHIFT_INTEGER_TOL = 1e-9


class Component(str, Enum):
    RADIAL = "radial"
    TANGENTIAL = "tangential"
    AXIAL = "axial"


_ARRAY_NAME = {Component.RADIAL: "br", Component.TANGENTIAL: "btheta", Component.AXIAL: "bz"}


@dataclass(frozen=True)
class FieldHarmonic:
    component: Component
    m: int
    n: int
    amplitude: float
    phase: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "component", Component(self.component))
        if not self.amplitude >= 0:
            raise InvalidArgumentError("harmonic amplitude must be non-negative")
        if int(self.m) != self.m or int(self.n) != self.n:
            raise InvalidArgumentError("harmonic orders must be integers")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "n", int(self.n))


def _evaluate(harmonics: Sequence[FieldHarmonic], nt: int, na: int, offsets: np.ndarray) -> dict:
    theta = 2.0 * np.pi * np.arange(na) / na
    tau = 2.0 * np.pi * np.arange(nt) / nt
    out = {name: np.zeros((offsets.size, nt, na)) for name in _ARRAY_NAME.values()}
    for h in harmonics:
        target = out[_ARRAY_NAME[h.component]]
        space = h.m * theta
        for k, off in enumerate(offsets):
            arg = space[None, :] - h.n * (tau + off)[:, None] + h.phase
            target[k] += h.amplitude * np.cos(arg)
    return out


def synthesize(harmonics: Iterable[FieldHarmonic], grid: tuple[int, int], slices: int,
               geom: MachineGeometry) -> AirGapFieldMap:
    """Sample the harmonic table on a (N_t, N_a) grid, identical on every slice."""
    harmonics = tuple(harmonics)
    nt, na = grid
    if slices < 1:
        raise InvalidArgumentError("at least one slice required")
    if harmonics:
        m_max = max(abs(h.m) for h in harmonics)
        n_max = max(abs(h.n) for h in harmonics)
        if na < 2 * m_max + 2:
            raise InvalidArgumentError(f"{na} angle samples cannot resolve spatial order {m_max}")
        if nt < 2 * n_max + 2:
            raise InvalidArgumentError(f"{nt} time samples cannot resolve temporal order {n_max}")
    offsets = np.zeros(slices)
    arrays = _evaluate(harmonics, nt, na, offsets)
    return AirGapFieldMap(
        arrays["br"], arrays["btheta"], arrays["bz"],
        slice_spans=np.full(slices, geom.axial_length / slices),
        harmonics=harmonics, time_offsets=offsets,
        metadata={"source": "synthetic", "pole_pairs": geom.pole_pairs},
    )


def _roll_time(a: np.ndarray, steps: float, interpolate: bool) -> np.ndarray:
    # result[i] = a[i + steps] on the periodic time axis
    whole = round(steps)
    if abs(steps - whole) <= SHIFT_INTEGER_TOL:
        return np.roll(a, -int(whole), axis=0)
    if not interpolate:
        raise GridMismatchError(
            f"shift of {steps:.6g} time steps is not a whole grid step; enable interpolation")
    lo = int(np.floor(steps))
    frac = steps - lo
    return (1.0 - frac) * np.roll(a, -lo, axis=0) + frac * np.roll(a, -(lo + 1), axis=0)


def apply_slice_shifts(field: AirGapFieldMap, schedule: SliceSchedule,
                       interpolate: bool = False, workers: int = 1) -> AirGapFieldMap:
    """
    Advance the rotor of slice k by ``schedule.shifts[k]``.

    Synthetic maps are re-evaluated with exact phase offsets. Ingested maps
    are rotated along the time axis; a shift that is not a whole time step
    needs ``interpolate=True`` (periodic linear interpolation).
    """
    q = len(schedule)
    if field.slice_count not in (1, q):
        raise InvalidArgumentError(
            f"field has {field.slice_count} slices but the schedule has {q}")
    delta = schedule.electrical_shifts
    spans = np.asarray(schedule.spans)
    base_idx = [0] * q if field.slice_count == 1 else list(range(q))
    meta = dict(field.metadata)
    meta["shift_style"] = schedule.style

    if field.is_synthetic:
        base_off = np.asarray(field.time_offsets)[base_idx]
        offsets = base_off + delta
        if np.all(delta == 0) and field.slice_count == q:
            return AirGapFieldMap(field.br, field.btheta, field.bz, spans, field.harmonics,
                                  field.time_offsets, meta)
        arrays = _evaluate(field.harmonics, field.time_samples, field.angle_samples, offsets)
        return AirGapFieldMap(arrays["br"], arrays["btheta"], arrays["bz"], spans,
                              field.harmonics, offsets, meta)

    nt = field.time_samples
    steps = delta * nt / (2.0 * np.pi)

    def one(k):
        src = base_idx[k]
        return tuple(_roll_time(a[src], steps[k], interpolate)
                     for a in (field.br, field.btheta, field.bz))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(one, range(q)))
    else:
        parts = [one(k) for k in range(q)]
    br, bt, bz = (np.stack([p[i] for p in parts]) for i in range(3))
    return AirGapFieldMap(br, bt, bz, spans, metadata=meta)


class CollapseMode(str, Enum):
    CONCATENATE = "concatenate"
    AVERAGE = "average"


def collapse_slices(field: AirGapFieldMap, mode: str = "concatenate") -> AirGapFieldMap:
    """
    ``concatenate`` keeps the slices as they are (3D-style evaluation).
    ``average`` returns one slice holding the span-weighted mean field.

    Averaging fields is only an estimate: stress is quadratic in B, so summing
    slice-wise forces is the faithful route.
    """
    mode = CollapseMode(mode)
    if mode is CollapseMode.CONCATENATE or field.slice_count == 1:
        return field
    w = np.asarray(field.slice_spans) / field.axial_length
    avg = [np.tensordot(w, a, axes=(0, 0))[None] for a in (field.br, field.btheta, field.bz)]
    meta = dict(field.metadata)
    meta["collapsed"] = "average"
    return AirGapFieldMap(*avg, slice_spans=[field.axial_length], metadata=meta)
