"""
Skew angles, skew factors, slot harmonic orders and per-slice shift schedules.

Angles passed to the skew factors are used as given: the factor depends only
on the product theta*nu, so mechanical angle with mechanical order or
electrical angle with electrical order give the same result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .core import (
    InvalidArgumentError,
    MachineGeometry,
    SkewConfiguration,
    SkewStyle,
    require_valid,
)

Real = Union[int, float, Fraction]


def optimal_skew_angle(pole_count: int, slot_count: int) -> float:
    """2*pi / lcm(N_p, N_s) [rad]."""
    if pole_count < 1 or slot_count < 1:
        raise InvalidArgumentError("pole and slot counts must be positive")
    return 2.0 * math.pi / math.lcm(int(pole_count), int(slot_count))


def skew_factor(theta: float, nu: Real) -> float:
    """sin(x)/x with x = theta*nu/2; exactly 1 at x = 0."""
    x = 0.5 * theta * float(nu)
    if x == 0.0:
        return 1.0
    return math.sin(x) / x


def centered_step_shifts(theta: float, q: int) -> np.ndarray:
    """Shifts (k - (q-1)/2) * theta/q for k = 0..q-1; mean is zero."""
    k = np.arange(q, dtype=float)
    return (k - 0.5 * (q - 1)) * (theta / q)


def discrete_skew_factor(theta: float, q: int, nu: Real) -> float:
    """Magnitude of the mean phasor exp(i*nu*shift_k) over q centred step shifts."""
    if q < 1:
        raise InvalidArgumentError("segment count must be at least 1")
    phasors = np.exp(1j * float(nu) * centered_step_shifts(theta, int(q)))
    return float(abs(phasors.mean()))


@dataclass(frozen=True)
class HarmonicOrderSet:
    """Orders nu = 1 -/+ g*N_s/N_p as exact fractions, paired with their g."""
    entries: tuple[tuple[Fraction, int], ...]

    @property
    def orders(self) -> list[Fraction]:
        return [nu for nu, _ in self.entries]

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)


def harmonic_orders(pole_count: int, slot_count: int, g_max: int) -> HarmonicOrderSet:
    if pole_count < 1 or slot_count < 1 or g_max < 0:
        raise InvalidArgumentError("counts must be positive and g_max non-negative")
    ratio = Fraction(slot_count, pole_count)
    entries = [(Fraction(1), 0)]
    for g in range(1, g_max + 1):
        entries.append((1 - g * ratio, g))
        entries.append((1 + g * ratio, g))
    return HarmonicOrderSet(tuple(entries))


@dataclass(frozen=True)
class SliceSchedule:
    """
    Per-slice rotor shifts (mechanical rad) and axial spans (m), slices ordered along z.

    ``pole_pairs`` converts a rotor shift to the electrical time advance used when
    shifting field maps.
    """
    shifts: tuple[float, ...]
    spans: tuple[float, ...]
    style: str
    pole_pairs: int = 1
    total_angle: float = 0.0

    def __len__(self):
        return len(self.shifts)

    @property
    def electrical_shifts(self) -> np.ndarray:
        return self.pole_pairs * np.asarray(self.shifts)

    def rows(self):
        return [(k, s, l) for k, (s, l) in enumerate(zip(self.shifts, self.spans))]


def _equal_spans(length: float, n: int) -> tuple[float, ...]:
    return tuple([length / n] * n)


def slice_schedule(config: SkewConfiguration, geom: MachineGeometry) -> SliceSchedule:
    problems = config.violations()
    if problems:
        raise InvalidArgumentError("invalid skew configuration: " + "; ".join(problems))
    require_valid(geom)
    theta, q, length = config.total_angle, config.segment_count, geom.axial_length
    style = config.style

    if style is SkewStyle.NONE:
        shifts = np.zeros(1)
    elif style is SkewStyle.STEP:
        shifts = centered_step_shifts(theta, q)
    elif style is SkewStyle.CONTINUOUS:
        shifts = centered_step_shifts(theta, config.continuous_resolution)
    else:
        half = centered_step_shifts(theta, (q + 1) // 2)
        shifts = np.concatenate([half, half[::-1][q % 2:]])
        # odd q repeats the middle shift less often than the others; recentre
        shifts = shifts - shifts.mean()
        # restore exact palindrome after the subtraction
        shifts = 0.5 * (shifts + shifts[::-1])

    return SliceSchedule(
        shifts=tuple(float(s) for s in shifts),
        spans=_equal_spans(length, len(shifts)),
        style=f"{style.value}" + ("/palindromic-step" if style is SkewStyle.VEE else ""),
        pole_pairs=geom.pole_pairs,
        total_angle=theta,
    )


def continuous_inclination(geom: MachineGeometry, theta_skew: float) -> float:
    """Circumferential slope r_rt*theta/L of a continuously skewed magnet (dimensionless)."""
    if not geom.axial_length > 0:
        raise InvalidArgumentError("axial length must be positive")
    return geom.rotor_radius * theta_skew / geom.axial_length
