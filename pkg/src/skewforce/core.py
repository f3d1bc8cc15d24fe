"""
Shared domain types for the skewed-machine post-processing pipeline.

All angles are radians. Field maps are sampled on a cylindrical surface in the
air gap and indexed (slice, time, angle); the time axis spans one electrical
period and the angle axis one mechanical revolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Mapping, Optional

import numpy as np

MU_0 = 4e-7 * math.pi  # H/m, fixed (not the post-2019 measured value)

GRID_RTOL = 1e-12


class SkewForceError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgumentError(SkewForceError, ValueError):
    pass


class GridMismatchError(SkewForceError, ValueError):
    pass


class MissingDataError(SkewForceError, ValueError):
    pass


class ConventionMismatchError(SkewForceError, ValueError):
    pass


class ParseError(SkewForceError, ValueError):
    """Malformed input file or config; ``line`` and ``key`` locate the fault."""

    def __init__(self, message: str, line: Optional[int] = None, key: Optional[str] = None):
        self.line = line
        self.key = key
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key '{key}'")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


def _frozen(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


# =============================================================================
# GEOMETRY
# =============================================================================

@dataclass(frozen=True)
class MachineGeometry:
    """
    Machine dimensions needed by the skew and stress-tensor evaluations.

    Attributes:
        pole_count: Number of poles N_p (even)
        slot_count: Number of stator slots N_s
        airgap_radius: Radius of the evaluation surface r_delta [m]
        rotor_radius: Rotor outer radius r_rt [m]
        axial_length: Active length L [m]
        rotor_diameter: D [m]; defaults to 2*rotor_radius
        slot_bottom_radius: r_sb [m], only needed for three-section tooth paths

    Construction never raises; call ``validate_geometry`` for a report.
    """
    pole_count: int
    slot_count: int
    airgap_radius: float
    rotor_radius: float
    axial_length: float
    rotor_diameter: Optional[float] = None
    slot_bottom_radius: Optional[float] = None

    def __post_init__(self):
        if self.rotor_diameter is None:
            object.__setattr__(self, "rotor_diameter", 2.0 * self.rotor_radius)

    @property
    def pole_pairs(self) -> int:
        return self.pole_count // 2

    @property
    def slot_pitch(self) -> float:
        return 2.0 * math.pi / self.slot_count


def validate_geometry(geom: MachineGeometry) -> list[str]:
    """Return one message per violated invariant; an empty list means valid."""
    report = []
    p, s = geom.pole_count, geom.slot_count
    if not isinstance(p, (int, np.integer)) or isinstance(p, bool):
        report.append("pole count must be an integer")
    else:
        if p < 2:
            report.append("pole count must be at least 2")
        if p % 2:
            report.append("pole count must be even")
    if not isinstance(s, (int, np.integer)) or isinstance(s, bool):
        report.append("slot count must be an integer")
    elif s < 1:
        report.append("slot count must be at least 1")

    r_d, r_rt, length, d = geom.airgap_radius, geom.rotor_radius, geom.axial_length, geom.rotor_diameter
    for name, value in (("air gap radius", r_d), ("rotor radius", r_rt),
                        ("axial length", length), ("rotor diameter", d)):
        if not (math.isfinite(value) and value > 0):
            report.append(f"{name} must be positive and finite")
    if r_d < r_rt:
        report.append("air gap radius below rotor radius")
    if math.isfinite(d) and math.isfinite(r_rt) and r_rt > 0:
        if abs(d - 2.0 * r_rt) > 1e-12 * abs(2.0 * r_rt):
            report.append("rotor diameter must equal twice the rotor radius")
    if geom.slot_bottom_radius is not None and not geom.slot_bottom_radius > r_d:
        report.append("slot bottom radius must exceed air gap radius")
    return report


def require_valid(geom: MachineGeometry) -> MachineGeometry:
    report = validate_geometry(geom)
    if report:
        raise InvalidArgumentError("invalid geometry: " + "; ".join(report))
    return geom


# =============================================================================
# SKEW CONFIGURATION
# =============================================================================

class SkewStyle(str, Enum):
    NONE = "none"
    STEP = "step"
    VEE = "vee"
    CONTINUOUS = "continuous"


@dataclass(frozen=True)
class SkewConfiguration:
    style: SkewStyle = SkewStyle.NONE
    segment_count: int = 1
    total_angle: float = 0.0
    continuous_resolution: int = 32

    def __post_init__(self):
        object.__setattr__(self, "style", SkewStyle(self.style))

    def violations(self) -> list[str]:
        out = []
        q = self.segment_count
        if not isinstance(q, (int, np.integer)) or q < 1:
            out.append("segment count must be a positive integer")
        if not (math.isfinite(self.total_angle) and self.total_angle >= 0):
            out.append("skew angle must be finite and non-negative")
        if self.continuous_resolution < 8:
            out.append("continuous resolution must be at least 8")
        if self.style is SkewStyle.NONE and (q != 1 or self.total_angle != 0):
            out.append("unskewed configuration requires one segment and zero angle")
        if self.style is SkewStyle.VEE and q < 2:
            out.append("V-skew needs at least two segments")
        return out


# =============================================================================
# FIELD MAPS
# =============================================================================

@dataclass(frozen=True)
class AirGapFieldMap:
    """
    Flux density components on the evaluation cylinder, shape (slices, N_t, N_a).

    ``harmonics`` and ``time_offsets`` are set for synthesized maps so that
    per-slice shifts can be applied exactly in phase space. ``time_offsets``
    holds the electrical-angle advance already applied to each slice.
    """
    br: np.ndarray
    btheta: np.ndarray
    bz: np.ndarray
    slice_spans: np.ndarray
    harmonics: Optional[tuple] = None
    time_offsets: Optional[np.ndarray] = None
    metadata: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        br = _frozen(self.br)
        if br.ndim != 3:
            raise InvalidArgumentError("field arrays must be 3-D (slice, time, angle)")
        bt, bz = _frozen(self.btheta), _frozen(self.bz)
        if bt.shape != br.shape or bz.shape != br.shape:
            raise InvalidArgumentError("B_r, B_theta and B_z must share one shape")
        spans = _frozen(np.atleast_1d(self.slice_spans))
        if spans.shape != (br.shape[0],):
            raise InvalidArgumentError("one axial span per slice required")
        if np.any(spans <= 0):
            raise InvalidArgumentError("slice spans must be positive")
        s, nt, na = br.shape
        if s < 1 or nt < 4 or na < 8:
            raise InvalidArgumentError(f"grid too small: {s} slices, {nt} times, {na} angles (need >=1, >=4, >=8)")
        object.__setattr__(self, "br", br)
        object.__setattr__(self, "btheta", bt)
        object.__setattr__(self, "bz", bz)
        object.__setattr__(self, "slice_spans", spans)
        if self.time_offsets is not None:
            object.__setattr__(self, "time_offsets", _frozen(self.time_offsets))
        object.__setattr__(self, "metadata", MappingProxyType(dict(self.metadata)))

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.br.shape

    @property
    def slice_count(self) -> int:
        return self.br.shape[0]

    @property
    def time_samples(self) -> int:
        return self.br.shape[1]

    @property
    def angle_samples(self) -> int:
        return self.br.shape[2]

    @property
    def axial_length(self) -> float:
        return float(math.fsum(self.slice_spans))

    @property
    def angles(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.angle_samples) / self.angle_samples

    @property
    def electrical_phase(self) -> np.ndarray:
        """Electrical angle omega_e*t at each time sample, one period."""
        return 2.0 * np.pi * np.arange(self.time_samples) / self.time_samples

    @property
    def is_synthetic(self) -> bool:
        return self.harmonics is not None

    def slice(self, k: int) -> "AirGapFieldMap":
        return AirGapFieldMap(self.br[k:k + 1], self.btheta[k:k + 1], self.bz[k:k + 1],
                              self.slice_spans[k:k + 1], metadata=self.metadata)


def check_uniform_grid(values: np.ndarray, period: float = 2.0 * math.pi) -> None:
    """Raise GridMismatchError unless ``values`` is a uniform periodic grid over ``period``."""
    values = np.asarray(values, dtype=float)
    n = values.size
    if n < 2:
        raise GridMismatchError("grid needs at least two samples")
    steps = np.diff(np.append(values, values[0] + period))
    h = period / n
    # absolute slack covers rounding in the generated coordinates themselves
    if np.max(np.abs(steps - h)) > GRID_RTOL * h + 8 * np.finfo(float).eps * period:
        raise GridMismatchError("grid spacing is not uniform")


# =============================================================================
# TEETH, FORCES, TORQUE, SPECTRA
# =============================================================================

@dataclass(frozen=True)
class ToothWindow:
    tooth_index: int
    center_angle: float
    width: float

    @property
    def start(self) -> float:
        return self.center_angle - 0.5 * self.width


def tooth_windows(geom: MachineGeometry) -> list[ToothWindow]:
    """One window per tooth; tooth k spans [k, k+1) slot pitches so slot centres sit on k*2pi/N_s."""
    require_valid(geom)
    pitch = geom.slot_pitch
    return [ToothWindow(k, (k + 0.5) * pitch, pitch) for k in range(geom.slot_count)]


@dataclass(frozen=True)
class ToothForceSeries:
    """
    Per-slice tooth forces, arrays of shape (slices, N_s, N_t) in newtons.

    The axial sum over slices (fixed slice order) is exposed as ``radial``,
    ``tangential`` and ``axial`` with shape (N_s, N_t).
    """
    radial_slices: np.ndarray
    tangential_slices: np.ndarray
    axial_slices: np.ndarray
    path: str = "one_section"
    metadata: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        arrs = [_frozen(a) for a in (self.radial_slices, self.tangential_slices, self.axial_slices)]
        if arrs[0].ndim != 3 or any(a.shape != arrs[0].shape for a in arrs):
            raise InvalidArgumentError("force arrays must share shape (slices, teeth, times)")
        if not all(np.all(np.isfinite(a)) for a in arrs):
            raise InvalidArgumentError("tooth forces must be finite")
        object.__setattr__(self, "radial_slices", arrs[0])
        object.__setattr__(self, "tangential_slices", arrs[1])
        object.__setattr__(self, "axial_slices", arrs[2])
        object.__setattr__(self, "metadata", MappingProxyType(dict(self.metadata)))

    @staticmethod
    def _axial_sum(a: np.ndarray) -> np.ndarray:
        out = a[0].copy()
        for k in range(1, a.shape[0]):
            out += a[k]
        return out

    @property
    def radial(self) -> np.ndarray:
        return self._axial_sum(self.radial_slices)

    @property
    def tangential(self) -> np.ndarray:
        return self._axial_sum(self.tangential_slices)

    @property
    def axial(self) -> np.ndarray:
        return self._axial_sum(self.axial_slices)

    def component(self, name: str) -> np.ndarray:
        try:
            return {"radial": self.radial, "tangential": self.tangential, "axial": self.axial}[name]
        except KeyError:
            raise InvalidArgumentError(f"unknown force component '{name}'") from None

    @property
    def shape(self) -> tuple[int, int]:
        return self.radial_slices.shape[1:]


@dataclass(frozen=True)
class TorqueSeries:
    """Torque over one electrical period; ``rotor_angle`` is mechanical [rad]."""
    torque: np.ndarray
    rotor_angle: np.ndarray
    pole_pairs: int = 1

    def __post_init__(self):
        t = _frozen(self.torque)
        if t.ndim != 1 or not np.all(np.isfinite(t)):
            raise InvalidArgumentError("torque must be a finite 1-D series")
        object.__setattr__(self, "torque", t)
        object.__setattr__(self, "rotor_angle", _frozen(self.rotor_angle))

    def __len__(self):
        return self.torque.size
