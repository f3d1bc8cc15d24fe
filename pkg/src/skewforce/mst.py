"""
Maxwell stress tensor evaluations on the air-gap cylinder.

Integrals over the bore angle use the rectangle rule on the uniform periodic
grid, which is spectrally accurate for band-limited fields. Multi-slice maps
are evaluated slice by slice with each slice's axial span and summed in slice
order, so results do not depend on the worker count.

Sign convention: radial/tangential/axial forces are the air-gap traction
integrals as written in the component formulas, i.e. the tensor applied to
+r on the arc. A pure radial field gives F_r > 0, the magnetic tension that
draws the stator tooth toward the rotor.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .core import (
    MU_0,
    AirGapFieldMap,
    GridMismatchError,
    InvalidArgumentError,
    MachineGeometry,
    MissingDataError,
    ToothForceSeries,
    ToothWindow,
    TorqueSeries,
    check_uniform_grid,
    require_valid,
)

SIGN_CONVENTION = "traction T.(+r) on the air-gap arc; F_r > 0 draws the stator tooth toward the rotor"
SPAN_RTOL = 1e-9


# =============================================================================
# TENSOR AND TRACTION
# =============================================================================

def stress_tensor(br, btheta, bz=0.0) -> np.ndarray:
    """Cylindrical (r, theta, z) stress tensor in Pa; broadcasts to shape (..., 3, 3)."""
    b = np.stack(np.broadcast_arrays(np.asarray(br, float), np.asarray(btheta, float),
                                     np.asarray(bz, float)), axis=-1)
    sq = b * b
    total = sq.sum(axis=-1)
    t = b[..., :, None] * b[..., None, :] / MU_0
    diag = (sq - 0.5 * total[..., None]) / MU_0
    idx = np.arange(3)
    t[..., idx, idx] = diag
    return t


def traction(tensor: np.ndarray, normal) -> np.ndarray:
    """Stress vector T.n for a unit normal n."""
    n = np.asarray(normal, dtype=float)
    if n.shape != (3,) or abs(np.linalg.norm(n) - 1.0) > 1e-12:
        raise InvalidArgumentError("normal must be a unit 3-vector")
    return np.asarray(tensor) @ n


# =============================================================================
# HELPERS
# =============================================================================

def _check_angles(field: AirGapFieldMap, angles) -> None:
    if angles is None:
        return
    angles = np.asarray(angles, dtype=float)
    if angles.size != field.angle_samples:
        raise GridMismatchError("angle grid does not match the field's angle samples")
    check_uniform_grid(angles)


def _check_spans(field: AirGapFieldMap, geom: MachineGeometry) -> None:
    total = field.axial_length
    if abs(total - geom.axial_length) > SPAN_RTOL * geom.axial_length:
        raise InvalidArgumentError(
            f"slice spans sum to {total:.12g} m but the axial length is {geom.axial_length:.12g} m")


def _map_slices(fn, count: int, workers: int) -> list:
    if workers > 1 and count > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, range(count)))
    return [fn(k) for k in range(count)]


def _ordered_sum(parts: list) -> np.ndarray:
    out = np.array(parts[0], dtype=float, copy=True)
    for p in parts[1:]:
        out += p
    return out


# =============================================================================
# TORQUE
# =============================================================================

def _slice_torque(br: np.ndarray, bt: np.ndarray, span: float, r: float) -> np.ndarray:
    dtheta = 2.0 * np.pi / br.shape[-1]
    return (span / MU_0) * r * r * np.sum(br * bt, axis=-1) * dtheta


def torque_2d(field: AirGapFieldMap, geom: MachineGeometry, angles=None) -> TorqueSeries:
    """Torque per time step from a single-slice map, using that slice's axial span."""
    require_valid(geom)
    if field.slice_count != 1:
        raise InvalidArgumentError("torque_2d takes a single slice; use torque_total")
    _check_angles(field, angles)
    m = _slice_torque(field.br[0], field.btheta[0], field.slice_spans[0], geom.airgap_radius)
    return TorqueSeries(m, _rotor_angle(field, geom), geom.pole_pairs)


def _rotor_angle(field: AirGapFieldMap, geom: MachineGeometry) -> np.ndarray:
    return field.electrical_phase / geom.pole_pairs


def torque_total(field: AirGapFieldMap, geom: MachineGeometry, angles=None,
                 workers: int = 1) -> TorqueSeries:
    """Sum of slice torques; slice spans must add up to the axial length."""
    require_valid(geom)
    _check_angles(field, angles)
    _check_spans(field, geom)
    parts = _map_slices(
        lambda k: _slice_torque(field.br[k], field.btheta[k], field.slice_spans[k], geom.airgap_radius),
        field.slice_count, workers)
    return TorqueSeries(_ordered_sum(parts), _rotor_angle(field, geom), geom.pole_pairs)


# =============================================================================
# SURFACE FORCES
# =============================================================================

class ForceComponents(NamedTuple):
    radial: np.ndarray
    tangential: np.ndarray
    axial: np.ndarray


def _window_mask(window: Optional[ToothWindow], na: int) -> slice | np.ndarray:
    if window is None or window.width >= 2.0 * np.pi:
        return slice(None)
    h = 2.0 * np.pi / na
    # sample j belongs to the window when theta_j lies in [start, start + width)
    rel = np.mod(np.arange(na) * h - window.start, 2.0 * np.pi)
    tol = 1e-9 * h
    rel[np.abs(rel - 2.0 * np.pi) < tol] = 0.0
    return rel < window.width - tol


def _slice_forces(br, bt, bz, span, r, mask, include_bz, dtheta):
    br, bt, bz = br[..., mask], bt[..., mask], bz[..., mask]
    scale = r * span * dtheta / MU_0
    normal = br * br - bt * bt
    if include_bz:
        normal = normal - bz * bz
    return (0.5 * scale * normal.sum(axis=-1),
            scale * (bt * br).sum(axis=-1),
            scale * (bz * br).sum(axis=-1))


def surface_force_components(field: AirGapFieldMap, geom: MachineGeometry,
                             window: Optional[ToothWindow] = None, include_bz: bool = False,
                             angles=None, workers: int = 1) -> ForceComponents:
    """
    Radial, tangential and axial force per time step over ``window``
    (full circle when None), summed over slices.
    """
    require_valid(geom)
    _check_angles(field, angles)
    _check_spans(field, geom)
    mask = _window_mask(window, field.angle_samples)
    parts = _map_slices(
        lambda k: _slice_forces(field.br[k], field.btheta[k], field.bz[k], field.slice_spans[k],
                                geom.airgap_radius, mask, include_bz,
                                2.0 * np.pi / field.angle_samples),
        field.slice_count, workers)
    return ForceComponents(*(_ordered_sum([p[i] for p in parts]) for i in range(3)))


def _tooth_arc_forces(field: AirGapFieldMap, geom: MachineGeometry, include_bz: bool,
                      workers: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    ns, na = geom.slot_count, field.angle_samples
    if na % ns:
        raise GridMismatchError(f"{na} angle samples do not split evenly over {ns} teeth")
    per = na // ns
    r = geom.airgap_radius

    def one(k):
        shape = (field.time_samples, ns, per)
        br = field.br[k].reshape(shape)
        bt = field.btheta[k].reshape(shape)
        bz = field.bz[k].reshape(shape)
        fr, ft, fz = _slice_forces(br, bt, bz, field.slice_spans[k], r, slice(None),
                                    include_bz, 2.0 * np.pi / na)
        return fr.T, ft.T, fz.T  # (teeth, times)

    parts = _map_slices(one, field.slice_count, workers)
    return tuple(np.stack([p[i] for p in parts]) for i in range(3))


def tooth_forces_one_section(field: AirGapFieldMap, geom: MachineGeometry,
                             include_bz: bool = False, workers: int = 1) -> ToothForceSeries:
    """Arc integral over each tooth window; tooth k covers slot pitches [k, k+1)."""
    require_valid(geom)
    _check_spans(field, geom)
    fr, ft, fz = _tooth_arc_forces(field, geom, include_bz, workers)
    return ToothForceSeries(fr, ft, fz, path="one_section",
                            metadata={"include_bz": include_bz, "sign_convention": SIGN_CONVENTION,
                                      "slice_aggregation": "per-slice + ordered axial sum"})


# =============================================================================
# THREE-SECTION CONTOUR
# =============================================================================

@dataclass(frozen=True)
class SlotPathField:
    """
    Flux density on the radial line through each slot centre, from r_delta
    (sample 0) out to the slot bottom r_sb (last sample), equally spaced.

    Arrays have shape (slices, N_s, N_t, P); slot j sits at angle j*2pi/N_s,
    so it is path C-D of tooth j-1 and path A-B of tooth j.
    """
    br: np.ndarray
    btheta: np.ndarray
    bz: np.ndarray

    def __post_init__(self):
        arrs = [np.array(a, dtype=float) for a in (self.br, self.btheta, self.bz)]
        if arrs[0].ndim != 4 or any(a.shape != arrs[0].shape for a in arrs):
            raise InvalidArgumentError("slot path arrays must share shape (slices, slots, times, points)")
        if arrs[0].shape[-1] < 2:
            raise InvalidArgumentError("slot paths need at least two radial samples")
        if not all(np.all(np.isfinite(a)) for a in arrs):
            raise InvalidArgumentError("slot path fields must be finite")
        for name, a in zip(("br", "btheta", "bz"), arrs):
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @classmethod
    def zeros(cls, slices: int, slots: int, times: int, points: int = 2) -> "SlotPathField":
        z = np.zeros((slices, slots, times, points))
        return cls(z, z, z)

    @property
    def points(self) -> int:
        return self.br.shape[-1]


def _path_integral(values: np.ndarray, length: float) -> np.ndarray:
    """Trapezoid rule along the last axis over equally spaced samples spanning ``length``."""
    h = length / (values.shape[-1] - 1)
    return h * (values.sum(axis=-1) - 0.5 * (values[..., 0] + values[..., -1]))


def tooth_forces_three_section(field: AirGapFieldMap, slot_paths: Optional[SlotPathField],
                               geom: MachineGeometry, include_bz: bool = False,
                               workers: int = 1) -> ToothForceSeries:
    """
    Tooth forces on the contour A-B (slot j), B-C (air-gap arc), C-D (slot j+1).

    Normals point into the tooth: +r on the arc, +theta on A-B and -theta on
    C-D. The arc gives the one-section values; the flanks add the normal stress
    T_thetatheta to the tangential force and the shear T_rtheta to the radial
    force. Components are taken in each segment's local cylindrical basis.
    """
    require_valid(geom)
    if slot_paths is None:
        raise MissingDataError("three-section evaluation needs slot path fields")
    if geom.slot_bottom_radius is None:
        raise MissingDataError("three-section evaluation needs the slot bottom radius")
    want = (field.slice_count, geom.slot_count, field.time_samples)
    if slot_paths.br.shape[:3] != want:
        raise MissingDataError(
            f"slot path data has shape {slot_paths.br.shape[:3]}, expected {want} (slices, slots, times)")
    _check_spans(field, geom)
    fr, ft, fz = (np.array(a) for a in _tooth_arc_forces(field, geom, include_bz, workers))

    depth = geom.slot_bottom_radius - geom.airgap_radius
    br, bt, bz = slot_paths.br, slot_paths.btheta, slot_paths.bz
    tt = bt * bt - br * br
    if include_bz:
        tt = tt - bz * bz
    t_thth = 0.5 * tt / MU_0
    t_rth = br * bt / MU_0
    t_zth = bz * bt / MU_0
    spans = np.asarray(field.slice_spans)[:, None, None]
    # per slot line, (slices, slots, times)
    line_r = spans * _path_integral(t_rth, depth)
    line_t = spans * _path_integral(t_thth, depth)
    line_z = spans * _path_integral(t_zth, depth)
    # tooth k: +line(slot k) - line(slot k+1)
    fr += line_r - np.roll(line_r, -1, axis=1)
    ft += line_t - np.roll(line_t, -1, axis=1)
    fz += line_z - np.roll(line_z, -1, axis=1)
    return ToothForceSeries(fr, ft, fz, path="three_section",
                            metadata={"include_bz": include_bz, "sign_convention": SIGN_CONVENTION,
                                      "slice_aggregation": "per-slice + ordered axial sum",
                                      "slot_path_points": slot_paths.points})


# =============================================================================
# AXIAL FORCE ESTIMATE
# =============================================================================

def axial_force_estimate(torque: float, rotor_diameter: float, theta_skew: float) -> float:
    """F_z = (2M/D) tan(theta_skew) [N]."""
    if not rotor_diameter > 0:
        raise InvalidArgumentError("rotor diameter must be positive")
    if abs(theta_skew) >= 0.5 * math.pi:
        raise InvalidArgumentError("skew angle must be below 90 degrees")
    return 2.0 * torque / rotor_diameter * math.tan(theta_skew)
