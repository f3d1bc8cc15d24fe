"""Config-driven orchestration shared by the CLI and the integration tests."""

from __future__ import annotations

import logging

from .core import AirGapFieldMap, MissingDataError, SkewStyle
from .field_synth import apply_slice_shifts, synthesize
from .harmonics import (
    ONE_SIDED,
    Spectrum1D,
    order_amplitude,
    peak_to_peak,
    ratio_table,
    spectrum_space_time,
    spectrum_time,
    suppression_ratio,
)
from .io_ingest import RunConfig, read_field_csv, read_slot_path_csv
from .mst import (
    SIGN_CONVENTION,
    tooth_forces_one_section,
    tooth_forces_three_section,
    torque_total,
)
from .skew import discrete_skew_factor, slice_schedule

log = logging.getLogger(__name__)


def build_field(cfg: RunConfig, workers: int = 1) -> AirGapFieldMap:
    """Synthesize or read the base field, then apply the configured skew schedule."""
    geom = cfg.geometry
    schedule = slice_schedule(cfg.skew, geom)
    if cfg.harmonics is not None:
        slices = cfg.slices if cfg.skew.style is SkewStyle.NONE else 1
        base = synthesize(cfg.harmonics, (cfg.time_samples, cfg.angle_samples), slices, geom)
    else:
        base = read_field_csv(cfg.resolve(cfg.field_map_path), axial_length=geom.axial_length)
    if cfg.skew.style is SkewStyle.NONE:
        log.info("unskewed: %d slice(s) used as given", base.slice_count)
        return base
    log.info("applying %s schedule with %d slices", schedule.style, len(schedule))
    return apply_slice_shifts(base, schedule, interpolate=cfg.interpolate, workers=workers)


def torque_analysis(cfg: RunConfig, workers: int = 1, field: AirGapFieldMap = None) -> dict:
    field = build_field(cfg, workers) if field is None else field
    series = torque_total(field, cfg.geometry, workers=workers)
    spectrum = spectrum_time(series)
    orders = cfg.orders or tuple(int(o) for o in spectrum.orders[1:])
    return {
        "series": series,
        "spectrum": spectrum,
        "mean": spectrum.mean,
        "peak_to_peak": peak_to_peak(series),
        "amplitudes": {int(o): order_amplitude(spectrum, o) for o in orders},
    }


def tooth_force_analysis(cfg: RunConfig, workers: int = 1, path: str = None):
    field = build_field(cfg, workers)
    path = path or cfg.tooth_path
    if path == "three_section":
        if cfg.slot_paths is None:
            raise MissingDataError("three-section path needs evaluation.slot_paths")
        slot_paths = read_slot_path_csv(cfg.resolve(cfg.slot_paths))
        return tooth_forces_three_section(field, slot_paths, cfg.geometry, cfg.include_bz, workers)
    return tooth_forces_one_section(field, cfg.geometry, cfg.include_bz, workers)


def space_time_analysis(cfg: RunConfig, workers: int = 1, component: str = None, mode: str = None):
    forces = tooth_force_analysis(cfg, workers)
    return spectrum_space_time(forces, component or cfg.component, mode or cfg.spectrum_mode,
                               pole_count=cfg.geometry.pole_count)


def geometry_echo(cfg: RunConfig) -> dict:
    g = cfg.geometry
    return {
        "pole_count": g.pole_count, "slot_count": g.slot_count,
        "airgap_radius": g.airgap_radius, "rotor_radius": g.rotor_radius,
        "axial_length": g.axial_length, "rotor_diameter": g.rotor_diameter,
        "slot_bottom_radius": g.slot_bottom_radius,
    }


def skew_echo(cfg: RunConfig) -> dict:
    s = cfg.skew
    return {"style": s.style.value, "segment_count": s.segment_count, "theta_skew_rad": s.total_angle}


def conventions() -> dict:
    return {"normalization": ONE_SIDED, "torque_orders": "cycles per mechanical revolution",
            "sign_convention": SIGN_CONVENTION}


def compare_analysis(reference: RunConfig, skewed: RunConfig, workers: int = 1) -> dict:
    ref = torque_analysis(reference, workers)
    skw = torque_analysis(skewed, workers)
    ref_spec: Spectrum1D = ref["spectrum"]
    skw_spec: Spectrum1D = skw["spectrum"]
    orders = skewed.orders or reference.orders or tuple(ratio_table(skw_spec, ref_spec))
    ratios = {int(o): suppression_ratio(skw_spec, ref_spec, o) for o in orders}
    theta, q = skewed.skew.total_angle, skewed.skew.segment_count
    predicted = None
    if skewed.skew.style is SkewStyle.STEP:
        predicted = {int(o): discrete_skew_factor(theta, q, o) for o in orders}
    return {"reference": ref, "skewed": skw, "orders": orders, "ratios": ratios, "predicted": predicted}
