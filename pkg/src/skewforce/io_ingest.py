"""
File formats: field-map CSV, slot-path CSV, spectrum CSV, summary JSON and
the sectioned run configuration.

All text is UTF-8 with LF line endings; floats are written with 17
significant digits so that reading them back is value-identical.
"""

from __future__ import annotations

import configparser
import csv
import math
import os
import re
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Optional, Union

import numpy as np

from .core import (
    AirGapFieldMap,
    MachineGeometry,
    ParseError,
    SkewConfiguration,
    SkewStyle,
    validate_geometry,
)
from .field_synth import Component, FieldHarmonic
from .mst import SlotPathField

Source = Union[str, os.PathLike, IO[str]]

FIELD_HEADER = ["slice", "itime", "itheta", "Br", "Btheta", "Bz"]
SLOT_HEADER = ["slice", "slot", "itime", "ipoint", "Br", "Btheta", "Bz"]
SPECTRUM_HEADER = ["m", "n", "amplitude", "phase"]


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def _open_text(source: Source):
    if hasattr(source, "read"):
        return source, False
    return open(source, "r", encoding="utf-8", newline=""), True


def _open_sink(sink):
    if hasattr(sink, "write"):
        return sink, False
    return open(sink, "w", encoding="utf-8", newline="\n"), True


# =============================================================================
# INDEXED GRID CSV (shared by field maps and slot paths)
# =============================================================================

def _read_indexed(source: Source, header: list, n_index: int, optional_last: bool):
    """
    Parse a dense, duplicate-free table keyed by ``n_index`` integer columns.
    Returns (dense arrays per value column, shape, last-column-present flag).
    """
    fh, close = _open_text(source)
    try:
        reader = csv.reader(fh)
        try:
            first = next(reader)
        except StopIteration:
            raise ParseError("empty file", line=1) from None
        first = [c.strip() for c in first]
        if first == header:
            ncol = len(header)
        elif optional_last and first == header[:-1]:
            ncol = len(header) - 1
        else:
            raise ParseError(f"header must be '{','.join(header)}'"
                             + (f" or '{','.join(header[:-1])}'" if optional_last else ""), line=1)

        keys, values, lines = [], [], []
        for row in reader:
            ln = reader.line_num
            if len(row) != ncol:
                raise ParseError(f"expected {ncol} fields, found {len(row)}", line=ln)
            try:
                idx = tuple(int(c) for c in row[:n_index])
            except ValueError:
                raise ParseError("index columns must be integers", line=ln) from None
            if any(i < 0 for i in idx):
                raise ParseError("negative index", line=ln)
            try:
                vals = [float(c) for c in row[n_index:]]
            except ValueError:
                raise ParseError("value columns must be decimal numbers", line=ln) from None
            if not all(math.isfinite(v) for v in vals):
                raise ParseError("non-finite value", line=ln)
            keys.append(idx)
            values.append(vals)
            lines.append(ln)
    finally:
        if close:
            fh.close()

    if not keys:
        raise ParseError("no data rows", line=2)
    idx = np.array(keys, dtype=np.int64)
    shape = tuple(int(v) + 1 for v in idx.max(axis=0))
    flat = np.ravel_multi_index(idx.T, shape)
    seen = np.full(int(np.prod(shape)), -1, dtype=np.int64)
    for row_no, f in enumerate(flat):
        if seen[f] >= 0:
            raise ParseError(f"duplicate index {keys[row_no]} (first seen on line {lines[seen[f]]})",
                             line=lines[row_no])
        seen[f] = row_no
    missing = np.flatnonzero(seen < 0)
    if missing.size:
        gap = tuple(int(v) for v in np.unravel_index(missing[0], shape))
        raise ParseError(f"missing row for index {gap} ({missing.size} missing in total)")
    vals = np.array(values, dtype=float)[seen]
    ncols = len(header) - n_index
    arrays = [vals[:, j].reshape(shape) if j < vals.shape[1] else np.zeros(shape) for j in range(ncols)]
    return arrays, shape, ncol == len(header)


def _write_indexed(sink, header: list, arrays: list) -> int:
    fh, close = _open_sink(sink)
    try:
        n = fh.write(",".join(header) + "\n")
        shape = arrays[0].shape
        for idx in np.ndindex(*shape):
            n += fh.write(",".join([str(i) for i in idx] + [fmt(a[idx]) for a in arrays]) + "\n")
        return n
    finally:
        if close:
            fh.close()


# =============================================================================
# FIELD MAPS
# =============================================================================

def read_field_csv(source: Source, axial_length: Optional[float] = None,
                   slice_spans: Optional[Iterable[float]] = None) -> AirGapFieldMap:
    """
    Read a field map with header ``slice,itime,itheta,Br,Btheta,Bz``.

    The Bz column may be omitted; it is then zero-filled and the map's
    metadata carries ``bz_absent``. Slices get equal shares of
    ``axial_length`` unless explicit ``slice_spans`` are given; with
    neither, each slice gets unit length and ``spans_assumed`` is set.
    """
    (br, bt, bz), shape, has_bz = _read_indexed(source, FIELD_HEADER, 3, optional_last=True)
    s, nt, na = shape
    if nt < 4 or na < 8:
        raise ParseError(f"grid of {nt} times x {na} angles is below the 4 x 8 minimum")
    meta = {"source": "csv", "bz_absent": not has_bz}
    if slice_spans is not None:
        spans = np.asarray(list(slice_spans), dtype=float)
        if spans.shape != (s,):
            raise ParseError(f"{spans.size} slice spans given for {s} slices")
    elif axial_length is not None:
        spans = np.full(s, axial_length / s)
    else:
        spans = np.ones(s)
        meta["spans_assumed"] = True
    return AirGapFieldMap(br, bt, bz, spans, metadata=meta)


def write_field_csv(field_map: AirGapFieldMap, sink) -> int:
    return _write_indexed(sink, FIELD_HEADER, [field_map.br, field_map.btheta, field_map.bz])


def read_slot_path_csv(source: Source) -> SlotPathField:
    """Slot-path samples, header ``slice,slot,itime,ipoint,Br,Btheta,Bz``; ipoint 0 is at r_delta."""
    (br, bt, bz), _, _ = _read_indexed(source, SLOT_HEADER, 4, optional_last=False)
    return SlotPathField(br, bt, bz)


def write_slot_path_csv(paths: SlotPathField, sink) -> int:
    return _write_indexed(sink, SLOT_HEADER, [paths.br, paths.btheta, paths.bz])


# =============================================================================
# SPECTRA AND SERIES
# =============================================================================

@dataclass(frozen=True)
class SpectrumTable:
    m: np.ndarray
    n: np.ndarray
    amplitude: np.ndarray
    phase: np.ndarray

    def __len__(self):
        return self.m.size


def write_spectrum_csv(spectrum, sink) -> int:
    """Write ``m,n,amplitude,phase`` rows from a Spectrum1D/2D (or any object with ``rows()``)."""
    rows = spectrum.rows() if hasattr(spectrum, "rows") else list(spectrum)
    fh, close = _open_sink(sink)
    try:
        n = fh.write(",".join(SPECTRUM_HEADER) + "\n")
        for m, order, amp, phase in rows:
            n += fh.write(f"{int(m)},{int(order)},{fmt(amp)},{fmt(phase)}\n")
        return n
    finally:
        if close:
            fh.close()


def read_spectrum_csv(source: Source) -> SpectrumTable:
    fh, close = _open_text(source)
    try:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != SPECTRUM_HEADER:
            raise ParseError(f"header must be '{','.join(SPECTRUM_HEADER)}'", line=1)
        ms, ns, amps, phases = [], [], [], []
        for row in reader:
            ln = reader.line_num
            if len(row) != 4:
                raise ParseError(f"expected 4 fields, found {len(row)}", line=ln)
            try:
                ms.append(int(row[0]))
                ns.append(int(row[1]))
                amps.append(float(row[2]))
                phases.append(float(row[3]))
            except ValueError:
                raise ParseError("malformed number", line=ln) from None
    finally:
        if close:
            fh.close()
    return SpectrumTable(np.array(ms, dtype=int), np.array(ns, dtype=int),
                         np.array(amps), np.array(phases))


def write_table_csv(sink, header: list, columns: list) -> int:
    """Plain numeric table; integer columns are written as integers."""
    fh, close = _open_sink(sink)
    try:
        n = fh.write(",".join(header) + "\n")
        for row in zip(*columns):
            n += fh.write(",".join(str(v) if isinstance(v, (int, np.integer)) else fmt(v) for v in row) + "\n")
        return n
    finally:
        if close:
            fh.close()


def _json(value, indent: int = 0) -> str:
    pad = "  " * (indent + 1)
    end = "  " * indent
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if not math.isfinite(value):
            return "null"
        return fmt(value)
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f'{pad}{_json(str(k))}: {_json(v, indent + 1)}' for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(value, (list, tuple, np.ndarray)):
        if len(value) == 0:
            return "[]"
        return "[" + ", ".join(_json(v, indent + 1) for v in value) + "]"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def write_summary_json(results: dict, sink) -> int:
    """Deterministic JSON (insertion-ordered keys, 17-digit floats, null for not-a-ratio)."""
    fh, close = _open_sink(sink)
    try:
        return fh.write(_json(results) + "\n")
    finally:
        if close:
            fh.close()


# =============================================================================
# RUN CONFIGURATION
# =============================================================================

_ANGLE = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z]*)\s*$")

_SCHEMA = {
    "geometry": {"pole_count": True, "slot_count": True, "airgap_radius": True, "rotor_radius": True,
                 "axial_length": True, "rotor_diameter": False, "slot_bottom_radius": False},
    "skew": {"style": False, "segment_count": False, "theta_skew": False, "continuous_resolution": False},
    "grid": {"time_samples": True, "angle_samples": True, "slices": False},
    "synthesis": None,  # harmonic_<label> keys
    "field_map": {"path": True, "interpolate": False},
    "evaluation": {"include_bz": False, "tooth_path": False, "slot_paths": False, "spectrum_mode": False,
                   "component": False, "orders": False, "output_dir": False},
}


@dataclass(frozen=True)
class RunConfig:
    geometry: MachineGeometry
    skew: SkewConfiguration
    time_samples: int
    angle_samples: int
    slices: int = 1
    harmonics: Optional[tuple] = None
    field_map_path: Optional[str] = None
    interpolate: bool = False
    include_bz: bool = False
    tooth_path: str = "one_section"
    slot_paths: Optional[str] = None
    spectrum_mode: str = "space_time"
    component: str = "radial"
    orders: tuple = ()
    output_dir: Optional[str] = None
    base_dir: str = "."

    def resolve(self, path: Optional[str]) -> Optional[str]:
        if path is None:
            return None
        return path if os.path.isabs(path) else os.path.normpath(os.path.join(self.base_dir, path))


def parse_angle(text: str, key: str = None) -> float:
    """'7.5 deg' -> radians; bare numbers and 'rad' are radians."""
    m = _ANGLE.match(text)
    if not m:
        raise ParseError(f"not an angle: '{text}'", key=key)
    value, unit = float(m.group(1)), m.group(2).lower()
    if unit in ("", "rad"):
        return value
    if unit == "deg":
        return math.radians(value)
    raise ParseError(f"unknown angle unit '{unit}' (use deg or rad)", key=key)


def _number(text: str, key: str, kind=float):
    try:
        if kind is int:
            return int(text.strip())
        v = float(text.strip())
    except ValueError:
        raise ParseError(f"expected {'an integer' if kind is int else 'a number'} in SI units, got '{text}'",
                         key=key) from None
    if not math.isfinite(v):
        raise ParseError("value must be finite", key=key)
    return v


def _bool(text: str, key: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "yes", "on", "1"):
        return True
    if t in ("false", "no", "off", "0"):
        return False
    raise ParseError(f"expected true/false, got '{text}'", key=key)


def _harmonic(text: str, key: str) -> FieldHarmonic:
    parts = text.split()
    # component m n amplitude [phase [unit]]
    if len(parts) < 4:
        raise ParseError("harmonic needs: component m n amplitude [phase]", key=key)
    try:
        comp = Component(parts[0].lower())
    except ValueError:
        raise ParseError(f"unknown component '{parts[0]}' (radial, tangential, axial)", key=key) from None
    m = _number(parts[1], key, int)
    n = _number(parts[2], key, int)
    amp = _number(parts[3], key)
    phase = parse_angle(" ".join(parts[4:]), key) if len(parts) > 4 else 0.0
    if amp < 0:
        raise ParseError("amplitude must be non-negative", key=key)
    return FieldHarmonic(comp, m, n, amp, phase)


def apply_overrides(parser: configparser.ConfigParser, overrides: Iterable[str]) -> None:
    for item in overrides:
        if "=" not in item:
            raise ParseError(f"override '{item}' must look like section.key=value")
        path, value = item.split("=", 1)
        if "." not in path:
            raise ParseError(f"override '{item}' must look like section.key=value")
        section, key = path.strip().split(".", 1)
        if not parser.has_section(section):
            parser.add_section(section)
        parser.set(section, key.strip(), value.strip())


def parse_config(text: str, overrides: Iterable[str] = (), base_dir: str = ".") -> RunConfig:
    """Parse the sectioned ``key = value`` run configuration (``#`` comments, SI units)."""
    parser = configparser.ConfigParser(comment_prefixes=("#",), inline_comment_prefixes=("#",),
                                       interpolation=None, delimiters=("=",))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ParseError(f"malformed config: {exc}") from None
    apply_overrides(parser, overrides)

    for section in parser.sections():
        if section not in _SCHEMA:
            raise ParseError(f"unknown section [{section}]", key=section)
        allowed = _SCHEMA[section]
        for key in parser[section]:
            if allowed is None:
                if not key.startswith("harmonic_"):
                    raise ParseError("synthesis keys must be named harmonic_<label>", key=f"{section}.{key}")
            elif key not in allowed:
                raise ParseError("unknown key", key=f"{section}.{key}")
        if allowed:
            for key, mandatory in allowed.items():
                if mandatory and key not in parser[section]:
                    raise ParseError("missing mandatory key", key=f"{section}.{key}")
    for section in ("geometry", "grid"):
        if not parser.has_section(section):
            raise ParseError(f"missing section [{section}]", key=section)

    has_synth = parser.has_section("synthesis")
    has_map = parser.has_section("field_map")
    if has_synth == has_map:
        raise ParseError("exactly one of [synthesis] or [field_map] must be present",
                         key="synthesis" if has_synth else "field_map")

    g = parser["geometry"]
    geom = MachineGeometry(
        pole_count=_number(g["pole_count"], "geometry.pole_count", int),
        slot_count=_number(g["slot_count"], "geometry.slot_count", int),
        airgap_radius=_number(g["airgap_radius"], "geometry.airgap_radius"),
        rotor_radius=_number(g["rotor_radius"], "geometry.rotor_radius"),
        axial_length=_number(g["axial_length"], "geometry.axial_length"),
        rotor_diameter=_number(g["rotor_diameter"], "geometry.rotor_diameter") if "rotor_diameter" in g else None,
        slot_bottom_radius=(_number(g["slot_bottom_radius"], "geometry.slot_bottom_radius")
                            if "slot_bottom_radius" in g else None),
    )
    problems = validate_geometry(geom)
    if problems:
        raise ParseError("; ".join(problems), key="geometry")

    s = parser["skew"] if parser.has_section("skew") else {}
    try:
        style = SkewStyle(s.get("style", "none").strip().lower())
    except ValueError:
        raise ParseError(f"unknown skew style '{s.get('style')}'", key="skew.style") from None
    theta_text = s.get("theta_skew", "0").strip()
    if theta_text.lower() == "optimal":
        from .skew import optimal_skew_angle
        theta = optimal_skew_angle(geom.pole_count, geom.slot_count)
    else:
        theta = parse_angle(theta_text, "skew.theta_skew")
    skew = SkewConfiguration(
        style=style,
        segment_count=_number(s.get("segment_count", "1"), "skew.segment_count", int),
        total_angle=theta,
        continuous_resolution=_number(s.get("continuous_resolution", "32"), "skew.continuous_resolution", int),
    )
    problems = skew.violations()
    if problems:
        raise ParseError("; ".join(problems), key="skew")

    gr = parser["grid"]
    nt = _number(gr["time_samples"], "grid.time_samples", int)
    na = _number(gr["angle_samples"], "grid.angle_samples", int)
    slices = _number(gr.get("slices", "1"), "grid.slices", int)
    if nt < 4 or na < 8 or slices < 1:
        raise ParseError("grid needs time_samples >= 4, angle_samples >= 8, slices >= 1", key="grid")

    harmonics = None
    map_path = None
    interpolate = False
    if has_synth:
        harmonics = tuple(_harmonic(v, f"synthesis.{k}") for k, v in parser["synthesis"].items())
    else:
        fm = parser["field_map"]
        map_path = fm["path"].strip()
        interpolate = _bool(fm.get("interpolate", "false"), "field_map.interpolate")

    e = parser["evaluation"] if parser.has_section("evaluation") else {}
    tooth_path = e.get("tooth_path", "one_section").strip().lower().replace("-", "_")
    if tooth_path not in ("one_section", "three_section"):
        raise ParseError(f"tooth_path must be one_section or three_section, got '{tooth_path}'",
                         key="evaluation.tooth_path")
    mode = e.get("spectrum_mode", "space_time").strip().lower()
    if mode not in ("space_time", "tooth_average"):
        raise ParseError(f"unknown spectrum mode '{mode}'", key="evaluation.spectrum_mode")
    component = e.get("component", "radial").strip().lower()
    if component not in ("radial", "tangential", "axial"):
        raise ParseError(f"unknown component '{component}'", key="evaluation.component")
    orders = ()
    if "orders" in e:
        orders = tuple(_number(o, "evaluation.orders", int) for o in e["orders"].split(",") if o.strip())

    return RunConfig(
        geometry=geom, skew=skew, time_samples=nt, angle_samples=na, slices=slices,
        harmonics=harmonics, field_map_path=map_path, interpolate=interpolate,
        include_bz=_bool(e.get("include_bz", "false"), "evaluation.include_bz"),
        tooth_path=tooth_path,
        slot_paths=e.get("slot_paths", "").strip() or None,
        spectrum_mode=mode, component=component, orders=orders,
        output_dir=e.get("output_dir", "").strip() or None,
        base_dir=base_dir,
    )


def load_config(path: Union[str, os.PathLike], overrides: Iterable[str] = ()) -> RunConfig:
    text = Path(path).read_text(encoding="utf-8")
    return parse_config(text, overrides, base_dir=str(Path(path).resolve().parent))
