"""
Command-line front end.

Exit codes: 0 success, 1 usage error, 2 data or validation error.
Angles given on the command line are degrees; config files default to radians.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .core import SkewForceError
from .io_ingest import (
    load_config,
    write_field_csv,
    write_spectrum_csv,
    write_summary_json,
    write_table_csv,
)
from .harmonics import order_amplitude
from .mst import axial_force_estimate
from .pipeline import (
    build_field,
    compare_analysis,
    conventions,
    geometry_echo,
    skew_echo,
    space_time_analysis,
    tooth_force_analysis,
    torque_analysis,
)
from .skew import discrete_skew_factor, harmonic_orders, optimal_skew_angle, skew_factor

log = logging.getLogger("skewforce")

OUTPUT_ENV = "SKEWFORCE_OUTPUT_DIR"
DEMO_PREFIX = "demo:"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def resolve_config_path(spec: str) -> Path:
    """``demo:<name>`` refers to a bundled demo config."""
    if spec.startswith(DEMO_PREFIX):
        name = spec[len(DEMO_PREFIX):]
        path = resources.files("skewforce") / "demos" / f"{name}.cfg"
        if not path.is_file():
            raise UsageError(f"no bundled demo named '{name}'")
        return Path(str(path))
    return Path(spec)


def _load(spec: str, overrides):
    return load_config(resolve_config_path(spec), overrides)


def _outdir(args, cfg=None) -> Path:
    out = args.out or (cfg.output_dir if cfg is not None else None) or os.environ.get(OUTPUT_ENV) or "skewforce_out"
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _report(paths):
    for p in paths:
        print(p)


# =============================================================================
# SUBCOMMANDS
# =============================================================================

def cmd_skew_table(args) -> int:
    lcm = math.lcm(args.poles, args.slots)
    theta = math.radians(args.theta) if args.theta is not None else optimal_skew_angle(args.poles, args.slots)
    qs = args.q
    header = (f"# poles={args.poles} slots={args.slots} lcm={lcm} "
              f"theta_skew_deg={math.degrees(theta):.15g} theta_skew_rad={theta:.17g}")
    if args.convention == "electrical":
        # factors use the electrical skew angle p*theta against the order nu
        theta = theta * (args.poles // 2)
        header += f" factor_angle=electrical({theta:.17g} rad)"
    lines = [header,
             ",".join(["g", "nu", "nu_float", "kappa_continuous"] + [f"kappa_step_q{q}" for q in qs])]
    for nu, g in harmonic_orders(args.poles, args.slots, args.g_max):
        row = [str(g), str(nu), format(float(nu), ".17g"), format(skew_factor(theta, nu), ".17g")]
        row += [format(discrete_skew_factor(theta, q, nu), ".17g") for q in qs]
        lines.append(",".join(row))
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.out:
        path = _outdir(args) / "skew_table.csv"
        path.write_text(text, encoding="utf-8")
    return 0


def cmd_synth(args) -> int:
    cfg = _load(args.config, args.set)
    field = build_field(cfg, args.workers)
    path = _outdir(args, cfg) / "field_map.csv"
    write_field_csv(field, path)
    _report([path])
    return 0


def _torque_files(out: Path, result: dict, prefix: str = "torque"):
    series = result["series"]
    nt = len(series)
    p1 = out / f"{prefix}.csv"
    write_table_csv(p1, ["itime", "rotor_angle_rad", "torque_Nm"],
                    [list(range(nt)), series.rotor_angle, series.torque])
    p2 = out / f"{prefix}_spectrum.csv"
    write_spectrum_csv(result["spectrum"], p2)
    return [p1, p2]


def _torque_summary(cfg, result) -> dict:
    return {
        "geometry": geometry_echo(cfg),
        "skew": skew_echo(cfg),
        "conventions": conventions(),
        "mean_torque": result["mean"],
        "peak_to_peak": result["peak_to_peak"],
        "amplitude": {f"order{o}": a for o, a in result["amplitudes"].items()},
    }


def cmd_torque(args) -> int:
    cfg = _load(args.config, args.set)
    result = torque_analysis(cfg, args.workers)
    out = _outdir(args, cfg)
    paths = _torque_files(out, result)
    summary = out / "torque_summary.json"
    write_summary_json(_torque_summary(cfg, result), summary)
    _report(paths + [summary])
    return 0


def cmd_tooth_forces(args) -> int:
    cfg = _load(args.config, args.set)
    path = args.path.replace("-", "_") if args.path else None
    forces = tooth_force_analysis(cfg, args.workers, path)
    out = _outdir(args, cfg)
    s, ns, nt = forces.radial_slices.shape
    teeth, times = np.meshgrid(np.arange(ns), np.arange(nt), indexing="ij")
    p1 = out / "tooth_forces.csv"
    write_table_csv(p1, ["tooth", "itime", "Fr_N", "Ft_N", "Fz_N"],
                    [[int(v) for v in teeth.ravel()], [int(v) for v in times.ravel()],
                     forces.radial.ravel(), forces.tangential.ravel(), forces.axial.ravel()])
    p2 = out / "tooth_forces_slices.csv"
    idx = np.indices((s, ns, nt)).reshape(3, -1)
    write_table_csv(p2, ["slice", "tooth", "itime", "Fr_N", "Ft_N", "Fz_N"],
                    [[int(v) for v in idx[0]], [int(v) for v in idx[1]], [int(v) for v in idx[2]],
                     forces.radial_slices.ravel(), forces.tangential_slices.ravel(),
                     forces.axial_slices.ravel()])
    _report([p1, p2])
    return 0


def cmd_spectrum2d(args) -> int:
    cfg = _load(args.config, args.set)
    spec = space_time_analysis(cfg, args.workers, args.component, args.mode)
    out = _outdir(args, cfg)
    path = out / f"spectrum2d_{args.component or cfg.component}.csv"
    write_spectrum_csv(spec, path)
    _report([path])
    return 0


def cmd_axial_force(args) -> int:
    theta = math.radians(args.theta)
    fz = axial_force_estimate(args.torque, args.diameter, theta)
    print("torque_Nm,diameter_m,theta_skew_deg,axial_force_N")
    print(",".join(format(v, ".17g") for v in (args.torque, args.diameter, args.theta, fz)))
    return 0


def cmd_compare(args) -> int:
    ref_cfg = _load(args.reference, args.set)
    skw_cfg = _load(args.skewed, args.set)
    result = compare_analysis(ref_cfg, skw_cfg, args.workers)
    out = _outdir(args, skw_cfg)
    paths = _torque_files(out, result["reference"], "reference_torque")
    paths += _torque_files(out, result["skewed"], "skewed_torque")

    orders = list(result["orders"])
    ref_amp = [order_amplitude(result["reference"]["spectrum"], o) for o in orders]
    skw_amp = [order_amplitude(result["skewed"]["spectrum"], o) for o in orders]
    ratios = [result["ratios"][o] for o in orders]
    ratio_path = out / "suppression_ratios.csv"
    cols = [orders, ref_amp, skw_amp, [float("nan") if r is None else r for r in ratios]]
    header = ["order", "reference_amplitude", "skewed_amplitude", "ratio"]
    if result["predicted"] is not None:
        header.append("discrete_skew_factor")
        cols.append([result["predicted"][o] for o in orders])
    write_table_csv(ratio_path, header, cols)

    summary = {
        "reference": _torque_summary(ref_cfg, result["reference"]),
        "skewed": _torque_summary(skw_cfg, result["skewed"]),
        "conventions": conventions(),
        "suppression_ratio": {f"order{o}": r for o, r in result["ratios"].items()},
    }
    if result["predicted"] is not None:
        summary["predicted_discrete_skew_factor"] = {f"order{o}": v for o, v in result["predicted"].items()}
    summary_path = out / "compare_summary.json"
    write_summary_json(summary, summary_path)
    _report(paths + [ratio_path, summary_path])
    return 0


# =============================================================================
# ARGUMENT PARSING
# =============================================================================

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help=f"output directory (default: config, ${OUTPUT_ENV}, ./skewforce_out)")
    common.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                        help="override a config value after the file is parsed")
    common.add_argument("--workers", type=int, default=1, help="worker threads (results do not depend on it)")
    common.add_argument("-v", "--verbose", action="count", default=0)

    p = _Parser(prog="skewforce", description="Skew factors, MST torque/tooth forces and spectra.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)

    s = sub.add_parser("skew-table", parents=[common], help="tabulate skew angle, orders and skew factors")
    s.add_argument("--poles", type=int, required=True)
    s.add_argument("--slots", type=int, required=True)
    s.add_argument("--g-max", type=int, default=2)
    s.add_argument("--q", type=int, nargs="+", default=[2, 3], help="segment counts for discrete factors")
    s.add_argument("--theta", type=float, help="skew angle in degrees (default: 360/lcm)")
    s.add_argument("--convention", choices=["as-given", "electrical"], default="as-given",
                   help="evaluate factors at theta*nu (as-given) or at pole_pairs*theta*nu (electrical)")
    s.set_defaults(func=cmd_skew_table)

    for name, func, helptext in (("synth", cmd_synth, "write the (shifted) field map as CSV"),
                                 ("torque", cmd_torque, "torque series, spectrum and ripple summary")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("--config", required=True, help="config file or demo:<name>")
        s.set_defaults(func=func)

    s = sub.add_parser("tooth-forces", parents=[common], help="per-tooth force series")
    s.add_argument("--config", required=True)
    s.add_argument("--path", choices=["one-section", "three-section"])
    s.set_defaults(func=cmd_tooth_forces)

    s = sub.add_parser("spectrum2d", parents=[common], help="space-time spectrum of tooth forces")
    s.add_argument("--config", required=True)
    s.add_argument("--component", choices=["radial", "tangential", "axial"])
    s.add_argument("--mode", choices=["space_time", "tooth_average"])
    s.set_defaults(func=cmd_spectrum2d)

    s = sub.add_parser("axial-force", parents=[common], help="axial force from torque and skew angle")
    s.add_argument("--torque", type=float, required=True, help="N*m")
    s.add_argument("--diameter", type=float, required=True, help="rotor diameter, m")
    s.add_argument("--theta", type=float, required=True, help="skew angle, degrees")
    s.set_defaults(func=cmd_axial_force)

    s = sub.add_parser("compare", parents=[common], help="suppression ratios of a skewed vs reference run")
    s.add_argument("--reference", required=True)
    s.add_argument("--skewed", required=True)
    s.set_defaults(func=cmd_compare)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 1
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"skewforce: error: {exc}", file=sys.stderr)
        return 1
    except (SkewForceError, OSError) as exc:
        print(f"skewforce: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
