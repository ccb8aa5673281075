"""Command-line front end.

Every command writes its artifacts into --out-dir (default from
TANKSIM_OUT_DIR, else the current directory) plus a JSON sidecar with the
full resolved configuration.  Outputs carry no timestamps, so re-running
a command byte-identically reproduces every artifact.

Exit codes: 0 success, 2 configuration error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from tanksim import beamtank, gmproc, mechmodel, refvalues, simulate, sloshfem
from tanksim import uplift as uplift_mod
from tanksim.model import (
    ScaleModel, TankSpec, UNANCHORED, bundled_spec, load_spec, spec_to_dict,
    validate,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

_NUMERIC_ERRORS = (
    sloshfem.EigenSolveError,
    beamtank.IterationError,
    simulate.NewtonError,
    uplift_mod.ContactError,
    uplift_mod.EquilibriumError,
    np.linalg.LinAlgError,
    ArithmeticError,
)


class ConfigError(ValueError):
    pass


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _write_csv(path: Path, header, columns) -> None:
    cols = [np.asarray(c, dtype=float) for c in columns]
    n = cols[0].size
    if any(c.size != n for c in cols):
        raise ValueError("column length mismatch")
    lines = [",".join(header)]
    for i in range(n):
        lines.append(",".join(_fmt(c[i]) for c in cols))
    path.write_text("\n".join(lines) + "\n")


def _write_sidecar(path: Path, config: dict) -> None:
    path.with_suffix(path.suffix + ".json").write_text(
        json.dumps(config, sort_keys=True, indent=2) + "\n")


def _resolve_spec(arg: str) -> TankSpec:
    if arg in ("slender", "broad"):
        return bundled_spec(arg)
    p = Path(arg)
    if not p.exists():
        raise ConfigError(f"spec {arg!r} is neither bundled nor an existing file")
    return load_spec(p)


def _check_spec(spec: TankSpec) -> None:
    problems = validate(spec)
    if problems:
        raise ConfigError("invalid spec: " + "; ".join(problems))


def _load_record(path: str, fmt: str) -> gmproc.GroundMotion:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"record file {path!r} does not exist")
    try:
        return gmproc.parse_record(p.read_text(), fmt, name=p.stem)
    except gmproc.RecordFormatError as exc:
        raise ConfigError(f"cannot parse {path!r} as {fmt}: {exc}") from exc


def _out_dir(args) -> Path:
    d = Path(args.out_dir)
    d.mkdir(parents=True, exist_ok=True)
    return d


def _config(args, **extra) -> dict:
    # out_dir and jobs are execution plumbing: they do not affect the
    # numbers, and keeping them out lets re-runs reproduce artifacts
    # byte-identically regardless of where or how parallel they ran
    cfg = {k: v for k, v in vars(args).items()
           if k not in ("func", "validate_only", "out_dir", "jobs")
           and v is not None}
    cfg.update(extra)
    return {"command": args.command, "config": cfg,
            "units": {"period": "s", "pressure": "Pa", "length": "m",
                      "acceleration": "m/s2"}}


# --------------------------------------------------------------------------
# subcommands


def cmd_modal(args) -> int:
    spec = _resolve_spec(args.spec)
    _check_spec(spec)
    if args.modes < 1:
        raise ConfigError("--modes must be >= 1")
    if args.validate_only:
        return EXIT_OK
    out = _out_dir(args)
    sidecar = _config(args, spec=spec_to_dict(spec))
    if args.method == "en":
        conv = mechmodel.convective_params(spec, args.modes)
        imp = mechmodel.impulsive_params(spec)
        _write_csv(out / "modal_en.csv",
                   ["mode", "period_s", "mass_kg", "height_m"],
                   [[0] + [m.index for m in conv],
                    [imp.period] + [m.period for m in conv],
                    [imp.mass] + [m.mass for m in conv],
                    [imp.height] + [m.height for m in conv]])
        _write_sidecar(out / "modal_en.csv", sidecar)
    elif args.method == "fe":
        if args.mesh_size <= 0:
            raise ConfigError("--mesh-size must be > 0")
        sol = sloshfem.sloshing_modes(spec.geometry, spec.liquid, spec.gravity,
                                      args.modes, target_size=args.mesh_size)
        _write_csv(out / "modal_fe.csv",
                   ["mode", "period_s", "omega2"],
                   [np.arange(1, args.modes + 1), sol.periods, sol.omega2])
        _write_sidecar(out / "modal_fe.csv", sidecar)
    else:  # beam
        mode = beamtank.impulsive_mode(spec)
        _write_csv(out / "modal_beam.csv",
                   ["mode", "period_s", "iterations"],
                   [[0], [mode.period], [mode.iterations]])
        _write_sidecar(out / "modal_beam.csv", sidecar)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    gm = _load_record(args.record, args.format)
    if not (0 <= args.damping < 1):
        raise ConfigError("--damping must lie in [0, 1)")
    if args.t_min <= 0 or args.t_max <= args.t_min or args.n_periods < 2:
        raise ConfigError("need 0 < --t-min < --t-max and --n-periods >= 2")
    if args.validate_only:
        return EXIT_OK
    periods = np.geomspace(args.t_min, args.t_max, args.n_periods)
    sa = gmproc.response_spectrum(gm, args.damping, periods, jobs=args.jobs)
    out = _out_dir(args)
    _write_csv(out / "spectrum.csv", ["period_s", "sa_m_s2"], [periods, sa])
    _write_sidecar(out / "spectrum.csv", _config(args))
    return EXIT_OK


def cmd_pressure_profile(args) -> int:
    spec = _resolve_spec(args.spec)
    _check_spec(spec)
    if args.points < 2:
        raise ConfigError("--points must be >= 2")
    if args.validate_only:
        return EXIT_OK
    zeta = np.linspace(0.0, 1.0, args.points)
    rigid = mechmodel.rigid_impulsive_pressure_profile(spec, zeta).pressure
    conv = [mechmodel.convective_pressure_profile(m, spec, zeta).pressure
            for m in mechmodel.convective_params(spec, args.modes)]
    header = ["zeta", "rigid_impulsive_pa_per_m_s2"]
    cols = [zeta, rigid]
    for i, c in enumerate(conv, start=1):
        header.append(f"convective_{i}_pa_per_m_s2")
        cols.append(c)
    header.append("combined_pa_per_m_s2")
    cols.append(rigid + np.sum(conv, axis=0))
    out = _out_dir(args)
    _write_csv(out / "pressure_profile.csv", header, cols)
    _write_sidecar(out / "pressure_profile.csv",
                   _config(args, spec=spec_to_dict(spec)))
    return EXIT_OK


def _uplift_spring(spec, max_rotation, samples):
    thetas = np.linspace(0.0, max_rotation, samples + 1)[1:]
    return uplift_mod.moment_rotation(spec, thetas)


def cmd_simulate(args) -> int:
    spec = _resolve_spec(args.spec)
    _check_spec(spec)
    gm = _load_record(args.record, args.format)
    if args.modes < 1:
        raise ConfigError("--modes must be >= 1")
    if args.uplift and spec.geometry.anchorage != UNANCHORED:
        raise ConfigError("--uplift requires an unanchored spec")
    if args.validate_only:
        return EXIT_OK
    spring = None
    if args.uplift:
        spring = _uplift_spring(spec, args.max_rotation, 14)
    system = simulate.assemble_system(spec, n_convective=args.modes,
                                      uplift=spring)
    history = simulate.newmark(system, gm, dt_sub=args.dt_sub)
    report = simulate.peak_report(history)

    out = _out_dir(args)
    header = ["time_s", "ground_accel_m_s2", "base_shear_n",
              "overturning_moment_nm", "wave_height_theta0_m",
              "wave_height_theta_pi_m"]
    cols = [history.time, history.ground_accel, history.base_shear,
            history.overturning_moment, history.wave_height[:, 0],
            history.wave_height[:, 1]]
    for i, z in enumerate(history.probe_heights):
        header.append(f"wall_pressure_zeta_{z:g}_pa")
        cols.append(history.wall_pressure[:, i])
    header += ["base_edge_pressure_pa", "uplift_plus_m", "uplift_minus_m",
               "energy_input_j", "energy_kinetic_j", "energy_strain_j",
               "energy_damped_j"]
    cols += [history.base_edge_pressure, history.uplift_edges[:, 0],
             history.uplift_edges[:, 1], history.energy["input"],
             history.energy["kinetic"], history.energy["strain"],
             history.energy["damped"]]
    _write_csv(out / "history.csv", header, cols)
    sidecar = _config(args, spec=spec_to_dict(spec))
    _write_sidecar(out / "history.csv", sidecar)

    peaks = {
        "sloshing_wave_height_m": report.wave_height,
        "sloshing_wave_height_time_s": report.wave_height_time,
        "uplift_displacement_m": report.uplift,
        "uplift_displacement_time_s": report.uplift_time,
        "base_shear_n": report.base_shear,
        "base_shear_time_s": report.base_shear_time,
        "overturning_moment_nm": report.overturning_moment,
        "overturning_moment_time_s": report.overturning_moment_time,
        "wall_pressure_peaks_pa": {
            f"zeta_{z:g}": float(p)
            for z, p in zip(report.probe_heights
                            if hasattr(report, "probe_heights")
                            else history.probe_heights, report.wall_pressure)},
        "freeboard_exceeded": report.freeboard_exceeded,
        "energy_residual": history.energy_residual,
    }
    (out / "peaks.json").write_text(
        json.dumps({**sidecar, "peaks": peaks}, sort_keys=True, indent=2) + "\n")
    return EXIT_OK


def cmd_uplift_curve(args) -> int:
    spec = _resolve_spec(args.spec)
    _check_spec(spec)
    if spec.geometry.anchorage != UNANCHORED:
        raise ConfigError("uplift-curve requires an unanchored spec")
    if args.max_uplift <= 0 or args.samples < 2:
        raise ConfigError("need --max-uplift > 0 and --samples >= 2")
    if args.validate_only:
        return EXIT_OK
    strip = uplift_mod.strip_for(spec, nodes=args.nodes)
    curve = uplift_mod.uplift_curve(strip, args.max_uplift,
                                    samples=args.samples)
    out = _out_dir(args)
    _write_csv(out / "uplift_curve.csv",
               ["edge_uplift_m", "edge_force_n_per_m", "uplifted_length_m",
                "peak_moment_nm_per_m"],
               [curve.uplift, curve.edge_force, curve.uplifted_length,
                curve.peak_moment])
    _write_sidecar(out / "uplift_curve.csv",
                   _config(args, spec=spec_to_dict(spec)))
    return EXIT_OK


def cmd_scale_record(args) -> int:
    gm = _load_record(args.record, args.format)
    if not (0 < args.scale):
        raise ConfigError("--scale must be > 0")
    if args.validate_only:
        return EXIT_OK
    scaled = gmproc.froude_scale(gm, ScaleModel(length_ratio=args.scale))
    out = _out_dir(args)
    path = out / "scaled_record.csv"
    path.write_text(gmproc.write_record(scaled, gmproc.TWO_COLUMN_CSV))
    _write_sidecar(path, _config(args, dt_in=gm.dt, dt_out=scaled.dt))
    return EXIT_OK


def cmd_report(args) -> int:
    spec = _resolve_spec(args.spec)
    _check_spec(spec)
    case = args.spec if args.spec in refvalues.MODAL_PERIODS else None
    if args.validate_only:
        return EXIT_OK
    conv = mechmodel.convective_params(spec, 3)
    imp = mechmodel.impulsive_params(spec)
    fe = sloshfem.sloshing_modes(spec.geometry, spec.liquid, spec.gravity, 3,
                                 target_size=args.mesh_size)
    beam = beamtank.impulsive_mode(spec)

    ref = refvalues.MODAL_PERIODS.get(case, None)
    rows = []

    def row(name, tool_en, tool_fe, ref_fe, ref_en):
        rows.append({"quantity": name, "tool_en": tool_en, "tool_fe": tool_fe,
                     "ref_fe": ref_fe, "ref_en": ref_en})

    row("impulsive_period_s", imp.period, beam.period,
        ref["fe"]["impulsive"] if ref else None,
        ref["en"]["impulsive"] if ref else None)
    for i, m in enumerate(conv):
        row(f"convective_period_{i + 1}_s", m.period, float(fe.periods[i]),
            ref["fe"]["convective"][i] if ref else None,
            ref["en"]["convective"][i] if ref else None)

    peaks = None
    if args.peaks:
        p = Path(args.peaks)
        if not p.exists():
            raise ConfigError(f"peaks file {args.peaks!r} does not exist")
        peaks = json.loads(p.read_text()).get("peaks", {})
    refp = refvalues.PEAK_RESPONSES.get(case, None)
    if refp:
        for record, vals in refp["wave_height"].items():
            rows.append({"quantity": f"peak_wave_height_{record}_m",
                         "tool_en": (peaks or {}).get("sloshing_wave_height_m"),
                         "tool_fe": None, "ref_fe": vals["fe"],
                         "ref_en": vals["spring_mass"], "ref_test": vals["test"]})
        for record, vals in refp["uplift"].items():
            rows.append({"quantity": f"peak_uplift_{record}_m",
                         "tool_en": (peaks or {}).get("uplift_displacement_m"),
                         "tool_fe": None, "ref_fe": vals["fe"],
                         "ref_en": vals["spring_mass"], "ref_test": vals["test"]})

    out = _out_dir(args)
    doc = _config(args, spec=spec_to_dict(spec))
    doc["material_assumptions"] = {
        "elastic_modulus_pa": spec.shell.elastic_modulus,
        "poisson_ratio": spec.shell.poisson_ratio,
        "shell_density_kg_m3": spec.shell.density,
        "note": "impulsive-period deviations depend on these assumed "
                "shell constants",
    }
    doc["rows"] = rows
    (out / "report.json").write_text(
        json.dumps(doc, sort_keys=True, indent=2) + "\n")
    return EXIT_OK


# --------------------------------------------------------------------------


def _add_common(p) -> None:
    p.add_argument("--out-dir",
                   default=os.environ.get("TANKSIM_OUT_DIR", "."),
                   help="artifact directory (env TANKSIM_OUT_DIR)")
    p.add_argument("--validate-only", action="store_true",
                   help="check the configuration and exit without computing")
    p.add_argument("--jobs", type=int, default=1,
                   help="max parallel workers where supported")
    p.add_argument("--seed", type=int, default=None,
                   help="reserved; all current algorithms are deterministic")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="tanksim",
        description="Seismic response of liquid-storage tanks: modal "
                    "parameters, sloshing FE modes, uplift mechanics and "
                    "reduced-order time histories.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("modal", help="modal periods (en | fe | beam)")
    p.add_argument("--spec", required=True)
    p.add_argument("--method", choices=("en", "fe", "beam"), default="en")
    p.add_argument("--modes", type=int, default=3)
    p.add_argument("--mesh-size", type=float, default=0.04)
    _add_common(p)
    p.set_defaults(func=cmd_modal)

    p = sub.add_parser("spectrum", help="pseudo-acceleration response spectrum")
    p.add_argument("--record", required=True)
    p.add_argument("--format", choices=gmproc.FORMATS,
                   default=gmproc.TWO_COLUMN_CSV)
    p.add_argument("--damping", type=float, default=0.05)
    p.add_argument("--t-min", type=float, default=0.02)
    p.add_argument("--t-max", type=float, default=4.0)
    p.add_argument("--n-periods", type=int, default=100)
    _add_common(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("pressure-profile", help="wall pressure vs height")
    p.add_argument("--spec", required=True)
    p.add_argument("--modes", type=int, default=3)
    p.add_argument("--points", type=int, default=101)
    _add_common(p)
    p.set_defaults(func=cmd_pressure_profile)

    p = sub.add_parser("simulate", help="reduced-order time history")
    p.add_argument("--spec", required=True)
    p.add_argument("--record", required=True)
    p.add_argument("--format", choices=gmproc.FORMATS,
                   default=gmproc.TWO_COLUMN_CSV)
    p.add_argument("--modes", type=int, default=3)
    p.add_argument("--uplift", action="store_true",
                   help="attach the nonlinear base-rotation spring")
    p.add_argument("--max-rotation", type=float, default=0.02,
                   help="rotation range of the uplift spring, rad")
    p.add_argument("--dt-sub", type=float, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("uplift-curve", help="edge force vs edge uplift")
    p.add_argument("--spec", required=True)
    p.add_argument("--max-uplift", type=float, default=0.02)
    p.add_argument("--samples", type=int, default=25)
    p.add_argument("--nodes", type=int, default=200)
    _add_common(p)
    p.set_defaults(func=cmd_uplift_curve)

    p = sub.add_parser("scale-record", help="Froude-scale a ground motion")
    p.add_argument("--record", required=True)
    p.add_argument("--format", choices=gmproc.FORMATS,
                   default=gmproc.TWO_COLUMN_CSV)
    p.add_argument("--scale", type=float, required=True,
                   help="model/prototype length ratio")
    _add_common(p)
    p.set_defaults(func=cmd_scale_record)

    p = sub.add_parser("report", help="combined modal/peak comparison table")
    p.add_argument("--spec", required=True)
    p.add_argument("--mesh-size", type=float, default=0.04)
    p.add_argument("--peaks", default=None,
                   help="peaks.json from a simulate run to fill tool columns")
    _add_common(p)
    p.set_defaults(func=cmd_report)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, gmproc.RecordFormatError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _NUMERIC_ERRORS as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
