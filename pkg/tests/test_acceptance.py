"""Acceptance gate: one test per criterion, each printing a PASS/FAIL
line (run with -s to see them).  Reference values are the bundled
benchmark constants (EN 1998-4 formula column, detailed-FE column, and
shake-table peaks for the broad tank)."""

import json
import math
import os
import time
from pathlib import Path

import numpy as np
import pytest

from tanksim import (
    beamtank, bessel, cli, mechmodel, refvalues, simulate, sloshfem, uplift,
)
from tanksim.gmproc import (
    GroundMotion, TWO_COLUMN_CSV, parse_record, write_record,
)
from tanksim.model import ScaleModel, bundled_spec, liquid_mass, total_mass

from conftest import make_sine


def report(num, ok, detail):
    print(f"ACCEPTANCE {num}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, detail


def analytic_period(geom, n_root, g):
    lam = bessel.j1prime_roots(n_root)[n_root - 1]
    gamma = geom.fill_height / geom.radius
    return 2.0 * math.pi / math.sqrt((g * lam / geom.radius)
                                     * math.tanh(lam * gamma))


def test_criterion_1_convective_periods_formula():
    start = time.perf_counter()
    refs = {case: refvalues.MODAL_PERIODS[case]["en"]["convective"]
            for case in ("slender", "broad")}
    worst = 0.0
    for case, ref in refs.items():
        modes = mechmodel.convective_params(bundled_spec(case), 3)
        for mode, r in zip(modes, ref):
            worst = max(worst, abs(mode.period - r) / r)
    elapsed = time.perf_counter() - start
    ok = worst < 0.002 and elapsed < 1.0
    report(1, ok, f"convective periods vs EN column: worst dev "
                  f"{100 * worst:.3f}% (< 0.2%), runtime {elapsed:.2f}s (< 1s)")


def test_criterion_2_convective_periods_fe():
    start = time.perf_counter()
    worst_1 = worst_3 = 0.0
    for case in ("slender", "broad"):
        spec = bundled_spec(case)
        sol = sloshfem.sloshing_modes(spec.geometry, spec.liquid,
                                      spec.gravity, 3, target_size=0.02)
        for i in range(3):
            ref = analytic_period(spec.geometry, i + 1, spec.gravity)
            dev = abs(sol.periods[i] - ref) / ref
            if i == 0:
                worst_1 = max(worst_1, dev)
            worst_3 = max(worst_3, dev)
    # refinement study on the broad tank, fundamental mode
    spec = bundled_spec("broad")
    lam = bessel.j1prime_roots(1)[0]
    gamma = spec.geometry.slenderness
    ref_w2 = (spec.gravity * lam / spec.geometry.radius) \
        * math.tanh(lam * gamma)
    errs = []
    for h in (0.16, 0.08, 0.04):
        sol = sloshfem.sloshing_modes(spec.geometry, spec.liquid,
                                      spec.gravity, 1, target_size=h)
        errs.append(abs(sol.omega2[0] - ref_w2) / ref_w2)
    order = math.log(errs[0] / errs[2]) / math.log(4.0)
    elapsed = time.perf_counter() - start
    ok = (worst_1 < 0.005 and worst_3 < 0.015
          and errs[0] > errs[1] > errs[2] and order >= 1.9
          and elapsed < 30.0)
    report(2, ok, f"FE periods at 0.02 m: mode-1 dev {100 * worst_1:.3f}% "
                  f"(< 0.5%), worst dev {100 * worst_3:.3f}% (< 1.5%); "
                  f"refinement errors {['%.2e' % e for e in errs]} "
                  f"order {order:.2f} (>= 1.9); runtime {elapsed:.1f}s (< 30s)")


def test_criterion_3_impulsive_periods():
    lines = []
    ok = True
    for case in ("slender", "broad"):
        spec = bundled_spec(case)
        ref_en = refvalues.MODAL_PERIODS[case]["en"]["impulsive"]
        ref_fe = refvalues.MODAL_PERIODS[case]["fe"]["impulsive"]
        t_en = mechmodel.impulsive_params(spec).period
        t_beam = beamtank.impulsive_mode(spec).period
        dev_en = abs(t_en - ref_en) / ref_en
        dev_beam = abs(t_beam - ref_fe) / ref_fe
        ok = ok and dev_en < 0.20 and dev_beam < 0.25
        lines.append(
            f"{case}: EN {t_en:.4f}s vs {ref_en} ({100 * dev_en:.1f}%, "
            f"< 20%), beam {t_beam:.4f}s vs {ref_fe} "
            f"({100 * dev_beam:.1f}%, < 25%) assuming "
            f"E={spec.shell.elastic_modulus:.3g} Pa, "
            f"nu={spec.shell.poisson_ratio}, "
            f"rho={spec.shell.density} kg/m3")
    report(3, ok, "; ".join(lines))


def test_criterion_4_pressure_profile_structure():
    start = time.perf_counter()
    # broad tank: peak wall pressure from an actual run decreases
    # monotonically from bottom to top (impulsive-dominated)
    broad = bundled_spec("broad")
    system = simulate.assemble_system(broad, n_convective=3)
    gm = make_sine(2.0, 3.0, 4.0, 0.002)
    probes = np.linspace(0.0, 0.95, 30)
    hist = simulate.newmark(system, gm, probe_heights=probes)
    peak_p = np.max(np.abs(hist.wall_pressure), axis=0)
    monotone = bool(np.all(np.diff(peak_p) < 0))

    # slender tank: flexible-wall impulsive profile peaks above the base
    slender = bundled_spec("slender")
    mode = beamtank.impulsive_mode(slender)
    zeta = np.linspace(0.0, 1.0, 201)
    shape = lambda z: float(np.interp(z, mode.zeta, mode.shape))
    p_flex = mechmodel.flexible_impulsive_pressure_profile(
        slender, shape, zeta).pressure
    zeta_peak = float(zeta[int(np.argmax(p_flex))])

    # rigid resultant self-consistency
    worst_res = 0.0
    for case in ("slender", "broad"):
        spec = bundled_spec(case)
        grid = np.linspace(0.0, 1.0, 801)
        prof = mechmodel.rigid_impulsive_pressure_profile(spec, grid)
        m_i = mechmodel.impulsive_params(spec).mass
        worst_res = max(worst_res,
                        abs(mechmodel.wall_resultant(prof, spec) - m_i) / m_i)
    elapsed = time.perf_counter() - start
    ok = monotone and zeta_peak > 0.1 and worst_res < 0.02 and elapsed < 5.0
    report(4, ok, f"broad peak-pressure profile monotone: {monotone}; "
                  f"slender flexible peak at zeta {zeta_peak:.2f} (> 0.1); "
                  f"rigid resultant dev {100 * worst_res:.2f}% (< 2%); "
                  f"runtime {elapsed:.1f}s (< 5s)")


def test_criterion_5_response_properties():
    slender = bundled_spec("slender")

    # (a) resonant-sine steady state vs SDOF closed form
    sys1 = simulate.assemble_system(slender, n_convective=1)
    m1 = sys1.modes[0]
    xi, amp = 0.005, 0.5
    duration = 6.0 / (xi * m1.omega)
    gm = make_sine(1.0 / m1.period, amp, duration, m1.period / 60.0)
    h = simulate.newmark(sys1, gm, dt_sub=gm.dt)
    steady = amp / (2.0 * xi * m1.omega ** 2)
    got = float(np.max(np.abs(
        h.displacements[h.time > 0.8 * duration, 1])))
    dev_a = abs(got - steady) / steady

    # (b) log decrement of the impulsive DOF
    imp = sys1.impulsive
    gm0 = GroundMotion(dt=imp.period / 100.0, accel=np.zeros(2000))
    hf = simulate.newmark(sys1, gm0, dt_sub=gm0.dt,
                          u0=np.array([1e-3, 0.0]))
    u = hf.displacements[:, 0]
    pk = [i for i in range(1, u.size - 1)
          if u[i] > u[i - 1] and u[i] > u[i + 1]]
    xi_est = math.log(u[pk[0]] / u[pk[10]]) / (10 * 2.0 * math.pi)
    dev_b = abs(xi_est - 0.02) / 0.02

    # (c) energy ledger, linear and uplift runs
    res_lin = simulate.newmark(
        simulate.assemble_system(slender, n_convective=2),
        make_sine(3.0, 2.0, 6.0, 0.005)).energy_residual
    broad = bundled_spec("broad")
    mr = uplift.moment_rotation(broad, np.linspace(0, 0.02, 13)[1:])
    res_up = simulate.newmark(
        simulate.assemble_system(broad, n_convective=2, uplift=mr),
        make_sine(2.0, 3.0, 4.0, 0.002)).energy_residual

    # (d) Froude end-to-end similitude
    import dataclasses
    from tanksim.gmproc import froude_scale
    from tanksim.model import TankGeometry
    lam = 0.25
    g = slender.geometry
    scaled = dataclasses.replace(
        slender,
        geometry=TankGeometry(
            radius=lam * g.radius, fill_height=lam * g.fill_height,
            total_height=lam * g.total_height,
            shell_thickness=lam * g.shell_thickness,
            bottom_thickness=lam * g.bottom_thickness,
            anchorage=g.anchorage),
        shell=dataclasses.replace(
            slender.shell, elastic_modulus=lam * slender.shell.elastic_modulus),
        empty_mass=lam ** 3 * slender.empty_mass, scale=None)
    gm_p = make_sine(0.7, 1.5, 6.0, 0.01)
    gm_m = froude_scale(gm_p, ScaleModel(length_ratio=lam))
    eta_p = simulate.newmark(simulate.assemble_system(slender, 2), gm_p,
                             dt_sub=gm_p.dt).wave_height[:, 0]
    eta_m = simulate.newmark(simulate.assemble_system(scaled, 2), gm_m,
                             dt_sub=gm_m.dt).wave_height[:, 0]
    dev_d = float(np.max(np.abs(eta_m - lam * eta_p))
                  / (lam * np.max(np.abs(eta_p))))

    ok = dev_a < 0.02 and dev_b < 0.05 and res_lin < 0.01 \
        and res_up < 0.01 and dev_d < 0.01
    report(5, ok,
           f"(a) resonant steady state dev {100 * dev_a:.2f}% (< 2%); "
           f"(b) damping recovered {xi_est:.4f} dev {100 * dev_b:.1f}% "
           f"(< 5%); (c) energy residual linear {res_lin:.1e}, uplift "
           f"{res_up:.1e} (< 1%); (d) similitude dev {100 * dev_d:.2f}% "
           f"(< 1%)")
    _conditional_table2_checks(mr)


def _conditional_table2_checks(mr):
    """Non-gating: peak checks against the shake-table benchmark when the
    user supplies the scaled Chi-Chi / Northridge records."""
    rec_dir = os.environ.get("TANKSIM_RECORDS_DIR")
    if not rec_dir:
        print("ACCEPTANCE 5 (conditional): SKIPPED - set TANKSIM_RECORDS_DIR "
              "to a directory with chi_chi.* / northridge.* two-column "
              "records to compare Table-style peaks (non-gating)")
        return
    broad = bundled_spec("broad")
    refs = refvalues.PEAK_RESPONSES["broad"]
    for stem, quantity, ref, tol in (
            ("chi_chi", "wave_height",
             refs["wave_height"]["chi_chi"]["spring_mass"], 0.25),
            ("northridge", "uplift",
             refs["uplift"]["northridge"]["spring_mass"], 0.30)):
        matches = sorted(Path(rec_dir).glob(stem + ".*"))
        if not matches:
            print(f"ACCEPTANCE 5 (conditional): no {stem} record found")
            continue
        gm = parse_record(matches[0].read_text(), TWO_COLUMN_CSV,
                          name=stem)
        system = simulate.assemble_system(
            broad, n_convective=3,
            uplift=mr if quantity == "uplift" else None)
        rep = simulate.peak_report(simulate.newmark(system, gm))
        got = rep.wave_height if quantity == "wave_height" else rep.uplift
        dev = abs(got - ref) / ref
        status = "within" if dev < tol else "OUTSIDE"
        print(f"ACCEPTANCE 5 (conditional): {stem} {quantity} "
              f"{got:.4f} m vs {ref} m -> {100 * dev:.0f}% {status} "
              f"{100 * tol:.0f}% (non-gating)")


def test_criterion_6_uplift_mechanics():
    start = time.perf_counter()
    broad = bundled_spec("broad")
    strip = uplift.strip_for(broad, nodes=200, restraint=uplift.PINNED,
                             max_uplift=0.02)
    worst_p = worst_l = worst_c = 0.0
    for w in np.geomspace(5e-5, 0.016, 8):
        sol = uplift.solve_strip(strip, w)
        p_ref, l_ref = uplift.closed_form_pinned(strip, w)
        worst_p = max(worst_p, abs(sol.edge_force - p_ref) / p_ref)
        worst_l = max(worst_l, abs(sol.uplifted_length - l_ref) / l_ref)
        worst_c = max(worst_c, sol.complementarity)
    curve = uplift.moment_rotation(broad, np.linspace(0, 0.02, 13)[1:],
                                   sectors=72)
    monotone = bool(np.all(np.diff(curve.moment) > 0))
    worst_eq = float(np.max(curve.equilibrium_residual))
    elapsed = time.perf_counter() - start
    ok = (worst_p < 0.01 and worst_l < 0.01 and worst_c < 1e-10
          and monotone and worst_eq < 0.005 and elapsed < 10.0)
    report(6, ok, f"strip vs closed form: P dev {100 * worst_p:.2f}%, "
                  f"l dev {100 * worst_l:.2f}% (< 1%); complementarity "
                  f"{worst_c:.1e} (< 1e-10); M-theta monotone {monotone}, "
                  f"equilibrium residual {100 * worst_eq:.3f}% (< 0.5%); "
                  f"runtime {elapsed:.1f}s (< 10s)")


def test_criterion_7_mass_closure():
    details = []
    ok = True
    for case, ref_total in (("slender", 16.4e3), ("broad", 5.6e3)):
        spec = bundled_spec(case)
        modes = mechmodel.convective_params(spec, 50)
        m_i = mechmodel.impulsive_params(spec).mass
        closure = abs(m_i + sum(m.mass for m in modes)
                      - liquid_mass(spec)) / liquid_mass(spec)
        total_dev = abs(total_mass(spec) - ref_total) / ref_total
        ok = ok and closure < 0.005 and total_dev < 0.02
        details.append(f"{case}: closure dev {100 * closure:.3f}% (< 0.5%), "
                       f"total {total_mass(spec) / 1e3:.2f} t vs "
                       f"{ref_total / 1e3} t ({100 * total_dev:.1f}%, < 2%)")
    report(7, ok, "; ".join(details))


def test_criterion_8_cli_determinism(tmp_path):
    rec = tmp_path / "sine.csv"
    rec.write_text(write_record(make_sine(2.0, 1.5, 3.0, 0.01),
                                TWO_COLUMN_CSV))

    def run_twice(args, jobs_pair=(1, 1)):
        outs = []
        for i, jobs in enumerate(jobs_pair):
            d = tmp_path / f"{args[0]}_{i}"
            code = cli.main(args + ["--out-dir", str(d),
                                    "--jobs", str(jobs)])
            assert code == 0
            outs.append({p.name: p.read_bytes() for p in sorted(d.iterdir())})
        return outs[0] == outs[1]

    same_modal = run_twice(["modal", "--spec", "broad", "--method", "fe",
                            "--mesh-size", "0.05"])
    same_spec = run_twice(["spectrum", "--record", str(rec),
                           "--n-periods", "24"], jobs_pair=(1, 4))
    same_sim = run_twice(["simulate", "--spec", "broad", "--record",
                          str(rec), "--modes", "2"])
    ok = same_modal and same_spec and same_sim
    report(8, ok, f"byte-identical re-runs: modal-fe {same_modal}, "
                  f"spectrum jobs 1 vs 4 {same_spec}, simulate {same_sim}")
