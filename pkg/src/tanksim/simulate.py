"""Nonlinear time-history engine for the reduced spring-mass tank model.

DOFs: impulsive displacement, N convective displacements, and (for
unanchored tanks) a base rotation restrained by the nonlinear
moment-rotation spring.  Constant-average-acceleration Newmark with a
Newton inner loop on the rotation spring; anchored systems take the
linear path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from tanksim import mechmodel
from tanksim.gmproc import GroundMotion
from tanksim.model import TankSpec, UNANCHORED, require_valid
from tanksim.uplift import MomentRotationCurve


class NewtonError(RuntimeError):
    pass


@dataclass(frozen=True)
class ReducedSystem:
    spec: TankSpec
    masses: np.ndarray          # [m_i, m_c1..m_cN], kg
    heights: np.ndarray         # resultant heights, m
    omegas: np.ndarray          # rad/s per translational DOF
    dampers: np.ndarray         # c_n, N s/m
    modes: tuple                # ConvectiveMode per convective DOF
    impulsive: object           # ImpulsiveComponent
    uplift: MomentRotationCurve | None = None
    theta_damper: float = 0.0   # N m s/rad
    shell_mass: float = 0.0     # kg, empty structure rocking with the base
    shell_moment: float = 0.0   # kg m, its first moment about the base
    shell_inertia: float = 0.0  # kg m^2, its second moment about the base

    @property
    def n_conv(self) -> int:
        return self.masses.size - 1

    @property
    def has_theta(self) -> bool:
        return self.uplift is not None

    @property
    def ndof(self) -> int:
        return self.masses.size + (1 if self.has_theta else 0)

    def mass_matrix(self) -> np.ndarray:
        m = np.diag(self.masses)
        if not self.has_theta:
            return m
        n = self.masses.size
        full = np.zeros((n + 1, n + 1))
        full[:n, :n] = m
        mh = self.masses * self.heights
        full[:n, n] = mh
        full[n, :n] = mh
        full[n, n] = float(np.sum(self.masses * self.heights ** 2)) \
            + self.shell_inertia
        return full

    def damping_matrix(self) -> np.ndarray:
        d = list(self.dampers)
        if self.has_theta:
            d.append(self.theta_damper)
        return np.diag(d)

    def linear_stiffness(self) -> np.ndarray:
        k = list(self.masses * self.omegas ** 2)
        if self.has_theta:
            k.append(0.0)  # theta restoring comes from the nonlinear spring
        return np.diag(k)

    def influence(self) -> np.ndarray:
        iota = np.ones(self.ndof)
        if self.has_theta:
            iota[-1] = 0.0
        return iota

    def load_pattern(self) -> np.ndarray:
        """Vector multiplying -a_g on the right-hand side."""
        p = self.mass_matrix() @ self.influence()
        if self.has_theta:
            p[-1] += self.shell_moment
        return p


@dataclass(frozen=True)
class ResponseHistory:
    time: np.ndarray
    displacements: np.ndarray   # (nstep, ndof)
    velocities: np.ndarray
    accelerations: np.ndarray
    ground_accel: np.ndarray
    base_shear: np.ndarray      # N
    overturning_moment: np.ndarray  # N m, just above the base
    wave_height: np.ndarray     # (nstep, 2): theta = 0 and pi, m
    wall_pressure: np.ndarray   # (nstep, nprobe), Pa, dynamic part
    base_edge_pressure: np.ndarray  # Pa, dynamic part at zeta = 0
    uplift_edges: np.ndarray    # (nstep, 2) m
    energy: dict                # input/kinetic/strain/damped series, J
    probe_heights: np.ndarray   # zeta of the wall pressure probes
    system: ReducedSystem

    @property
    def energy_residual(self) -> float:
        e = self.energy
        total = e["kinetic"] + e["strain"] + e["damped"]
        peak = float(np.max(np.abs(e["input"])))
        if peak == 0.0:
            return 0.0
        return float(np.max(np.abs(e["input"] - total))) / peak


@dataclass(frozen=True)
class PeakReport:
    wave_height: float          # m
    wave_height_time: float
    uplift: float               # m
    uplift_time: float
    base_shear: float           # N
    base_shear_time: float
    overturning_moment: float   # N m
    overturning_moment_time: float
    wall_pressure: np.ndarray   # per probe, Pa
    freeboard_exceeded: bool


def assemble_system(spec: TankSpec, n_convective: int = 3,
                    uplift: MomentRotationCurve | None = None,
                    structural_damping: float = mechmodel.STRUCTURAL_DAMPING,
                    convective_damping: float = mechmodel.CONVECTIVE_DAMPING,
                    ) -> ReducedSystem:
    require_valid(spec)
    if n_convective < 1:
        raise ValueError("n_convective must be >= 1")
    if uplift is not None and spec.geometry.anchorage != UNANCHORED:
        raise ValueError("uplift spring supplied for an anchored tank")
    modes = mechmodel.convective_params(spec, n_convective)
    imp = mechmodel.impulsive_params(spec)
    masses = np.array([imp.mass] + [m.mass for m in modes])
    heights = np.array([imp.height] + [m.height for m in modes])
    omegas = np.array([imp.omega] + [m.omega for m in modes])
    # mass-proportional damping a0 = 2 xi omega_ref at the impulsive
    # frequency for the structure-carried DOF; convective DOFs take their
    # own (much lighter) modal damping
    a0 = 2.0 * structural_damping * imp.omega
    dampers = np.array(
        [a0 * imp.mass]
        + [2.0 * convective_damping * m.omega * m.mass for m in modes])
    # the empty structure rocks rigidly with the base; model it as a
    # uniform line mass over the shell height (regularizes the rocking
    # inertia, which would otherwise be a linear combination of the
    # translational rows)
    m_s = spec.empty_mass
    ht = spec.geometry.total_height
    shell_moment = m_s * ht / 2.0
    shell_inertia = m_s * ht ** 2 / 3.0
    i_theta = float(np.sum(masses * heights ** 2)) + shell_inertia
    return ReducedSystem(spec=spec, masses=masses, heights=heights,
                         omegas=omegas, dampers=dampers, modes=tuple(modes),
                         impulsive=imp, uplift=uplift,
                         theta_damper=a0 * i_theta,
                         shell_mass=m_s, shell_moment=shell_moment,
                         shell_inertia=shell_inertia)


def _theta_spring(curve: MomentRotationCurve):
    """Odd-symmetric monotone interpolant of the moment-rotation samples,
    linearly extended past the last sample."""
    th = np.asarray(curve.rotation, dtype=float)
    mo = np.asarray(curve.moment, dtype=float)
    if th[0] > 0.0:
        th = np.concatenate([[0.0], th])
        mo = np.concatenate([[0.0], mo])
    interp = PchipInterpolator(th, mo, extrapolate=False)
    dinterp = interp.derivative()
    end_slope = float(dinterp(th[-1]))

    def moment(t):
        a = abs(t)
        if a <= th[-1]:
            m = float(interp(a))
        else:
            m = mo[-1] + end_slope * (a - th[-1])
        return math.copysign(m, t) if t != 0 else 0.0

    def tangent(t):
        a = abs(t)
        if a <= th[-1]:
            return max(float(dinterp(a)), 0.0)
        return max(end_slope, 0.0)

    return moment, tangent


def _pressure_maps(system: ReducedSystem, probe_heights):
    spec = system.spec
    zeta = np.asarray(probe_heights, dtype=float)
    grid = np.concatenate([zeta, [0.0, 1.0]])
    rigid = mechmodel.rigid_impulsive_pressure_profile(spec, grid).pressure
    conv = [mechmodel.convective_pressure_profile(m, spec, grid).pressure
            for m in system.modes]
    conv_arr = np.asarray(conv, dtype=float).reshape(len(conv), grid.size)
    return zeta, rigid, conv_arr


def newmark(system: ReducedSystem, gm: GroundMotion,
            beta: float = 0.25, gamma: float = 0.5,
            dt_sub: float | None = None,
            probe_heights=(0.0, 0.25, 0.5, 0.75),
            u0: np.ndarray | None = None, v0: np.ndarray | None = None,
            newton_tol: float = 1e-8, newton_max: int = 30,
            ) -> ResponseHistory:
    """Integrate the reduced system under a ground motion.

    dt_sub defaults to min(record dt, impulsive period / 20); the record
    is linearly interpolated when subdividing.
    """
    spec = system.spec
    nd = system.ndof
    if dt_sub is None:
        dt_sub = min(gm.dt, system.impulsive.period / 20.0)
    if dt_sub > gm.dt:
        raise ValueError("dt_sub must not exceed the record dt")
    nstep = int(math.ceil(gm.duration / dt_sub)) + 1
    t = dt_sub * np.arange(nstep)
    ag = np.interp(t, gm.times, gm.accel)

    m_mat = system.mass_matrix()
    c_mat = system.damping_matrix()
    k_lin = system.linear_stiffness()
    load_vec = -system.load_pattern()
    spring = None
    if system.has_theta:
        spring_m, spring_k = _theta_spring(system.uplift)
        spring = (spring_m, spring_k)
    ti = nd - 1  # theta index when present

    u = np.zeros(nd) if u0 is None else np.asarray(u0, dtype=float).copy()
    v = np.zeros(nd) if v0 is None else np.asarray(v0, dtype=float).copy()

    def residual_force(u_, v_, a_, p_):
        f = m_mat @ a_ + c_mat @ v_ + k_lin @ u_ - p_
        if spring is not None:
            f[ti] += spring[0](u_[ti])
        return f

    p = load_vec * ag[0]
    rhs = p - c_mat @ v - k_lin @ u
    if spring is not None:
        rhs[ti] -= spring[0](u[ti])
    a = np.linalg.solve(m_mat, rhs)

    us = np.zeros((nstep, nd))
    vs = np.zeros((nstep, nd))
    as_ = np.zeros((nstep, nd))
    us[0], vs[0], as_[0] = u, v, a

    a0c = 1.0 / (beta * dt_sub ** 2)
    a1c = gamma / (beta * dt_sub)
    scale = float(np.max(np.abs(load_vec)) * np.max(np.abs(ag)))
    # peak elastic-force scale; include initial conditions so free-vibration
    # runs under a zero record still get a meaningful convergence reference
    init_force = float(np.max(np.abs(k_lin @ u))) \
        + float(np.max(np.abs(c_mat @ v)))
    force_ref = max(scale, init_force, 1e-12)
    e_in = np.zeros(nstep)
    e_kin = np.zeros(nstep)
    e_str = np.zeros(nstep)
    e_dmp = np.zeros(nstep)
    e_kin[0] = 0.5 * v @ (m_mat @ v)
    e_str[0] = 0.5 * u @ (k_lin @ u)
    theta_energy = 0.0

    for i in range(1, nstep):
        p_new = load_vec * ag[i]
        u_new = u.copy()
        # predictors at constant u_new
        for it in range(newton_max + 1):
            a_new = a0c * (u_new - u) - (1.0 / (beta * dt_sub)) * v \
                - (0.5 / beta - 1.0) * a
            v_new = v + dt_sub * ((1.0 - gamma) * a + gamma * a_new)
            r = residual_force(u_new, v_new, a_new, p_new)
            if np.linalg.norm(r) < newton_tol * force_ref:
                break
            if it == newton_max:
                raise NewtonError(f"Newton stalled at step {i}")
            k_eff = k_lin + a0c * m_mat + a1c * c_mat
            if spring is not None:
                k_eff = k_eff.copy()
                k_eff[ti, ti] += spring[1](u_new[ti])
            u_new = u_new - np.linalg.solve(k_eff, r)
        if not np.all(np.isfinite(u_new)):
            raise NewtonError(f"non-finite response at step {i}")

        e_in[i] = e_in[i - 1] + 0.5 * dt_sub * (p @ v + p_new @ v_new)
        e_dmp[i] = e_dmp[i - 1] + 0.5 * dt_sub * (
            v @ (c_mat @ v) + v_new @ (c_mat @ v_new))
        if spring is not None:
            theta_energy += 0.5 * (spring[0](u[ti]) + spring[0](u_new[ti])) \
                * (u_new[ti] - u[ti])
        u, v, a, p = u_new, v_new, a_new, p_new
        us[i], vs[i], as_[i] = u, v, a
        e_kin[i] = 0.5 * v @ (m_mat @ v)
        e_str[i] = 0.5 * u @ (k_lin @ u) + theta_energy

    return _recover(system, t, us, vs, as_, ag, probe_heights,
                    {"input": e_in, "kinetic": e_kin, "strain": e_str,
                     "damped": e_dmp})


def _recover(system, t, us, vs, as_, ag, probe_heights, energy):
    spec = system.spec
    nd = system.ndof
    nm = system.masses.size
    zeta, rigid_p, conv_p = _pressure_maps(system, probe_heights)
    nprobe = zeta.size

    theta_acc = as_[:, nd - 1] if system.has_theta else np.zeros(t.size)
    # total accelerations of the translational masses
    tot_acc = as_[:, :nm] + ag[:, None] \
        + np.outer(theta_acc, system.heights)
    # empty shell translates with the ground and rocks with theta
    shell_shear = system.shell_mass * ag + system.shell_moment * theta_acc
    shell_mom = system.shell_moment * ag + system.shell_inertia * theta_acc
    base_shear = -np.sum(system.masses[None, :] * tot_acc, axis=1) \
        - shell_shear
    moment = -np.sum((system.masses * system.heights)[None, :] * tot_acc,
                     axis=1) - shell_mom

    # convective pressures per mode scale with the modal pseudo-acceleration
    pseudo = us[:, 1:nm] * (system.omegas[1:] ** 2)[None, :]
    imp_acc = tot_acc[:, 0]
    wall_p = np.outer(imp_acc, rigid_p[:nprobe]) \
        + pseudo @ conv_p[:, :nprobe]
    base_edge = imp_acc * rigid_p[nprobe] + pseudo @ conv_p[:, nprobe]
    surf = pseudo @ conv_p[:, nprobe + 1]
    rho_g = spec.liquid.density * spec.gravity
    wave = np.column_stack([surf, -surf]) / rho_g

    upl = np.zeros((t.size, 2))
    if system.has_theta:
        curve = system.uplift
        th = us[:, nd - 1]
        w_of = lambda x: np.interp(x, curve.rotation, curve.edge_uplift)
        upl[:, 0] = np.where(th > 0, w_of(np.abs(th)), 0.0)
        upl[:, 1] = np.where(th < 0, w_of(np.abs(th)), 0.0)

    return ResponseHistory(time=t, displacements=us, velocities=vs,
                           accelerations=as_, ground_accel=ag,
                           base_shear=base_shear, overturning_moment=moment,
                           wave_height=wave, wall_pressure=wall_p,
                           base_edge_pressure=base_edge, uplift_edges=upl,
                           energy=energy, probe_heights=zeta, system=system)


def peak_report(history: ResponseHistory) -> PeakReport:
    t = history.time

    def peak_of(series):
        idx = int(np.argmax(np.abs(series)))
        return float(np.abs(series[idx])), float(t[idx])

    eta, eta_t = peak_of(history.wave_height[:, 0])
    w, w_t = peak_of(history.uplift_edges.max(axis=1))
    q, q_t = peak_of(history.base_shear)
    m, m_t = peak_of(history.overturning_moment)
    wp = np.max(np.abs(history.wall_pressure), axis=0)
    freeboard = history.system.spec.geometry.freeboard
    return PeakReport(wave_height=eta, wave_height_time=eta_t,
                      uplift=w, uplift_time=w_t,
                      base_shear=q, base_shear_time=q_t,
                      overturning_moment=m, overturning_moment_time=m_t,
                      wall_pressure=wp,
                      freeboard_exceeded=bool(eta > freeboard))
