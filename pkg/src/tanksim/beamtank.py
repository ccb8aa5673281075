"""Flexible-wall impulsive model: tank shell as a base-fixed cantilever
beam carrying the liquid as added mass, iterated to a self-consistent
mode shape and period.

Thin-ring section: EI = E pi R^3 s; Timoshenko shear flexibility is on by
default (short broad tanks are shear-dominated) with shear area kappa A,
kappa = 0.5 for a thin tube.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh

from tanksim.mechmodel import (
    PressureProfile,
    flexible_impulsive_pressure_profile,
    impulsive_params,
)
from tanksim.model import TankSpec, require_valid

_CANTILEVER_BETA1 = 1.8751040687119612  # first root of cos(b) cosh(b) = -1


class IterationError(RuntimeError):
    def __init__(self, msg, trajectory):
        super().__init__(msg)
        self.trajectory = trajectory


@dataclass(frozen=True)
class BeamModel:
    stations: np.ndarray        # z in [0, total_height], m
    ei: np.ndarray              # N m^2 per station
    shear_rigidity: np.ndarray  # G As, N (ignored when timoshenko off)
    structural_mass: np.ndarray  # kg/m
    added_mass: np.ndarray      # kg/m, zero above the fill height


@dataclass(frozen=True)
class ImpulsiveMode:
    period: float               # s
    zeta: np.ndarray            # z/H grid of the shape
    shape: np.ndarray           # psi, psi(1) = 1
    iterations: int
    period_trajectory: tuple


def analytic_cantilever_shape(zeta):
    """First Euler-Bernoulli cantilever mode, unit tip deflection."""
    b = _CANTILEVER_BETA1
    s = (math.sin(b) - math.sinh(b)) / (math.cos(b) + math.cosh(b))
    x = np.asarray(zeta, dtype=float)
    raw = (np.cosh(b * x) - np.cos(b * x)
           + s * (np.sinh(b * x) - np.sin(b * x)))
    tip = (math.cosh(b) - math.cos(b) + s * (math.sinh(b) - math.sin(b)))
    return raw / tip


def analytic_cantilever_period(ei: float, mass_per_length: float,
                               length: float) -> float:
    omega = _CANTILEVER_BETA1 ** 2 * math.sqrt(
        ei / (mass_per_length * length ** 4))
    return 2.0 * math.pi / omega


def added_mass_from_pressure(profile: PressureProfile, psi: np.ndarray,
                             spec: TankSpec) -> np.ndarray:
    """Added mass per unit height m_a = pi R p / psi (cos-theta pressure
    worked against cos-theta wall motion).

    Where psi is below 1e-6 of its peak the ratio is taken from the
    nearest station with meaningful motion instead of dividing.
    """
    R = spec.geometry.radius
    p = profile.pressure
    psi = np.asarray(psi, dtype=float)
    cutoff = 1e-6 * float(np.max(np.abs(psi)))
    ok = np.abs(psi) > cutoff
    m_a = np.zeros_like(p)
    m_a[ok] = math.pi * R * p[ok] / psi[ok]
    if not np.all(ok):
        if not np.any(ok):
            raise ValueError("mode shape vanishes everywhere")
        idx = np.flatnonzero(ok)
        for i in np.flatnonzero(~ok):
            m_a[i] = m_a[idx[np.argmin(np.abs(idx - i))]]
    return m_a


def _beam_matrices(z: np.ndarray, ei: np.ndarray, gas: np.ndarray,
                   mass: np.ndarray, timoshenko: bool):
    """Assemble cantilever beam K, M (DOFs w_i, theta_i per node);
    element properties are station-averaged; consistent mass."""
    n = z.size
    ndof = 2 * n
    K = np.zeros((ndof, ndof))
    M = np.zeros((ndof, ndof))
    for e in range(n - 1):
        L = z[e + 1] - z[e]
        eie = 0.5 * (ei[e] + ei[e + 1])
        me = 0.5 * (mass[e] + mass[e + 1])
        phi = 0.0
        if timoshenko:
            gase = 0.5 * (gas[e] + gas[e + 1])
            phi = 12.0 * eie / (gase * L * L)
        c = eie / ((1.0 + phi) * L ** 3)
        ke = c * np.array([
            [12.0, 6.0 * L, -12.0, 6.0 * L],
            [6.0 * L, (4.0 + phi) * L * L, -6.0 * L, (2.0 - phi) * L * L],
            [-12.0, -6.0 * L, 12.0, -6.0 * L],
            [6.0 * L, (2.0 - phi) * L * L, -6.0 * L, (4.0 + phi) * L * L]])
        me_mat = me * L / 420.0 * np.array([
            [156.0, 22.0 * L, 54.0, -13.0 * L],
            [22.0 * L, 4.0 * L * L, 13.0 * L, -3.0 * L * L],
            [54.0, 13.0 * L, 156.0, -22.0 * L],
            [-13.0 * L, -3.0 * L * L, -22.0 * L, 4.0 * L * L]])
        idx = [2 * e, 2 * e + 1, 2 * e + 2, 2 * e + 3]
        K[np.ix_(idx, idx)] += ke
        M[np.ix_(idx, idx)] += me_mat
    return K, M


def _fundamental(z, ei, gas, mass, timoshenko):
    K, M = _beam_matrices(z, ei, gas, mass, timoshenko)
    free = np.arange(2, 2 * z.size)  # clamp w, theta at the base
    w, v = eigh(K[np.ix_(free, free)], M[np.ix_(free, free)])
    pos = w > 0
    w, v = w[pos], v[:, pos]
    omega = math.sqrt(w[0])
    defl = np.zeros(z.size)
    defl[1:] = v[0::2, 0]
    return 2.0 * math.pi / omega, defl


def build_beam(spec: TankSpec, psi_on_fill, stations: int = 100) -> BeamModel:
    """Station grid over the full shell height with a node at the fill level;
    added mass from the flexible-wall pressure for shape `psi_on_fill`."""
    geo = spec.geometry
    R, H, Ht = geo.radius, geo.fill_height, geo.total_height
    n_wet = max(8, round(stations * H / Ht))
    z_wet = np.linspace(0.0, H, n_wet + 1)
    if Ht > H:
        n_dry = max(1, round(stations * (Ht - H) / Ht))
        z = np.concatenate([z_wet, np.linspace(H, Ht, n_dry + 1)[1:]])
    else:
        z = z_wet
    s = spec.shell
    ei = np.full(z.size, s.elastic_modulus * math.pi * R ** 3
                 * geo.shell_thickness)
    G = s.elastic_modulus / (2.0 * (1.0 + s.poisson_ratio))
    gas = np.full(z.size, G * math.pi * R * geo.shell_thickness)  # kappa=0.5
    m_struct = np.full(z.size, s.density * 2.0 * math.pi * R
                       * geo.shell_thickness)

    zeta = z_wet / H
    psi = np.asarray([float(psi_on_fill(zt)) for zt in zeta])
    m_add = np.zeros(z.size)
    if spec.liquid.density > 0:
        prof = flexible_impulsive_pressure_profile(
            spec, psi_on_fill, zeta, enforce_base_fixed=False)
        m_add[:n_wet + 1] = added_mass_from_pressure(prof, psi, spec)
    return BeamModel(stations=z, ei=ei, shear_rigidity=gas,
                     structural_mass=m_struct, added_mass=m_add)


def radial_bulging_period(spec: TankSpec) -> float:
    """Breathing-type flexibility of the wall cross section: hoop membrane
    stiffness E s / R^2 per unit wall area against the impulsive liquid
    mass, Rayleigh quotient with a uniform radial trial shape.

    Beam bending/shear alone badly overestimates the impulsive frequency
    of squat tanks; this local compliance acts in series with it.
    """
    geo = spec.geometry
    if spec.liquid.density <= 0:
        return 0.0
    m_i = impulsive_params(spec).mass
    if m_i <= 0:
        return 0.0
    omega2 = (spec.shell.elastic_modulus * geo.shell_thickness
              * math.pi * geo.radius * geo.fill_height) / (geo.radius ** 2 * m_i)
    return 2.0 * math.pi / math.sqrt(omega2)


def impulsive_mode(spec: TankSpec, stations: int = 100,
                   timoshenko: bool = True, tol: float = 1e-3,
                   max_iter: int = 20,
                   radial_compliance: bool = True) -> ImpulsiveMode:
    """Fixed-point iteration between wall mode shape and liquid added mass.

    With `radial_compliance` the converged beam period is combined with
    the cross-section bulging period by Dunkerley's rule
    (T^2 = T_beam^2 + T_bulge^2).
    """
    require_valid(spec)
    H = spec.geometry.fill_height
    t_bulge = radial_bulging_period(spec) if radial_compliance else 0.0

    shape_fn = analytic_cantilever_shape
    trajectory = []
    period = None
    for it in range(1, max_iter + 1):
        beam = build_beam(spec, shape_fn, stations=stations)
        t_new, defl = _fundamental(beam.stations, beam.ei,
                                   beam.shear_rigidity,
                                   beam.structural_mass + beam.added_mass,
                                   timoshenko)
        trajectory.append(t_new)
        wet = beam.stations <= H * (1.0 + 1e-12)
        z_wet = beam.stations[wet]
        d_wet = defl[wet]
        d_top = d_wet[-1]
        if d_top == 0.0:
            raise IterationError("degenerate fundamental mode", trajectory)
        d_wet = d_wet / d_top
        zeta_w = z_wet / H

        def shape_fn(zt, _z=zeta_w, _d=d_wet):
            return float(np.interp(zt, _z, _d))

        if period is not None and abs(t_new - period) / t_new < tol:
            combined = math.sqrt(t_new ** 2 + t_bulge ** 2)
            return ImpulsiveMode(period=combined, zeta=zeta_w, shape=d_wet,
                                 iterations=it,
                                 period_trajectory=tuple(trajectory))
        period = t_new
    raise IterationError(
        f"no convergence in {max_iter} iterations", tuple(trajectory))
