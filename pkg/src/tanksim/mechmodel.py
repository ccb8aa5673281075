"""Reduced-order spring-mass parameters and closed-form hydrodynamic
pressure profiles for rigid and flexible tank walls.

Convective masses, periods and heights follow EN 1998-4:2006 Annex A;
the impulsive period uses the Annex A flexible-tank coefficient table
(values below from EN 1998-4:2006 Table A.2 / Malhotra et al. 2000,
linear in H/R, extrapolated linearly outside the tabulated range).
Rigid/flexible impulsive wall pressures use the classic separation-of-
variables solution of the liquid equation in a rigid-base cylinder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from tanksim import bessel
from tanksim.model import TankSpec, liquid_mass, require_valid

RIGID_IMPULSIVE = "rigid_impulsive"
FLEXIBLE_IMPULSIVE = "flexible_impulsive"

# First-impulsive-period coefficient C(H/R); EN 1998-4:2006 Table A.2.
_CI_TABLE = (
    (0.3, 9.28), (0.5, 7.74), (0.7, 6.97), (1.0, 6.36),
    (1.5, 6.06), (2.0, 6.21), (2.5, 6.56), (3.0, 6.91),
)

# Default damping ratios: 2% structural damping for welded steel shells
# and the 0.5% industry norm for sloshing; both are overridable wherever
# they are consumed.
STRUCTURAL_DAMPING = 0.02
CONVECTIVE_DAMPING = 0.005


@dataclass(frozen=True)
class ConvectiveMode:
    index: int                  # n >= 1
    lambda_n: float             # n-th positive root of J1'
    mass: float                 # kg
    height: float               # m, wall-pressure resultant
    height_with_base: float     # m, including base-pressure contribution
    period: float               # s

    @property
    def omega(self) -> float:
        return 2.0 * math.pi / self.period


@dataclass(frozen=True)
class ImpulsiveComponent:
    mass: float                 # kg
    height: float               # m
    period: float               # s

    @property
    def omega(self) -> float:
        return 2.0 * math.pi / self.period


@dataclass(frozen=True)
class PressureProfile:
    zeta: np.ndarray            # z/H in [0, 1]
    pressure: np.ndarray        # Pa per unit lateral acceleration, theta = 0
    component: str


def _sech(x: float) -> float:
    e = math.exp(-x)
    return 2.0 * e / (1.0 + e * e)


def _coth_term(x: float, c: float) -> float:
    """(cosh(x) - c) / (x sinh(x)) in overflow-safe form."""
    return (1.0 - c * _sech(x)) / (x * math.tanh(x))


def bessel_j1prime_roots(count: int) -> list[float]:
    """Strictly increasing positive roots of d/dx J1(x) = 0."""
    return bessel.j1prime_roots(count)


def convective_params(spec: TankSpec, n_modes: int) -> list[ConvectiveMode]:
    require_valid(spec)
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    g = spec.gravity
    R = spec.geometry.radius
    H = spec.geometry.fill_height
    gamma = spec.geometry.slenderness
    m_l = liquid_mass(spec)
    out = []
    for n, lam in enumerate(bessel_j1prime_roots(n_modes), start=1):
        x = lam * gamma
        omega2 = (g * lam / R) * math.tanh(x)
        mass = m_l * 2.0 * math.tanh(x) / (gamma * lam * (lam * lam - 1.0))
        out.append(ConvectiveMode(
            index=n,
            lambda_n=lam,
            mass=mass,
            height=H * (1.0 - _coth_term(x, 1.0)),
            height_with_base=H * (1.0 - _coth_term(x, 2.0)),
            period=2.0 * math.pi / math.sqrt(omega2),
        ))
    return out


def impulsive_coefficient(gamma: float) -> float:
    """C(H/R) for the flexible-tank impulsive period, linear interpolation
    with linear extrapolation at the table ends."""
    xs = [p[0] for p in _CI_TABLE]
    ys = [p[1] for p in _CI_TABLE]
    if gamma <= xs[0]:
        i = 0
    elif gamma >= xs[-1]:
        i = len(xs) - 2
    else:
        i = max(j for j in range(len(xs) - 1) if xs[j] <= gamma)
    t = (gamma - xs[i]) / (xs[i + 1] - xs[i])
    return ys[i] + t * (ys[i + 1] - ys[i])


def impulsive_params(spec: TankSpec, n_series: int = 50) -> ImpulsiveComponent:
    """Impulsive mass as the convective-series complement, resultant height
    from the rigid-wall pressure, period from the EN coefficient formula."""
    require_valid(spec)
    n_series = max(n_series, 20)
    modes = convective_params(spec, n_series)
    m_i = liquid_mass(spec) - sum(m.mass for m in modes)
    geo = spec.geometry
    zeta = np.linspace(0.0, 1.0, 401)
    prof = rigid_impulsive_pressure_profile(spec, zeta)
    h_i = geo.fill_height * float(
        np.trapezoid(prof.pressure * zeta, zeta) / np.trapezoid(prof.pressure, zeta))
    c = impulsive_coefficient(geo.slenderness)
    t_i = (c * geo.fill_height * math.sqrt(spec.liquid.density)
           / (math.sqrt(geo.shell_thickness / geo.radius)
              * math.sqrt(spec.shell.elastic_modulus)))
    return ImpulsiveComponent(mass=m_i, height=h_i, period=t_i)


def _impulsive_series(spec: TankSpec, participation, zeta: np.ndarray,
                      tail_rel: float = 1e-6, max_terms: int = 2000) -> np.ndarray:
    """Sum the cos(nu_n zeta) wall-pressure series for a wall motion whose
    n-th cosine coefficient is `participation(n)` (n from 1).

    Truncates when the last term's wall-integral contribution drops below
    `tail_rel` of the running total.
    """
    gamma = spec.geometry.slenderness
    rho = spec.liquid.density
    H = spec.geometry.fill_height
    p = np.zeros_like(zeta)
    integral = 0.0
    for n in range(1, max_terms + 1):
        nu = (2 * n - 1) * math.pi / 2.0
        coef = participation(n) / nu * bessel.i1_over_i1prime(nu / gamma)
        p += coef * np.cos(nu * zeta)
        contrib = abs(coef * math.sin(nu) / nu)
        integral += coef * math.sin(nu) / nu
        if n >= 3 and contrib < tail_rel * abs(integral):
            break
    return rho * H * p


def rigid_impulsive_pressure_profile(spec: TankSpec, grid) -> PressureProfile:
    """Wall pressure per unit lateral ground acceleration, rigid tank."""
    require_valid(spec)
    zeta = np.asarray(grid, dtype=float)
    if np.any((zeta < 0) | (zeta > 1)):
        raise ValueError("grid points must lie in [0, 1]")

    def part(n):  # cosine expansion of the rigid-body motion psi == 1
        nu = (2 * n - 1) * math.pi / 2.0
        return 2.0 * math.sin(nu) / nu

    return PressureProfile(zeta=zeta, pressure=_impulsive_series(spec, part, zeta),
                           component=RIGID_IMPULSIVE)


def flexible_impulsive_pressure_profile(spec: TankSpec, mode_shape, grid,
                                        n_quad: int = 400,
                                        enforce_base_fixed: bool = True,
                                        n_terms: int = 200) -> PressureProfile:
    """Wall pressure per unit top acceleration for a wall moving as
    a * psi(zeta), psi(1) = 1 and psi(0) = 0 (base fixed)."""
    require_valid(spec)
    zeta = np.asarray(grid, dtype=float)
    if np.any((zeta < 0) | (zeta > 1)):
        raise ValueError("grid points must lie in [0, 1]")
    n_quad = max(n_quad, 200)
    zq = np.linspace(0.0, 1.0, n_quad + 1)
    psi = np.asarray([float(mode_shape(z)) for z in zq])
    if enforce_base_fixed and abs(psi[0]) > 1e-6:
        raise ValueError(f"mode shape must vanish at the base, psi(0) = {psi[0]}")
    # Filon-type quadrature: psi is taken piecewise linear between samples
    # and each (linear) x cos(nu z) piece is integrated exactly, so the
    # participation stays accurate at arbitrarily high harmonics (plain
    # Simpson cannot resolve cos(nu z) once nu h ~ 1)
    z0, z1 = zq[:-1], zq[1:]
    p0, p1 = psi[:-1], psi[1:]
    slope = (p1 - p0) / (z1 - z0)
    intercept = p0 - slope * z0

    def part(n):
        nu = (2 * n - 1) * math.pi / 2.0
        s0, s1 = np.sin(nu * z0), np.sin(nu * z1)
        c0, c1 = np.cos(nu * z0), np.cos(nu * z1)
        val = ((intercept + slope * z1) * s1
               - (intercept + slope * z0) * s0) / nu \
            + slope * (c1 - c0) / nu ** 2
        return 2.0 * float(np.sum(val))

    p = _impulsive_series(spec, part, zeta, max_terms=n_terms)
    return PressureProfile(zeta=zeta, pressure=p, component=FLEXIBLE_IMPULSIVE)


def convective_pressure_profile(mode: ConvectiveMode, spec: TankSpec,
                                grid) -> PressureProfile:
    """Wall pressure per unit convective modal (pseudo-)acceleration,
    normalized so the wall resultant equals the modal mass."""
    require_valid(spec)
    zeta = np.asarray(grid, dtype=float)
    if np.any((zeta < 0) | (zeta > 1)):
        raise ValueError("grid points must lie in [0, 1]")
    R = spec.geometry.radius
    H = spec.geometry.fill_height
    x = mode.lambda_n * spec.geometry.slenderness
    # cosh(x zeta)/cosh(x) in overflow-safe form
    shape = np.exp(x * (zeta - 1.0)) * (1.0 + np.exp(-2.0 * x * zeta)) \
        / (1.0 + math.exp(-2.0 * x))
    shape_integral = math.tanh(x) / x
    scale = mode.mass / (math.pi * R * H * shape_integral)
    return PressureProfile(zeta=zeta, pressure=scale * shape,
                           component=f"convective_{mode.index}")


def wall_resultant(profile: PressureProfile, spec: TankSpec) -> float:
    """Horizontal wall force per unit acceleration: the cos(theta) pressure
    integrates to pi R over the circumference."""
    H = spec.geometry.fill_height
    R = spec.geometry.radius
    return math.pi * R * H * float(np.trapezoid(profile.pressure, profile.zeta))


def wave_height_profile(modes, modal_pressures_at_surface, spec: TankSpec) -> float:
    """Free-surface elevation at the wall (theta = 0): surface dynamic
    pressure over rho g, summed over convective modes."""
    require_valid(spec)
    p = float(np.sum(np.asarray(modal_pressures_at_surface, dtype=float)))
    return p / (spec.liquid.density * spec.gravity)
