"""Unanchored-tank base uplift.

The bottom plate is idealized as uniformly loaded prismatic strips on a
rigid one-sided foundation (cubic Hermite beam elements, active-set
contact).  A precomputed edge-force/edge-uplift curve feeds a rocking
model of the base ring that yields the nonlinear moment-rotation spring
used by the time-history engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from tanksim.model import TankSpec, UNANCHORED, liquid_mass, require_valid

PINNED = "pinned"
ROTATION_SPRING = "rotation_spring"
FIXED = "fixed"


class ContactError(RuntimeError):
    pass


class EquilibriumError(RuntimeError):
    def __init__(self, msg, residuals):
        super().__init__(msg)
        self.residuals = residuals


@dataclass(frozen=True)
class StripModel:
    rigidity: float             # D = E t^3 / (12 (1 - nu^2)), N m
    load: float                 # q = rho g H, N/m^2
    length: float               # m, >= 3x longest expected uplifted length
    nodes: int = 200
    restraint: str = ROTATION_SPRING
    restraint_stiffness: float = 0.0   # N m / rad per unit width
    thickness: float = 0.0      # m, for the plastic-limit check


@dataclass(frozen=True)
class StripSolution:
    edge_force: float           # P, N per unit width (upward hold force)
    uplifted_length: float      # m
    x: np.ndarray
    deflection: np.ndarray      # m, >= 0
    moment: np.ndarray          # D w'', N m per unit width
    contact_reactions: np.ndarray
    complementarity: float      # max |gap * reaction|


@dataclass(frozen=True)
class UpliftCurve:
    uplift: np.ndarray          # w, m
    edge_force: np.ndarray      # P, N/m
    uplifted_length: np.ndarray  # m
    peak_moment: np.ndarray     # max |M| along the strip, N m / m


@dataclass(frozen=True)
class MomentRotationCurve:
    rotation: np.ndarray        # rad
    moment: np.ndarray          # N m
    neutral_offset: np.ndarray  # m
    edge_uplift: np.ndarray     # m
    equilibrium_residual: np.ndarray  # fraction of total weight


def strip_for(spec: TankSpec, nodes: int = 200,
              restraint: str = ROTATION_SPRING,
              max_uplift: float | None = None) -> StripModel:
    """Build the bottom-plate strip for a tank spec.

    Default end restraint is a rotation spring from the shell's local
    bending stiffness spread over the bending decay length sqrt(R s).
    """
    geo = spec.geometry
    sh = spec.shell
    t = geo.bottom_thickness
    d = sh.elastic_modulus * t ** 3 / (12.0 * (1.0 - sh.poisson_ratio ** 2))
    q = spec.liquid.density * spec.gravity * geo.fill_height
    if max_uplift is None:
        max_uplift = 0.1 * geo.radius
    l_est = (24.0 * d * max_uplift / q) ** 0.25
    length = min(geo.radius, 3.0 * l_est)
    k_rot = 0.0
    if restraint == ROTATION_SPRING:
        d_shell = (sh.elastic_modulus * geo.shell_thickness ** 3
                   / (12.0 * (1.0 - sh.poisson_ratio ** 2)))
        k_rot = d_shell / math.sqrt(geo.radius * geo.shell_thickness)
    return StripModel(rigidity=d, load=q, length=length, nodes=nodes,
                      restraint=restraint, restraint_stiffness=k_rot,
                      thickness=t)


def _strip_system(strip: StripModel):
    n = strip.nodes
    le = strip.length / (n - 1)
    ndof = 2 * n
    K = np.zeros((ndof, ndof))
    f = np.zeros(ndof)
    d = strip.rigidity
    q = strip.load
    ke = d / le ** 3 * np.array([
        [12.0, 6.0 * le, -12.0, 6.0 * le],
        [6.0 * le, 4.0 * le * le, -6.0 * le, 2.0 * le * le],
        [-12.0, -6.0 * le, 12.0, -6.0 * le],
        [6.0 * le, 2.0 * le * le, -6.0 * le, 4.0 * le * le]])
    fe = -q * np.array([le / 2.0, le * le / 12.0, le / 2.0, -le * le / 12.0])
    for e in range(n - 1):
        idx = slice(2 * e, 2 * e + 4)
        K[idx, idx] += ke
        f[2 * e:2 * e + 4] += fe
    if strip.restraint == ROTATION_SPRING:
        K[1, 1] += strip.restraint_stiffness
    return K, f, le


def solve_strip(strip: StripModel, edge_uplift: float) -> StripSolution:
    """Hold the shell-junction edge at the given uplift; one-sided rigid
    contact (gap >= 0, upward reaction >= 0, complementarity) solved by
    active-set iteration."""
    if edge_uplift < 0:
        raise ValueError("edge uplift must be >= 0")
    n = strip.nodes
    if edge_uplift == 0.0:
        # plate rests fully on the foundation: no hold force, no lift;
        # each node just carries its tributary share of the liquid load
        le0 = strip.length / (n - 1)
        x0 = np.linspace(0.0, strip.length, n)
        reac0 = np.full(n, strip.load * le0)
        reac0[[0, -1]] = 0.5 * strip.load * le0
        return StripSolution(edge_force=0.0, uplifted_length=0.0, x=x0,
                             deflection=np.zeros(n), moment=np.zeros(n),
                             contact_reactions=reac0, complementarity=0.0)
    K, f, le = _strip_system(strip)
    ndof = 2 * n
    x = np.linspace(0.0, strip.length, n)

    w_dofs = 2 * np.arange(n)
    fixed_dofs = {0: edge_uplift}
    if strip.restraint == FIXED:
        fixed_dofs[1] = 0.0

    active = np.ones(n, dtype=bool)  # nodes held at w = 0
    active[0] = False
    if edge_uplift > 0:
        # warm start from the closed-form uplifted-length estimate
        l_est = (24.0 * strip.rigidity * edge_uplift / strip.load) ** 0.25
        active[x < 0.9 * l_est] = False
    tol_r = 1e-9 * strip.load * le
    u = np.zeros(ndof)
    for _ in range(n + 1):
        cons = dict(fixed_dofs)
        for i in np.flatnonzero(active):
            cons[2 * i] = 0.0
        cidx = np.array(sorted(cons), dtype=int)
        cval = np.array([cons[i] for i in cidx])
        fmask = np.ones(ndof, dtype=bool)
        fmask[cidx] = False
        fidx = np.flatnonzero(fmask)
        rhs = f[fidx] - K[np.ix_(fidx, cidx)] @ cval
        u = np.zeros(ndof)
        u[cidx] = cval
        u[fidx] = np.linalg.solve(K[np.ix_(fidx, fidx)], rhs)
        r = K @ u - f   # external holding forces at constrained DOFs

        release = active & (r[w_dofs] < -tol_r)
        w = u[w_dofs]
        grab = (~active) & (w < -1e-14)
        grab[0] = False
        if not release.any() and not grab.any():
            break
        active = (active & ~release) | grab
    else:
        raise ContactError("active-set iteration did not converge")

    w = u[w_dofs]
    reac = np.where(active, r[w_dofs], 0.0)
    if w[-1] > 1e-12 or not active[-1]:
        raise ContactError(
            "strip too short: far end lifted (increase StripModel.length)")
    return _pack_solution(strip, x, w, u, reac, r, n, le)


def _moment_field(u, n, le, rigidity):
    """Bending moment D w'' from Hermite curvatures at element ends."""
    mom = np.zeros(n)
    for e in range(n - 1):
        w0, t0, w1, t1 = u[2 * e:2 * e + 4]
        c0 = (-6.0 * w0 - 4.0 * le * t0 + 6.0 * w1 - 2.0 * le * t1) / le ** 2
        c1 = (6.0 * w0 + 2.0 * le * t0 - 6.0 * w1 + 4.0 * le * t1) / le ** 2
        mom[e] = rigidity * c0
        mom[e + 1] = rigidity * c1
    return mom


def _uplifted_length(x, w, mom, le) -> float:
    """Touchdown position of the contiguous lifted run from the edge.

    The bending moment vanishes linearly at the touchdown point, so its
    zero is located by a quadratic fit through the last lifted nodes;
    isolated sub-nanometre bumps past the run are contact-discretization
    noise and are ignored.
    """
    n = x.size
    k = 0
    while k + 1 < n and w[k + 1] > 1e-12:
        k += 1
    if k == 0:
        return 0.0 if w[0] <= 1e-12 else 0.5 * float(le)
    if k + 1 >= n:
        return float(x[-1])
    if k >= 2:
        coef = np.polyfit(x[k - 2:k + 1], mom[k - 2:k + 1], 2)
        roots = [r.real for r in np.roots(coef)
                 if abs(r.imag) < 1e-12 * abs(r.real) and x[k] < r.real]
        if roots:
            return float(min(min(roots), x[k] + 2.0 * le))
    if mom[k - 1] != mom[k]:
        frac = mom[k] / (mom[k - 1] - mom[k])
        if 0.0 <= frac <= 1.0:
            return float(x[k] + frac * (x[k] - x[k - 1]))
    return float(x[k])


def _pack_solution(strip, x, w, u, reac, r, n, le) -> StripSolution:
    mom = _moment_field(u, n, le, strip.rigidity)
    ell = _uplifted_length(x, w, mom, le)
    comp = float(np.max(np.abs(w * reac))) if n else 0.0
    return StripSolution(edge_force=float(r[0]), uplifted_length=ell,
                         x=x, deflection=w, moment=mom,
                         contact_reactions=reac, complementarity=comp)


def uplift_curve(strip: StripModel, w_max: float,
                 samples: int = 25) -> UpliftCurve:
    """Edge force / uplifted length vs imposed edge uplift, w = 0 included."""
    ws = np.concatenate([[0.0], np.geomspace(w_max / 300.0, w_max,
                                             samples - 1)])
    p = np.zeros_like(ws)
    ell = np.zeros_like(ws)
    mpk = np.zeros_like(ws)
    for i, w in enumerate(ws[1:], start=1):
        sol = solve_strip(strip, w)
        p[i] = sol.edge_force
        ell[i] = sol.uplifted_length
        mpk[i] = float(np.max(np.abs(sol.moment)))
    return UpliftCurve(uplift=ws, edge_force=p, uplifted_length=ell,
                       peak_moment=mpk)


def closed_form_pinned(strip: StripModel, edge_uplift: float):
    """Uplifted-segment boundary-value solution for the pinned strip:
    D w'''' = -q on [0, l], w(l) = w'(l) = w''(l) = 0, w''(0) = 0.
    Gives l = (24 D w / q)^(1/4) and P = q l / 2."""
    ell = (24.0 * strip.rigidity * edge_uplift / strip.load) ** 0.25
    return strip.load * ell / 2.0, ell


@dataclass(frozen=True)
class PlasticLimit:
    hinge_moment: float         # t^2 sigma_y / 4, N m per unit width
    first_yield_uplift: float   # m, inf when never reached


def plastic_limit_check(strip: StripModel, shell,
                        curve: UpliftCurve) -> PlasticLimit:
    """Annotate where the strip bending moment first reaches the plastic
    hinge moment; the elastic curve itself is left untouched."""
    m_p = strip.thickness ** 2 * shell.yield_stress / 4.0
    if not math.isfinite(m_p) or np.all(curve.peak_moment < m_p):
        return PlasticLimit(hinge_moment=m_p, first_yield_uplift=math.inf)
    w_y = float(np.interp(m_p, curve.peak_moment, curve.uplift))
    return PlasticLimit(hinge_moment=m_p, first_yield_uplift=w_y)


def moment_rotation(spec: TankSpec, rotations,
                    nodes: int = 200, sectors: int = 72,
                    restraint: str = ROTATION_SPRING,
                    contact_stiffness: float | None = None,
                    equilibrium_tol: float = 1e-4) -> MomentRotationCurve:
    """Moment-rotation curve of the uplifting base ring.

    For each rotation theta the base ring displaces w(phi) = u0 + theta R
    cos(phi); the lifted arc is restrained by the strip resistance P(w),
    the bearing arc by a stiff compressive line stiffness, and u0 is
    iterated until the bearing carries the total weight plus the strip
    pulls (vertical equilibrium).  The neutral-axis offset is e = -u0/theta.
    """
    require_valid(spec)
    if spec.geometry.anchorage != UNANCHORED:
        raise ValueError("moment_rotation requires an unanchored tank")
    thetas = np.asarray(rotations, dtype=float)
    if np.any(thetas < 0) or np.any(np.diff(thetas) < 0):
        raise ValueError("rotation grid must be ascending and >= 0")
    if sectors < 72:
        sectors = 72

    R = spec.geometry.radius
    weight = (spec.empty_mass + liquid_mass(spec)) * spec.gravity
    theta_max = float(thetas[-1]) if thetas.size else 0.0
    w_cap = max(2.0 * theta_max * 2.0 * R, 1e-6 * R)
    strip = strip_for(spec, nodes=nodes, restraint=restraint,
                      max_uplift=w_cap)
    curve = uplift_curve(strip, w_cap)

    if contact_stiffness is None:
        w_ref = curve.uplift[-1] / 10.0
        p_ref = float(np.interp(w_ref, curve.uplift, curve.edge_force))
        contact_stiffness = 100.0 * p_ref / w_ref

    phi = (np.arange(sectors) + 0.5) * (2.0 * math.pi / sectors)
    dphi = 2.0 * math.pi / sectors
    cosphi = np.cos(phi)

    def net_force(u0, theta):
        w = u0 + theta * R * cosphi
        pull = np.interp(np.clip(w, 0.0, None), curve.uplift,
                         curve.edge_force)
        pull[w <= 0] = 0.0
        bear = contact_stiffness * np.clip(-w, 0.0, None)
        return float(np.sum(bear - pull) * R * dphi) - weight, w, pull, bear

    moments = np.zeros_like(thetas)
    offsets = np.zeros_like(thetas)
    uplifts = np.zeros_like(thetas)
    residuals = np.zeros_like(thetas)
    for i, theta in enumerate(thetas):
        lo = -(weight / (2.0 * math.pi * R * contact_stiffness)
               + theta * R) * 2.0 - 1e-12
        hi = theta * R
        f_lo = net_force(lo, theta)[0]
        f_hi = net_force(hi, theta)[0]
        if f_lo < 0 or f_hi > 0:
            raise EquilibriumError(
                f"cannot bracket vertical equilibrium at theta={theta}",
                (f_lo, f_hi))
        trail = []
        for _ in range(200):
            u0 = 0.5 * (lo + hi)
            f_mid, w, pull, bear = net_force(u0, theta)
            trail.append(f_mid)
            if abs(f_mid) < equilibrium_tol * weight:
                break
            if f_mid > 0:
                lo = u0
            else:
                hi = u0
        else:
            raise EquilibriumError(
                f"equilibrium bisection stalled at theta={theta}", trail)
        arm = R * cosphi
        moments[i] = float(np.sum(pull * arm - bear * arm) * R * dphi)
        offsets[i] = max(-R, min(R, -u0 / theta)) if theta > 0 else 0.0
        uplifts[i] = max(0.0, u0 + theta * R)
        residuals[i] = abs(f_mid) / weight
    return MomentRotationCurve(rotation=thetas, moment=moments,
                               neutral_offset=offsets, edge_uplift=uplifts,
                               equilibrium_residual=residuals)
