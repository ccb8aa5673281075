"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

Set TANKSIM_DISABLE_NUMBA=1 to force the numpy path (useful on platforms
without a working JIT, and for benchmarking; see benchmarks/).
Both paths accumulate in the same fixed order, so results are bitwise
reproducible per path.
"""

from __future__ import annotations

import math
import os

import numpy as np

_GP = 1.0 / math.sqrt(3.0)  # 2x2 Gauss points at +-1/sqrt(3), weight 1


def _numba_enabled() -> bool:
    if os.environ.get("TANKSIM_DISABLE_NUMBA", "0").lower() in ("1", "true", "yes"):
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


USE_NUMBA = _numba_enabled()


# -- SDOF Newmark time stepping (response spectra, free vibration) ----------

def _sdof_newmark_py(accel, dt, omega, xi, beta, gamma):
    n = accel.shape[0]
    u = np.zeros(n)
    c = 2.0 * xi * omega
    k = omega * omega
    a0 = 1.0 / (beta * dt * dt)
    a1 = gamma / (beta * dt)
    a2 = 1.0 / (beta * dt)
    a3 = 1.0 / (2.0 * beta) - 1.0
    a4 = gamma / beta - 1.0
    a5 = dt / 2.0 * (gamma / beta - 2.0)
    keff = k + a0 + a1 * c
    ui = 0.0
    vi = 0.0
    ai = -accel[0]
    for i in range(1, n):
        f = -accel[i]
        feff = f + (a0 * ui + a2 * vi + a3 * ai) + c * (a1 * ui + a4 * vi + a5 * ai)
        un = feff / keff
        an = a0 * (un - ui) - a2 * vi - a3 * ai
        vn = vi + dt * (1.0 - gamma) * ai + dt * gamma * an
        u[i] = un
        ui, vi, ai = un, vn, an
    return u


# -- meridional harmonic quad assembly --------------------------------------

def _assemble_quads_py(nodes, elems, nharm):
    """Element triplets for K = grad.grad + (n^2/r^2) p p' and volume mass
    p p', both weighted by r (cylindrical meridional section, cos(n theta)
    circumferential expansion)."""
    ex = nodes[elems, 0]          # (E,4)
    ey = nodes[elems, 1]
    ne = elems.shape[0]
    kloc = np.zeros((ne, 4, 4))
    mloc = np.zeros((ne, 4, 4))
    n2 = float(nharm * nharm)
    for gx in (-_GP, _GP):
        for gy in (-_GP, _GP):
            shp = 0.25 * np.array([(1 - gx) * (1 - gy), (1 + gx) * (1 - gy),
                                   (1 + gx) * (1 + gy), (1 - gx) * (1 + gy)])
            dxi = 0.25 * np.array([-(1 - gy), (1 - gy), (1 + gy), -(1 + gy)])
            det = 0.25 * np.array([-(1 - gx), -(1 + gx), (1 + gx), (1 - gx)])
            j11 = ex @ dxi
            j12 = ey @ dxi
            j21 = ex @ det
            j22 = ey @ det
            detj = j11 * j22 - j12 * j21
            # dN/dr, dN/dz rows per element
            br = (j22[:, None] * dxi[None, :] - j12[:, None] * det[None, :]) / detj[:, None]
            bz = (-j21[:, None] * dxi[None, :] + j11[:, None] * det[None, :]) / detj[:, None]
            r = ex @ shp
            w = detj * r
            kloc += w[:, None, None] * (br[:, :, None] * br[:, None, :]
                                        + bz[:, :, None] * bz[:, None, :])
            nn = shp[:, None] * shp[None, :]
            if n2 > 0.0:
                kloc += (w * n2 / (r * r))[:, None, None] * nn[None, :, :]
            mloc += w[:, None, None] * nn[None, :, :]
    rows = np.repeat(elems, 4, axis=1).reshape(ne, 4, 4)
    cols = rows.transpose(0, 2, 1)
    return (rows.ravel(), cols.ravel(), kloc.ravel(), mloc.ravel())


if USE_NUMBA:
    from numba import njit

    @njit(cache=True)
    def _sdof_newmark_nb(accel, dt, omega, xi, beta, gamma):  # pragma: no cover
        n = accel.shape[0]
        u = np.zeros(n)
        c = 2.0 * xi * omega
        k = omega * omega
        a0 = 1.0 / (beta * dt * dt)
        a1 = gamma / (beta * dt)
        a2 = 1.0 / (beta * dt)
        a3 = 1.0 / (2.0 * beta) - 1.0
        a4 = gamma / beta - 1.0
        a5 = dt / 2.0 * (gamma / beta - 2.0)
        keff = k + a0 + a1 * c
        ui = 0.0
        vi = 0.0
        ai = -accel[0]
        for i in range(1, n):
            f = -accel[i]
            feff = f + (a0 * ui + a2 * vi + a3 * ai) + c * (a1 * ui + a4 * vi + a5 * ai)
            un = feff / keff
            an = a0 * (un - ui) - a2 * vi - a3 * ai
            vn = vi + dt * (1.0 - gamma) * ai + dt * gamma * an
            u[i] = un
            ui, vi, ai = un, vn, an
        return u

    @njit(cache=True)
    def _assemble_quads_nb(nodes, elems, nharm):  # pragma: no cover
        ne = elems.shape[0]
        rows = np.empty(ne * 16, dtype=np.int64)
        cols = np.empty(ne * 16, dtype=np.int64)
        kvals = np.zeros(ne * 16)
        mvals = np.zeros(ne * 16)
        gp = 1.0 / math.sqrt(3.0)
        n2 = float(nharm * nharm)
        shp = np.empty(4)
        dxi = np.empty(4)
        det_ = np.empty(4)
        br = np.empty(4)
        bz = np.empty(4)
        for e in range(ne):
            base = e * 16
            for a in range(4):
                for b in range(4):
                    rows[base + 4 * a + b] = elems[e, a]
                    cols[base + 4 * a + b] = elems[e, b]
            for ig in range(4):
                gx = -gp if ig % 2 == 0 else gp
                gy = -gp if ig // 2 == 0 else gp
                shp[0] = 0.25 * (1 - gx) * (1 - gy)
                shp[1] = 0.25 * (1 + gx) * (1 - gy)
                shp[2] = 0.25 * (1 + gx) * (1 + gy)
                shp[3] = 0.25 * (1 - gx) * (1 + gy)
                dxi[0] = -0.25 * (1 - gy)
                dxi[1] = 0.25 * (1 - gy)
                dxi[2] = 0.25 * (1 + gy)
                dxi[3] = -0.25 * (1 + gy)
                det_[0] = -0.25 * (1 - gx)
                det_[1] = -0.25 * (1 + gx)
                det_[2] = 0.25 * (1 + gx)
                det_[3] = 0.25 * (1 - gx)
                j11 = 0.0
                j12 = 0.0
                j21 = 0.0
                j22 = 0.0
                r = 0.0
                for a in range(4):
                    x = nodes[elems[e, a], 0]
                    y = nodes[elems[e, a], 1]
                    j11 += x * dxi[a]
                    j12 += y * dxi[a]
                    j21 += x * det_[a]
                    j22 += y * det_[a]
                    r += x * shp[a]
                detj = j11 * j22 - j12 * j21
                for a in range(4):
                    br[a] = (j22 * dxi[a] - j12 * det_[a]) / detj
                    bz[a] = (-j21 * dxi[a] + j11 * det_[a]) / detj
                w = detj * r
                for a in range(4):
                    for b in range(4):
                        kv = w * (br[a] * br[b] + bz[a] * bz[b])
                        if n2 > 0.0:
                            kv += w * n2 / (r * r) * shp[a] * shp[b]
                        kvals[base + 4 * a + b] += kv
                        mvals[base + 4 * a + b] += w * shp[a] * shp[b]
        return rows, cols, kvals, mvals

    sdof_newmark = _sdof_newmark_nb
    assemble_quads = _assemble_quads_nb
else:
    sdof_newmark = _sdof_newmark_py
    assemble_quads = _assemble_quads_py
