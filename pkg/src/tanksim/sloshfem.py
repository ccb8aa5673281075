"""Meridional finite-element eigensolver for liquid sloshing.

The liquid occupies the (r, z) rectangle [0, R] x [0, H]; circumferential
variation is a cos(n theta) harmonic, so lateral sloshing is n = 1.
Bilinear quads, 2x2 Gauss.  The free surface carries the gravity-wave
mass matrix (1/g) int p p' r dr; walls and base are rigid (natural,
zero-flux); the axis gets an essential p = 0 constraint for n >= 1.
Eigenpairs come from shift-invert Lanczos on sparse factors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh

from tanksim import kernels
from tanksim.model import Liquid, TankGeometry

UNIFORM = "uniform"
SURFACE_REFINED = "surface_refined"

FREE_SURFACE = "free_surface"
WALL = "wall"
BASE = "base"
AXIS = "axis"


class EigenSolveError(RuntimeError):
    pass


@dataclass(frozen=True)
class LiquidMesh:
    nodes: np.ndarray           # (N, 2) r, z
    elements: np.ndarray        # (E, 4) CCW node indices
    boundary_edges: dict        # tag -> (n_edges, 2) node-index pairs
    harmonic: int = 1
    radius: float = 0.0
    fill_height: float = 0.0

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]


@dataclass(frozen=True)
class EigenSolution:
    omega2: np.ndarray          # ascending, (rad/s)^2
    vectors: np.ndarray         # (N, k) nodal pressure amplitudes, M-normalized
    harmonic: int
    mesh: LiquidMesh
    residuals: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def periods(self) -> np.ndarray:
        return 2.0 * math.pi / np.sqrt(self.omega2)


def build_mesh(geom: TankGeometry, target_size: float,
               grading: str = UNIFORM, harmonic: int = 1) -> LiquidMesh:
    """Structured quad grid over [0, R] x [0, H].

    `surface_refined` halves the vertical element size in the top 20% of
    the liquid depth.
    """
    R, H = geom.radius, geom.fill_height
    if target_size <= 0:
        raise ValueError("target_size must be > 0")
    if target_size > min(R, H):
        raise ValueError(f"target_size {target_size} exceeds min(R, H)")
    nr = max(1, round(R / target_size))
    rs = np.linspace(0.0, R, nr + 1)
    if grading == UNIFORM:
        nz = max(1, round(H / target_size))
        zs = np.linspace(0.0, H, nz + 1)
    elif grading == SURFACE_REFINED:
        z_split = 0.8 * H
        n_lo = max(1, round(z_split / target_size))
        n_hi = max(1, round((H - z_split) / (0.5 * target_size)))
        zs = np.concatenate([np.linspace(0.0, z_split, n_lo + 1),
                             np.linspace(z_split, H, n_hi + 1)[1:]])
    else:
        raise ValueError(f"unknown grading {grading!r}")

    nr_nodes = rs.size
    nz_nodes = zs.size
    rr, zz = np.meshgrid(rs, zs, indexing="xy")
    nodes = np.column_stack([rr.ravel(), zz.ravel()])  # row-major by z level

    def nid(i_z, i_r):
        return i_z * nr_nodes + i_r

    elems = []
    for iz in range(nz_nodes - 1):
        for ir in range(nr_nodes - 1):
            elems.append([nid(iz, ir), nid(iz, ir + 1),
                          nid(iz + 1, ir + 1), nid(iz + 1, ir)])
    elements = np.asarray(elems, dtype=np.int64)

    top = nz_nodes - 1
    edges = {
        FREE_SURFACE: np.array([[nid(top, i), nid(top, i + 1)]
                                for i in range(nr_nodes - 1)], dtype=np.int64),
        BASE: np.array([[nid(0, i), nid(0, i + 1)]
                        for i in range(nr_nodes - 1)], dtype=np.int64),
        WALL: np.array([[nid(i, nr_nodes - 1), nid(i + 1, nr_nodes - 1)]
                        for i in range(nz_nodes - 1)], dtype=np.int64),
        AXIS: np.array([[nid(i, 0), nid(i + 1, 0)]
                        for i in range(nz_nodes - 1)], dtype=np.int64),
    }
    return LiquidMesh(nodes=nodes, elements=elements, boundary_edges=edges,
                      harmonic=harmonic, radius=R, fill_height=H)


def _check_jacobians(mesh: LiquidMesh) -> None:
    ex = mesh.nodes[mesh.elements, 0]
    ey = mesh.nodes[mesh.elements, 1]
    gp = 1.0 / math.sqrt(3.0)
    for gx in (-gp, gp):
        for gy in (-gp, gp):
            dxi = 0.25 * np.array([-(1 - gy), (1 - gy), (1 + gy), -(1 + gy)])
            det = 0.25 * np.array([-(1 - gx), -(1 + gx), (1 + gx), (1 - gx)])
            j11 = ex @ dxi
            j12 = ey @ dxi
            j21 = ex @ det
            j22 = ey @ det
            detj = j11 * j22 - j12 * j21
            if np.any(detj <= 0):
                bad = int(np.argmax(detj <= 0))
                raise ValueError(f"non-positive Jacobian in element {bad}")


def assemble(mesh: LiquidMesh, liquid: Liquid, g: float,
             compressible: bool = False):
    """Stiffness and mass operators of the sloshing eigenproblem
    K p = omega^2 M p (sparse CSR)."""
    _check_jacobians(mesh)
    n = mesh.n_nodes
    rows, cols, kvals, mvol = kernels.assemble_quads(
        np.ascontiguousarray(mesh.nodes, dtype=np.float64),
        np.ascontiguousarray(mesh.elements, dtype=np.int64),
        mesh.harmonic)
    K = sp.csr_matrix((kvals, (rows, cols)), shape=(n, n))

    # free-surface gravity-wave mass: (1/g) int p p' r dr, 2-pt Gauss edges
    srows, scols, svals = [], [], []
    gp = 1.0 / math.sqrt(3.0)
    for edge in mesh.boundary_edges[FREE_SURFACE]:
        i, j = int(edge[0]), int(edge[1])
        r0, r1 = mesh.nodes[i, 0], mesh.nodes[j, 0]
        half = 0.5 * abs(r1 - r0)
        for xi in (-gp, gp):
            n0 = 0.5 * (1 - xi)
            n1 = 0.5 * (1 + xi)
            r = n0 * r0 + n1 * r1
            w = half * r / g
            srows += [i, i, j, j]
            scols += [i, j, i, j]
            svals += [w * n0 * n0, w * n0 * n1, w * n1 * n0, w * n1 * n1]
    M = sp.csr_matrix((svals, (srows, scols)), shape=(n, n))
    if compressible:
        M = M + (1.0 / liquid.sound_speed ** 2) * sp.csr_matrix(
            (mvol, (rows, cols)), shape=(n, n))
    return K, M


def _axis_free_dofs(mesh: LiquidMesh) -> np.ndarray:
    if mesh.harmonic >= 1:
        return np.flatnonzero(mesh.nodes[:, 0] > 0.0)
    return np.arange(mesh.n_nodes)


def solve_modes(K, M, count: int, mesh: LiquidMesh, sigma: float | None = None,
                residual_tol: float = 1e-8, drop_tol: float | None = None,
                extra: int = 3) -> EigenSolution:
    """Smallest `count` positive eigenvalues of K p = omega^2 M p by
    shift-invert Lanczos (ARPACK on a sparse factorization of K - sigma M).

    For n = 0 the constant-pressure nullspace of K is skipped via a small
    negative default shift and a zero-eigenvalue cutoff.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    free = _axis_free_dofs(mesh)
    Kf = K[np.ix_(free, free)].tocsc()
    Mf = M[np.ix_(free, free)].tocsc()
    scale = float(np.mean(Kf.diagonal()) / max(np.max(Mf.diagonal()), 1e-300))
    if sigma is None:
        sigma = -1e-6 * scale if mesh.harmonic == 0 else 0.0
    if drop_tol is None:
        drop_tol = 1e-8 * scale
    k = count + extra + (1 if mesh.harmonic == 0 else 0)
    # the gravity-wave mass matrix only has rank = number of surface DOFs;
    # ARPACK cannot build a longer M-orthogonal factorization than that
    rank_cap = int(np.count_nonzero(Mf.diagonal()))
    k = min(k, free.size - 1, max(rank_cap - 2, count))
    ncv = min(free.size, max(2 * k + 1, 20), max(rank_cap, k + 2))
    # fixed starting vector: ARPACK otherwise draws a random one, which
    # perturbs the last few digits between calls in the same process
    v0 = np.ones(free.size)
    try:
        vals, vecs = eigsh(Kf, k=k, M=Mf, sigma=sigma, which="LM", ncv=ncv,
                           v0=v0)
    except Exception as exc:  # factorization failure / ARPACK no-convergence
        raise EigenSolveError(f"shift-invert eigensolve failed: {exc}") from exc
    order = np.argsort(vals)
    vals, vecs = vals[order], vecs[:, order]
    keep = vals > drop_tol
    vals, vecs = vals[keep], vecs[:, keep]
    if vals.size < count:
        raise EigenSolveError(
            f"requested {count} positive modes, converged {vals.size}")
    vals, vecs = vals[:count], vecs[:, :count]

    res = np.empty(count)
    for i in range(count):
        x = vecs[:, i]
        kx = Kf @ x
        res[i] = np.linalg.norm(kx - vals[i] * (Mf @ x)) / np.linalg.norm(kx)
        nrm = math.sqrt(abs(x @ (Mf @ x)))
        vecs[:, i] = x / nrm
        # fixed sign convention: largest-|p| surface value positive
        top = np.argmax(np.abs(vecs[:, i]))
        if vecs[top, i] < 0:
            vecs[:, i] = -vecs[:, i]
    if np.any(res > residual_tol):
        raise EigenSolveError(f"eigen residuals {res} exceed {residual_tol}")

    full = np.zeros((K.shape[0], count))
    full[free, :] = vecs
    return EigenSolution(omega2=vals, vectors=full, harmonic=mesh.harmonic,
                         mesh=mesh, residuals=res)


def sloshing_modes(geom: TankGeometry, liquid: Liquid, g: float, count: int,
                   target_size: float = 0.04, harmonic: int = 1,
                   grading: str = UNIFORM,
                   compressible: bool = False) -> EigenSolution:
    """Convenience wrapper: mesh, assemble, solve."""
    mesh = build_mesh(geom, target_size, grading=grading, harmonic=harmonic)
    K, M = assemble(mesh, liquid, g, compressible=compressible)
    return solve_modes(K, M, count, mesh)


def surface_nodes(mesh: LiquidMesh) -> np.ndarray:
    """Indices of free-surface nodes sorted by radius."""
    ids = np.unique(mesh.boundary_edges[FREE_SURFACE].ravel())
    return ids[np.argsort(mesh.nodes[ids, 0])]


def surface_elevation(sol: EigenSolution, mode: int, liquid: Liquid,
                      g: float):
    """Free-surface elevation shape eta(r) = p(r, H) / (rho g) for one mode."""
    if not 0 <= mode < sol.omega2.size:
        raise IndexError(f"mode {mode} outside solution of size {sol.omega2.size}")
    ids = surface_nodes(sol.mesh)
    r = sol.mesh.nodes[ids, 0]
    eta = sol.vectors[ids, mode] / (liquid.density * g)
    return r, eta
