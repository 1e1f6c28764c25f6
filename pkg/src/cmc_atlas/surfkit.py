"""Fundamental forms, curvatures and Hopf coefficients of sampled surfaces.

Derivatives are taken by finite differences on a uniform rectangular chart.
The unit normal n1 follows the chart orientation: for a cylindrical chart
(s, theta) of a surface of revolution with rho increasing in s it is the normal
whose vertical part is  -eps sn(rho) rho' / W, the convention in which the
upper unit hemisphere has H = +1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .ambient import AmbientSpace, DomainError, inner, quadric_defect

CHARTS = ("cylindrical", "conformal", "natural", "graph")


@dataclass
class SurfacePatch:
    """Embedded points on a uniform (u, v) lattice.

    ``points`` has shape (len(u), len(v), embed_dim).
    """

    space: AmbientSpace
    chart: str
    u: np.ndarray
    v: np.ndarray
    points: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.chart not in CHARTS:
            raise DomainError(f"unknown chart {self.chart!r}")
        self.u = np.asarray(self.u, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        self.points = np.asarray(self.points, dtype=float)
        if self.points.shape != (self.u.size, self.v.size, self.space.embed_dim):
            raise DomainError(f"points shape {self.points.shape} does not match the grid")

    @property
    def shape(self):
        return self.points.shape[:2]

    @property
    def steps(self):
        return float(self.u[1] - self.u[0]), float(self.v[1] - self.v[0])

    def quadric_defect(self) -> float:
        return float(np.max(quadric_defect(self.space, self.points)))

    def interior(self, width: int = 1) -> tuple:
        return (slice(width, -width), slice(width, -width))


@lru_cache(maxsize=None)
def fd_weights(offsets: tuple, deriv: int) -> np.ndarray:
    """Finite-difference weights at 0 for the given integer offsets (Fornberg)."""
    x = np.asarray(offsets, dtype=float)
    n = x.size
    # solve the Vandermonde moment system exactly enough for <= 7 points
    A = np.vander(x, n, increasing=True).T
    b = np.zeros(n)
    b[deriv] = math.factorial(deriv)
    return np.linalg.solve(A, b)


@lru_cache(maxsize=None)
def diff_matrix(n: int, deriv: int, order: int = 4) -> np.ndarray:
    """Dense (n, n) differentiation matrix for unit spacing.

    Central stencils inside, one-sided stencils of the same order near the ends.
    """
    half = (2 * ((deriv + 1) // 2) - 1 + order) // 2
    one_sided = order + deriv
    if n < one_sided:
        raise DomainError(f"need at least {one_sided} nodes per axis, got {n}")
    D = np.zeros((n, n))
    for i in range(n):
        if half <= i < n - half:
            offs = tuple(range(-half, half + 1))
            start = i - half
        elif i < half:
            start = 0
            offs = tuple(range(-i, one_sided - i))
        else:
            start = n - one_sided
            offs = tuple(range(start - i, n - i))
        D[i, start:start + len(offs)] = fd_weights(offs, deriv)
    return D


def derivative(a: np.ndarray, h: float, axis: int, deriv: int = 1, order: int = 4) -> np.ndarray:
    D = diff_matrix(a.shape[axis], deriv, order)
    out = np.tensordot(D, np.moveaxis(a, axis, 0), axes=(1, 0))
    return np.moveaxis(out, 0, axis) / h**deriv


def _cross_lowered(space: AmbientSpace, rows: list) -> np.ndarray:
    """Vector orthogonal (in the signed metric) to all rows."""
    S = space.sig
    low = [r * S for r in rows]
    if space.embed_dim == 3:
        return np.cross(low[0], low[1])
    M = np.stack(low, axis=-2)  # (..., 3, 4)
    out = np.empty(M.shape[:-2] + (4,), dtype=M.dtype)
    for i in range(4):
        cols = [j for j in range(4) if j != i]
        out[..., i] = (-1) ** i * np.linalg.det(M[..., :, cols])
    return out


# overall sign making the cross-product normal agree with the convention above;
# fixed against the hemisphere and the closed-form profile normals
def _orientation_sign(space: AmbientSpace) -> float:
    if space.kappa == 0:
        return -float(space.eps)
    return float(space.eps * space.eps_kappa)


@dataclass
class FormField:
    """Per-node first and second fundamental forms and curvatures."""

    E: np.ndarray
    F: np.ndarray
    G: np.ndarray
    e: np.ndarray
    f: np.ndarray
    g: np.ndarray
    H: np.ndarray
    K_ext: np.ndarray
    K_int: np.ndarray
    K_bar: np.ndarray
    nu: np.ndarray
    n1: np.ndarray
    n2: np.ndarray | None
    tau: tuple
    flags: np.ndarray
    omega: np.ndarray | None = None
    Xu: np.ndarray | None = None
    Xv: np.ndarray | None = None
    order: int = 0

    def interior(self, name: str, width: int = 1) -> np.ndarray:
        a = getattr(self, name)
        return a[width:-width, width:-width]

    def gauss_residual(self, eps: int) -> np.ndarray:
        return self.K_int - self.K_bar - eps * self.K_ext


def _brioschi(E, F, G, h1, h2, order):
    d = lambda a, ax, k=1: derivative(a, (h1, h2)[ax], ax, k, order)
    Eu, Ev = d(E, 0), d(E, 1)
    Fu, Fv = d(F, 0), d(F, 1)
    Gu, Gv = d(G, 0), d(G, 1)
    Evv = d(E, 1, 2)
    Guu = d(G, 0, 2)
    Fuv = d(Fu, 1)
    m1 = np.stack([
        np.stack([-0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev], -1),
        np.stack([Fv - 0.5 * Gu, E, F], -1),
        np.stack([0.5 * Gv, F, G], -1),
    ], -2)
    z = np.zeros_like(E)
    m2 = np.stack([
        np.stack([z, 0.5 * Ev, 0.5 * Gu], -1),
        np.stack([0.5 * Ev, E, F], -1),
        np.stack([0.5 * Gu, F, G], -1),
    ], -2)
    return (np.linalg.det(m1) - np.linalg.det(m2)) / (E * G - F * F) ** 2


def default_order(n: int) -> int:
    """Highest supported stencil order (6, 4 or 2) for an axis with n nodes."""
    for p in (6, 4, 2):
        if n >= p + 3:
            return p
    return 2


def fundamental_forms(patch: SurfacePatch, order: int | None = None) -> FormField:
    """First and second fundamental forms, H, extrinsic and intrinsic curvature.

    ``order`` is the finite-difference order (default: 6 when every axis has at
    least 9 nodes).  Flags: bit 1 degenerate or non space-like metric, bit 2
    singular normal solve.
    """
    space = patch.space
    nu_, nv_ = patch.shape
    if min(nu_, nv_) < 5:
        raise DomainError("grid must be at least 5x5")
    if order is None:
        order = default_order(min(nu_, nv_))
    h1, h2 = patch.steps
    X = patch.points
    Xu = derivative(X, h1, 0, 1, order)
    Xv = derivative(X, h2, 1, 1, order)
    Xuu = derivative(X, h1, 0, 2, order)
    Xvv = derivative(X, h2, 1, 2, order)
    Xuv = derivative(Xu, h2, 1, 1, order)
    E = inner(space, Xu, Xu)
    F = inner(space, Xu, Xv)
    G = inner(space, Xv, Xv)
    det = E * G - F * F
    flags = np.zeros((nu_, nv_), dtype=np.int8)
    flags[(det <= 0) | (E <= 0) | ~np.isfinite(det)] |= 1

    if space.kappa != 0:
        n2 = X.copy()
        n2[..., 3] = 0.0
        n2 = n2 / space.radius
        N = _cross_lowered(space, [Xu, Xv, n2])
    else:
        n2 = None
        N = _cross_lowered(space, [Xu, Xv])
    NN = inner(space, N, N)
    bad = ~(NN * space.eps > 0)
    flags[bad] |= 2
    with np.errstate(invalid="ignore", divide="ignore"):
        n1 = _orientation_sign(space) * N / np.sqrt(np.abs(NN))[..., None]
        e = inner(space, Xuu, n1)
        f = inner(space, Xuv, n1)
        g = inner(space, Xvv, n1)
        H = (e * G - 2 * f * F + g * E) / (2 * det)
        K_ext = (e * g - f * f) / det
        dt = space.dt
        t1 = inner(space, Xu, dt)
        t2 = inner(space, Xv, dt)
        eps = space.eps
        Eh, Fh, Gh = E - eps * t1 * t1, F - eps * t1 * t2, G - eps * t2 * t2
        K_bar = space.kappa * (Eh * Gh - Fh * Fh) / det
        K_int = _brioschi(E, F, G, h1, h2, order)
        nu = inner(space, n1, dt)
    omega = None
    if patch.chart == "conformal":
        with np.errstate(invalid="ignore", divide="ignore"):
            omega = 0.25 * np.log(det)
    return FormField(E, F, G, e, f, g, H, K_ext, K_int, K_bar, nu, n1, n2, (t1, t2), flags, omega, Xu, Xv, order)


def conformality_defect(ff: FormField, width: int = 1) -> float:
    E, F, G = (ff.interior(k, width) for k in "EFG")
    return float(np.max((np.abs(E - G) + np.abs(F)) / np.maximum(E, G)))


@dataclass
class QField:
    psi1: np.ndarray
    psi2: np.ndarray
    psi: np.ndarray
    H: np.ndarray
    steps: tuple
    conformal_factor: np.ndarray
    meta: dict = field(default_factory=dict)

    def interior(self, name: str = "psi", width: int = 2) -> np.ndarray:
        return getattr(self, name)[width:-width, width:-width]


def hopf_coefficients(patch: SurfacePatch, ff: FormField | None = None, tol_conf: float | None = None,
                      H=None, order: int | None = None) -> QField:
    """Hopf coefficients psi1, psi2 and psi = 2 H psi1 - eps (eps_kappa / r) psi2.

    The coefficients are those of dz^2 in the conformal chart z = u + i v
    (no division by the conformal factor).  ``H`` (scalar or nodal array)
    overrides the pointwise numerical mean curvature when given.
    """
    if patch.chart != "conformal":
        raise DomainError(f"Hopf coefficients need a conformal chart, got {patch.chart!r}")
    if ff is None:
        ff = fundamental_forms(patch, order=order)
    tol = tol_conf if tol_conf is not None else patch.meta.get("tol_conf", 1e-6)
    # low-order forms carry truncation error in E - G; judge the chart itself
    best = default_order(min(patch.shape))
    ref = ff if ff.order >= best else fundamental_forms(patch, order=best)
    defect = conformality_defect(ref)
    if not defect <= tol:
        raise DomainError(f"chart is not conformal: defect {defect:.3e} > {tol:.1e}")
    space = patch.space
    psi1 = 0.5 * (ff.e - ff.g) - 1j * ff.f
    lam = 0.5 * (ff.E + ff.G)
    Hf = ff.H if H is None else np.broadcast_to(np.asarray(H, dtype=float), ff.H.shape).copy()
    if space.kappa == 0:
        psi2 = np.zeros_like(psi1)
        psi = 2 * Hf * psi1
    else:
        r, eps = space.radius, space.eps
        t1, t2 = ff.tau
        e2 = eps / r * t1 * t1 - lam / r
        g2 = eps / r * t2 * t2 - lam / r
        f2 = eps / r * t1 * t2
        psi2 = 0.5 * (e2 - g2) - 1j * f2
        psi = 2 * Hf * psi1 - eps * space.eps_kappa / r * psi2
    return QField(psi1, psi2, psi, Hf, patch.steps, lam)


@dataclass
class CRResidual:
    field: np.ndarray
    max: float
    l2: float
    steps: tuple


def cr_residual(q: QField, width: int = 2) -> CRResidual:
    """Discrete d psi / d zbar = (psi_u + i psi_v) / 2 by central differences.

    Aggregates skip ``width`` boundary rows, where the forms use one-sided stencils.
    """
    psi = q.psi
    if min(psi.shape) < 5:
        raise DomainError("grid must be at least 5x5")
    h1, h2 = q.steps
    pu = np.zeros_like(psi)
    pv = np.zeros_like(psi)
    pu[1:-1, :] = (psi[2:, :] - psi[:-2, :]) / (2 * h1)
    pv[:, 1:-1] = (psi[:, 2:] - psi[:, :-2]) / (2 * h2)
    res = 0.5 * (pu + 1j * pv)
    core = np.abs(res[width:-width, width:-width])
    return CRResidual(res, float(np.max(core)), float(np.sqrt(np.mean(core**2))), (h1, h2))


def curvature_norm(ff: FormField, space: AmbientSpace) -> np.ndarray:
    """|A|^2 = h_ij h^ij, contracted with the induced metric."""
    det = ff.E * ff.G - ff.F**2
    Gi11, Gi12, Gi22 = ff.G / det, -ff.F / det, ff.E / det
    # A^i_j = g^ik h_kj
    a11 = Gi11 * ff.e + Gi12 * ff.f
    a12 = Gi11 * ff.f + Gi12 * ff.g
    a21 = Gi12 * ff.e + Gi22 * ff.f
    a22 = Gi12 * ff.f + Gi22 * ff.g
    return a11 * a11 + 2 * a12 * a21 + a22 * a22


def curvature_norm_residual(q: QField, ff: FormField, space: AmbientSpace) -> np.ndarray:
    """Relative defect of |A|^2 = 2 H^2 + 2 |psi1|^2 / lambda^2 on a conformal chart, lambda = e^{2 omega}."""
    A2 = curvature_norm(ff, space)
    rhs = 2 * ff.H**2 + 2 * np.abs(q.psi1) ** 2 / q.conformal_factor**2
    return np.abs(A2 - rhs) / np.maximum(np.abs(A2), 1e-300)


def psi2_norm_residual(q: QField, ff: FormField, space: AmbientSpace) -> np.ndarray:
    """Relative defect of |(eps_kappa / r) psi2|^2 = kappa^2 lambda^2 (1 - nu^2)^2 / 4.

    This is the normalisation of psi2 in the dz^2 convention; kappa = 0 gives 0 = 0.
    """
    if space.kappa == 0:
        return np.abs(q.psi2)
    lhs = np.abs(q.psi2) ** 2 / space.radius**2
    rhs = space.kappa**2 * q.conformal_factor**2 * (1 - ff.nu**2) ** 2 / 4
    return np.abs(lhs - rhs) / np.maximum(np.maximum(lhs, rhs), 1e-300)
