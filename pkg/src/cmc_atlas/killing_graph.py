"""CMC Killing graphs over domains of a vertical plane.

The plane Pi = {theta = 0} carries coordinates (rho, t) and the flat metric
d rho^2 + dt^2.  A graph of u over Omega in Pi is the surface
(rho, t) -> (rho, theta = u(rho, t), t): each point of Omega is moved by the
angle u along the flow of the rotation field Y = d/dtheta, |Y| = sn_kappa(rho).

Mean curvature is measured with respect to the normal n with <Y, n> > 0.  In
that convention a graph with H > 0 and u = 0 on the boundary bends to u < 0,
so heights are compared through max |u|.

Omega is discretised on a square lattice (xi, eta) in [-1, 1]^2: affinely for
rectangles, through the elliptical square-to-disc map for discs.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sps
from scipy.interpolate import RectBivariateSpline
from scipy.sparse.linalg import spsolve

from .ambient import AmbientSpace, DomainError, embed_point, inner, sn
from .integral_checks import KillingField, height_bound, area_bound
from .surfkit import SurfacePatch, fundamental_forms

STENCIL = 3  # the order-2 operator couples each node to its 3x3 neighbourhood


@dataclass
class GraphDomain:
    """Disc or rectangle of the vertical plane, sampled on an n x n lattice.

    ``shape`` is ("disc", (rho_c, t_c, r)) or ("rectangle", (rho0, rho1, t0, t1)).
    """

    space: AmbientSpace
    kind: str
    params: tuple
    n: int
    xi: np.ndarray = field(init=False)
    rho: np.ndarray = field(init=False)
    t: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.space.eps != 1 or self.space.kappa < 0:
            raise DomainError("Killing graphs need eps = +1 and kappa >= 0")
        if self.kind not in ("disc", "rectangle"):
            raise DomainError(f"unknown domain kind {self.kind!r}")
        if self.n < 5:
            raise DomainError("lattice needs at least 5 nodes per side")
        self.params = tuple(float(p) for p in self.params)
        self.xi = np.linspace(-1.0, 1.0, self.n)
        X, E = np.meshgrid(self.xi, self.xi, indexing="ij")
        self.rho, self.t = self.map(X, E)
        lo, hi = self.rho_range
        if lo <= 0:
            raise DomainError("the domain meets the axis of Y")
        if self.space.kappa > 0 and hi >= self.space.rho_max():
            raise DomainError("the domain meets the antipodal axis of Y")

    @classmethod
    def disc(cls, space, center_rho, radius, n=65, center_t=0.0):
        if radius <= 0:
            raise DomainError("radius must be positive")
        return cls(space, "disc", (center_rho, center_t, radius), n)

    @classmethod
    def rectangle(cls, space, rho0, rho1, t0, t1, n=65):
        if not (rho1 > rho0 and t1 > t0):
            raise DomainError("empty rectangle")
        return cls(space, "rectangle", (rho0, rho1, t0, t1), n)

    def map(self, x, y):
        if self.kind == "disc":
            rc, tc, r = self.params
            dx = x * np.sqrt(np.maximum(1.0 - y * y / 2.0, 0.0))
            dy = y * np.sqrt(np.maximum(1.0 - x * x / 2.0, 0.0))
            return rc + r * dx, tc + r * dy
        r0, r1, t0, t1 = self.params
        return r0 + (x + 1) * (r1 - r0) / 2, t0 + (y + 1) * (t1 - t0) / 2

    @property
    def rho_range(self) -> tuple:
        if self.kind == "disc":
            rc, _, r = self.params
            return rc - r, rc + r
        return self.params[0], self.params[1]

    @property
    def h(self) -> float:
        return float(self.xi[1] - self.xi[0])

    def with_n(self, n: int) -> "GraphDomain":
        return GraphDomain(self.space, self.kind, self.params, n)

    def sn_extremes(self) -> tuple:
        """(inf, sup) of |Y| = sn(rho) over the closure of Omega."""
        lo, hi = self.rho_range
        rr = np.linspace(lo, hi, 4001)
        if self.space.kappa > 0:
            q = math.sqrt(self.space.kappa)
            peak = math.pi / (2 * q)
            if lo < peak < hi:
                rr = np.append(rr, peak)
        s = sn(self.space.kappa, rr)
        return float(np.min(s)), float(np.max(s))

    @property
    def gamma(self) -> float:
        lo, hi = self.sn_extremes()
        return lo * lo / (hi * hi)

    @property
    def gamma_tilde(self) -> float:
        """2 - inf|Y|^2 / sup|Y|^2, the constant the existence argument uses."""
        return 2.0 - self.gamma

    @property
    def gamma_tilde_statement(self) -> float:
        """2 - sup f / inf f with f = 1/|Y|^2."""
        return 2.0 - 1.0 / self.gamma

    def boundary(self, samples: int = 512) -> np.ndarray:
        """Counter-clockwise boundary samples (rho, t)."""
        s = np.linspace(0.0, 2 * math.pi, samples, endpoint=False)
        if self.kind == "disc":
            rc, tc, r = self.params
            return np.stack([rc + r * np.cos(s), tc + r * np.sin(s)], axis=-1)
        r0, r1, t0, t1 = self.params
        per = 2 * (r1 - r0 + t1 - t0)
        d = s / (2 * math.pi) * per
        pts = []
        for x in d:
            if x < r1 - r0:
                pts.append((r0 + x, t0))
            elif x < r1 - r0 + t1 - t0:
                pts.append((r1, t0 + x - (r1 - r0)))
            elif x < 2 * (r1 - r0) + t1 - t0:
                pts.append((r1 - (x - (r1 - r0) - (t1 - t0)), t1))
            else:
                pts.append((r0, t1 - (x - 2 * (r1 - r0) - (t1 - t0))))
        return np.array(pts)

    def kappa_g(self, samples: int = 512) -> np.ndarray:
        """Geodesic curvature of the boundary from circumcircles of consecutive samples."""
        p = self.boundary(samples)
        a, b, c = np.roll(p, 1, axis=0), p, np.roll(p, -1, axis=0)
        ab, bc, ca = b - a, c - b, a - c
        cross = ab[:, 0] * bc[:, 1] - ab[:, 1] * bc[:, 0]
        la, lb, lc = (np.hypot(v[:, 0], v[:, 1]) for v in (ab, bc, ca))
        return 2.0 * cross / (la * lb * lc)

    @property
    def area(self) -> float:
        if self.kind == "disc":
            return math.pi * self.params[2] ** 2
        r0, r1, t0, t1 = self.params
        return (r1 - r0) * (t1 - t0)

    @property
    def perimeter(self) -> float:
        if self.kind == "disc":
            return 2 * math.pi * self.params[2]
        r0, r1, t0, t1 = self.params
        return 2 * (r1 - r0 + t1 - t0)

    def max_sn_boundary(self) -> float:
        p = self.boundary(4096)
        return float(np.max(sn(self.space.kappa, p[:, 0])))

    def as_dict(self) -> dict:
        return {"kind": self.kind, "params": list(self.params), "n": self.n,
                "space": self.space.as_dict()}


@dataclass
class Margin:
    value: float
    guaranteed: bool
    kappa_g_min: float
    gamma_tilde: float
    reason: str = ""


def existence_margin(domain: GraphDomain, H: float, tol: float = 1e-12) -> Margin:
    """min kappa_g / gamma~ - |H|; a positive value guarantees a solution."""
    kg = float(np.min(domain.kappa_g()))
    gt = domain.gamma_tilde
    if kg <= tol:
        return Margin(kg / gt - abs(H), False, kg, gt, "boundary curvature is not positive")
    val = kg / gt - abs(H)
    if abs(val) <= tol:
        return Margin(0.0, False, kg, gt, "boundary case |H| = kappa_g / gamma~")
    return Margin(val, val > 0, kg, gt, "" if val > 0 else "|H| exceeds kappa_g / gamma~")


def graph_patch(domain: GraphDomain, u: np.ndarray) -> SurfacePatch:
    pts = embed_point(domain.space, domain.rho, u, domain.t)
    return SurfacePatch(domain.space, "graph", domain.xi, domain.xi, pts)


def _normal_sign(domain: GraphDomain) -> float:
    P = graph_patch(domain, np.zeros((domain.n, domain.n)))
    ff = fundamental_forms(P, order=2)
    c = domain.n // 2
    Y = KillingField.rotation(domain.space)(P.points[c, c])
    return float(np.sign(inner(domain.space, Y, ff.n1[c, c])))


def _H_op(domain, u, sign):
    ff = fundamental_forms(graph_patch(domain, u), order=2)
    return sign * ff.H, ff


def _jacobian(domain, u, H0, sign, delta=1e-7):
    n = domain.n
    m = n - 2
    rows, cols, vals = [], [], []
    I, J = np.meshgrid(np.arange(1, n - 1), np.arange(1, n - 1), indexing="ij")
    for ci in range(STENCIL):
        for cj in range(STENCIL):
            mask = (I % STENCIL == ci) & (J % STENCIL == cj)
            up = u.copy()
            up[1:-1, 1:-1][mask] += delta
            Hp, _ = _H_op(domain, up, sign)
            dH = (Hp[1:-1, 1:-1] - H0[1:-1, 1:-1]) / delta
            # each interior node sees exactly one perturbed node of this colour in its 3x3 box
            for di in (-1, 0, 1):
                for dj in (-1, 0, 1):
                    si, sj = I + di, J + dj
                    ok = (si >= 1) & (si <= n - 2) & (sj >= 1) & (sj <= n - 2)
                    ok &= (si % STENCIL == ci) & (sj % STENCIL == cj)
                    rows.append(((I - 1) * m + (J - 1))[ok])
                    cols.append(((si - 1) * m + (sj - 1))[ok])
                    vals.append(dH[ok])
    return sps.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                          shape=(m * m, m * m))


@dataclass
class GraphSolution:
    domain: GraphDomain
    H: float
    u: np.ndarray
    converged: bool
    iterations: int
    residual: float
    history: list
    margin: Margin
    patch: SurfacePatch
    Yn: np.ndarray
    H_num: np.ndarray
    elapsed: float
    meta: dict = field(default_factory=dict)

    @property
    def height(self) -> float:
        return float(np.max(np.abs(self.u)))

    def diagnostics(self) -> dict:
        inner_Yn = self.Yn[1:-1, 1:-1]
        grad = gradient_norm(self)
        return {
            "converged": self.converged,
            "iterations": self.iterations,
            "residual": self.residual,
            "height_max_abs_u": self.height,
            "max_u": float(np.max(self.u)),
            "min_u": float(np.min(self.u)),
            "min_Yn": float(np.min(self.Yn)),
            "min_Yn_interior": float(np.min(inner_Yn)),
            "min_Yn_boundary": float(np.min(boundary_values(self.Yn))),
            "max_grad_u": float(np.max(grad)),
            "existence_margin": self.margin.value,
            "guaranteed": self.margin.guaranteed,
        }

    def as_json(self) -> dict:
        return {
            "schema": 1,
            "domain": self.domain.as_dict(),
            "H": self.H,
            "grid": [self.domain.n, self.domain.n],
            "u": self.u.tolist(),
            "diagnostics": self.diagnostics(),
        }


def boundary_values(a: np.ndarray) -> np.ndarray:
    return np.concatenate([a[0, :], a[-1, :], a[1:-1, 0], a[1:-1, -1]])


def gradient_norm(sol: GraphSolution) -> np.ndarray:
    """|grad u| in the flat metric of the plane, by chain rule through the lattice map."""
    d = sol.domain
    h = d.h
    from .surfkit import derivative
    ux = derivative(sol.u, h, 0, 1, 2)
    uy = derivative(sol.u, h, 1, 1, 2)
    rx, ry = derivative(d.rho, h, 0, 1, 2), derivative(d.rho, h, 1, 1, 2)
    tx, ty = derivative(d.t, h, 0, 1, 2), derivative(d.t, h, 1, 1, 2)
    det = rx * ty - ry * tx
    with np.errstate(divide="ignore", invalid="ignore"):
        ur = (ty * ux - tx * uy) / det
        ut = (-ry * ux + rx * uy) / det
        g = np.hypot(ur, ut)
    return np.where(np.isfinite(g), g, 0.0)


def _newton(domain, H, u, sign, tol, max_iter, history):
    Hn, ff = _H_op(domain, u, sign)
    F = Hn - H
    res = float(np.max(np.abs(F[1:-1, 1:-1])))
    history.append(res)
    it = 0
    while res > tol and it < max_iter:
        it += 1
        Jm = _jacobian(domain, u, Hn, sign)
        du = spsolve(Jm.tocsc(), -F[1:-1, 1:-1].ravel()).reshape(domain.n - 2, domain.n - 2)
        lam = 1.0
        while True:
            trial = u.copy()
            trial[1:-1, 1:-1] += lam * du
            Ht, fft = _H_op(domain, trial, sign)
            Ft = Ht - H
            rt = float(np.max(np.abs(Ft[1:-1, 1:-1])))
            if np.isfinite(rt) and rt < res:
                break
            lam *= 0.5
            if lam < 1e-4:
                return u, Hn, ff, res, it, False
        u, Hn, ff, F, res = trial, Ht, fft, Ft, rt
        history.append(res)
    return u, Hn, ff, res, it, res <= tol


def solve_killing_graph(domain: GraphDomain, H: float, tol: float = 1e-8, max_iter: int = 25,
                        continuation_step: float = 0.05) -> GraphSolution:
    """Damped Newton solve of H(graph u) = H with u = 0 on the boundary.

    The discrete operator is the order-2 surfkit mean curvature (9-point
    stencil); the Jacobian is assembled by finite differences over 9 colour
    classes.  When the direct solve stalls, H is reached by continuation.
    Iterations count Newton steps over all continuation stages.
    """
    t0 = time.perf_counter()
    if domain.n < 33:
        raise DomainError("solver lattice needs at least 33 x 33 nodes")
    margin = existence_margin(domain, H)
    sign = _normal_sign(domain)
    u0 = np.zeros((domain.n, domain.n))
    history: list = []
    u, Hn, ff, res, its, ok = _newton(domain, H, u0, sign, tol, max_iter, history)
    stages = [H]
    if not ok:
        nsteps = max(1, int(math.ceil(abs(H) / continuation_step)))
        u = u0
        its = 0
        stages = list(np.linspace(0, H, nsteps + 1)[1:])
        for Hs in stages:
            u, Hn, ff, res, k, ok = _newton(domain, Hs, u, sign, tol, max_iter - its, history)
            its += k
            if not ok:
                break
    patch = graph_patch(domain, u)
    Y = KillingField.rotation(domain.space)(patch.points)
    Yn = inner(domain.space, Y, sign * ff.n1)
    return GraphSolution(domain, float(H), u, bool(ok), its, res, history, margin, patch, Yn,
                         Hn, time.perf_counter() - t0, {"normal_sign": sign, "stages": len(stages)})


@dataclass
class EstimateReport:
    name: str
    value: float
    bound: float
    slack: float
    passed: bool
    meta: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"check": self.name, "value": self.value, "bound": self.bound, "slack": self.slack,
                "pass": bool(self.passed), **({"meta": self.meta} if self.meta else {})}


def gradient_estimate_check(sol: GraphSolution) -> EstimateReport:
    """<Y, n> >= inf|Y| sqrt((kappa_g^2 - H^2 gamma~^2)/kappa_g^2) on the boundary."""
    d = sol.domain
    c_tilde = d.sn_extremes()[0]
    kg = sol.margin.kappa_g_min
    gt = d.gamma_tilde
    disc = kg * kg - sol.H**2 * gt * gt
    if kg <= 0 or disc < 0:
        return EstimateReport("gradient", float("nan"), float("nan"), float("nan"), False,
                              {"reason": "estimate needs |H| < kappa_g / gamma~"})
    bound = c_tilde * math.sqrt(disc) / kg
    val = float(np.min(boundary_values(sol.Yn)))
    return EstimateReport("gradient", val, bound, val - bound, val >= bound)


def height_check(sol: GraphSolution) -> EstimateReport:
    lo, hi = sol.domain.sn_extremes()
    b = height_bound(sol.domain.space, sol.H, hi, lo)
    if not b.applies:
        return EstimateReport("height", sol.height, math.inf, math.inf, True, {"reason": b.reason})
    return EstimateReport("height", sol.height, b.value, b.value - sol.height, sol.height < b.value)


def area_check(sol: GraphSolution) -> EstimateReport:
    d = sol.domain
    b = area_bound(d.max_sn_boundary(), d.sn_extremes()[0], d.perimeter, d.area)
    return EstimateReport("area", abs(sol.H), b, b - abs(sol.H), abs(sol.H) <= b)


def superharmonic_check(sol: GraphSolution, tol: float = 1e-9) -> EstimateReport:
    """phi = H c u + <Y, n>, c = inf|Y|^2, must not dip below its boundary minimum."""
    c = sol.domain.sn_extremes()[0] ** 2
    phi = sol.H * c * sol.u + sol.Yn
    bmin = float(np.min(boundary_values(phi)))
    imin = float(np.min(phi[1:-1, 1:-1]))
    return EstimateReport("superharmonic", imin, bmin, imin - bmin, imin >= bmin - tol)


def min_principle_check(sol: GraphSolution, tol: float = 1e-9) -> EstimateReport:
    """min over Omega of <Y, n> is attained on the boundary."""
    bmin = float(np.min(boundary_values(sol.Yn)))
    imin = float(np.min(sol.Yn[1:-1, 1:-1]))
    return EstimateReport("min_principle", imin, bmin, imin - bmin, imin >= bmin - tol)


def interior_mask(domain: GraphDomain, fraction: float) -> np.ndarray:
    """Nodes of the concentric copy of Omega scaled by ``fraction``."""
    if domain.kind == "disc":
        rc, tc, r = domain.params
        return np.hypot(domain.rho - rc, domain.t - tc) <= fraction * r
    r0, r1, t0, t1 = domain.params
    cr, ct = (r0 + r1) / 2, (t0 + t1) / 2
    return ((np.abs(domain.rho - cr) <= fraction * (r1 - r0) / 2)
            & (np.abs(domain.t - ct) <= fraction * (t1 - t0) / 2))


def refined_H_error(sol: GraphSolution, factor: int = 2, fraction: float = 0.8) -> dict:
    """|H - H_target| of the solution resampled by cubic splines on a lattice
    refined ``factor`` times, using the order-2 operator there.

    "max" is taken over the scaled subdomain ``fraction * Omega``, away from the
    degenerate corners of the lattice map; "max_all" over every interior node.
    """
    d = sol.domain
    fine = d.with_n(factor * (d.n - 1) + 1)
    spl = RectBivariateSpline(d.xi, d.xi, sol.u, kx=3, ky=3)
    uf = spl(fine.xi, fine.xi)
    Hn, _ = _H_op(fine, uf, sol.meta["normal_sign"])
    err = np.abs(Hn - sol.H)
    inner_err = err[2:-2, 2:-2]
    mask = interior_mask(fine, fraction)[2:-2, 2:-2]
    return {"max": float(np.max(inner_err[mask])), "max_all": float(np.max(inner_err)),
            "h": d.h, "fraction": fraction}


def refinement_study(domain: GraphDomain, H: float, levels=(33, 65, 129), **kw) -> dict:
    """Refined-H errors over a sequence of lattices, with C_k = err_k / h_k^2."""
    rows = []
    for n in levels:
        sol = solve_killing_graph(domain.with_n(n), H, **kw)
        e = refined_H_error(sol)
        rows.append({"n": n, "h": e["h"], "err": e["max"], "err_all": e["max_all"],
                     "C": e["max"] / e["h"] ** 2, "converged": sol.converged})
    orders = [math.log(a["err"] / b["err"]) / math.log(a["h"] / b["h"]) for a, b in zip(rows, rows[1:])]
    return {"levels": rows, "orders": orders}
