"""Integral identities and a priori estimates checked by quadrature.

Surface integrals use the trapezoid rule on the chart lattice; the reported
value is the Richardson combination of the full lattice and its every-other
node sublattice, and the plain trapezoid values at h, 2h (and 4h when the
lattice allows it) are kept to expose the second order convergence.

Boundary conventions: the patch lattice is either ``"axis"`` (first u-row
collapses to a point, last u-row is the boundary, v is periodic) or
``"annulus"`` (both u-rows are boundary, v periodic).  The co-normal nu points
out of the surface.  The cap Omega closing a boundary in a horizontal plane is
oriented so that its normal and the surface normal both point into, or both
out of, the enclosed region.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .ambient import AmbientSpace, DomainError, coordinates, inner, integral_sn
from .surfkit import FormField, SurfacePatch, fundamental_forms


@dataclass(frozen=True)
class KillingField:
    """Vertical translation d/dt or rotation about a vertical axis.

    ``axis`` is the base point of the rotation axis: a unit vector of the
    quadric for kappa != 0, a point (x, y) of the plane for kappa = 0.
    """

    space: AmbientSpace
    kind: str = "vertical"
    axis: tuple | None = None

    def __post_init__(self):
        if self.kind not in ("vertical", "rotation"):
            raise DomainError(f"unknown Killing field kind {self.kind!r}")
        if self.kind == "rotation":
            if self.axis is None:
                default = (0.0, 0.0) if self.space.kappa == 0 else (self.space.radius, 0.0, 0.0)
                object.__setattr__(self, "axis", default)
            want = 2 if self.space.kappa == 0 else 3
            if len(self.axis) != want:
                raise DomainError(f"rotation axis needs {want} components")

    @classmethod
    def vertical(cls, space: AmbientSpace) -> "KillingField":
        return cls(space, "vertical")

    @classmethod
    def rotation(cls, space: AmbientSpace, axis=None) -> "KillingField":
        return cls(space, "rotation", None if axis is None else tuple(float(a) for a in axis))

    def __call__(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        Y = np.zeros_like(X)
        if self.kind == "vertical":
            Y[..., -1] = 1.0
            return Y
        if self.space.kappa == 0:
            cx, cy = self.axis
            Y[..., 0] = -(X[..., 1] - cy)
            Y[..., 1] = X[..., 0] - cx
            return Y
        a = np.asarray(self.axis, dtype=float)
        a = a / math.sqrt(abs(np.sum(a * a * self.space.sig[:3])))
        p = X[..., :3]
        cr = np.cross(np.broadcast_to(a, p.shape), p)
        Y[..., :3] = cr * self.space.sig[:3]
        return Y

    def norm(self, X) -> np.ndarray:
        Y = self(X)
        return np.sqrt(np.abs(inner(self.space, Y, Y)))


@dataclass
class BoundaryLoop:
    """Samples of a closed boundary curve (periodic, last sample excluded)."""

    points: np.ndarray
    tau: np.ndarray
    nu: np.ndarray
    normal: np.ndarray
    dsigma: np.ndarray
    dv: float

    @property
    def length(self) -> float:
        return float(np.sum(self.dsigma) * self.dv)

    def integrate(self, values) -> float:
        return float(np.sum(np.asarray(values) * self.dsigma) * self.dv)


def _periodic(patch: SurfacePatch):
    v = patch.v
    if not np.isclose(v[-1] - v[0], 2 * math.pi, rtol=0, atol=1e-12):
        raise DomainError("boundary extraction needs v spanning exactly 2 pi")
    if np.max(np.abs(patch.points[:, 0] - patch.points[:, -1])) > 1e-9:
        raise DomainError("patch is not closed in v")


def boundary_loops(patch: SurfacePatch, ff: FormField, layout: str = "axis") -> list:
    if layout not in ("axis", "annulus"):
        raise DomainError(f"unknown layout {layout!r}")
    _periodic(patch)
    rows = [(-1, 1.0)] if layout == "axis" else [(0, -1.0), (-1, 1.0)]
    space = patch.space
    out = []
    h2 = patch.steps[1]
    for i, outward in rows:
        Xu = ff.Xu[i, :-1]
        Xv = ff.Xv[i, :-1]
        E, F, G = ff.E[i, :-1], ff.F[i, :-1], ff.G[i, :-1]
        w = Xu - (F / G)[:, None] * Xv
        wn = np.sqrt(inner(space, w, w))
        nu = outward * w / wn[:, None]
        tau = Xv / np.sqrt(G)[:, None]
        out.append(BoundaryLoop(patch.points[i, :-1], tau, nu, ff.n1[i, :-1], np.sqrt(G), h2))
    return out


def _trapezoid_weights(n: int, step: int, periodic: bool) -> np.ndarray:
    w = np.zeros(n)
    w[::step] = 1.0
    if not periodic:
        w[0] = w[-1] = 0.5
    else:
        w[-1] = 0.0
    return w


def _levels(nu: int, nv: int) -> int:
    k = 1
    while (nu - 1) % (2 * k) == 0 and (nv - 1) % (2 * k) == 0 and (nu - 1) // (2 * k) >= 4 \
            and k < 4:
        k *= 2
    return int(round(math.log2(k))) + 1


def surface_integral(patch: SurfacePatch, ff: FormField, integrand, periodic_v: bool = True) -> dict:
    """Trapezoid values of int f dA at h, 2h, 4h (as far as the lattice allows)
    and the Richardson value from the two finest."""
    nu, nv = patch.shape
    h1, h2 = patch.steps
    det = np.abs(ff.E * ff.G - ff.F**2)
    dA = np.sqrt(det)
    f = np.asarray(integrand) * dA
    f = np.where(dA > 0, f, 0.0)
    if np.any(~np.isfinite(f)):
        raise DomainError("integrand is not finite on the lattice")
    vals = []
    for lev in range(_levels(nu, nv)):
        st = 2**lev
        wu = _trapezoid_weights(nu, st, False)
        wv = _trapezoid_weights(nv, st, periodic_v)
        vals.append(float(wu @ f @ wv) * h1 * h2 * st * st)
    rich = (4 * vals[0] - vals[1]) / 3 if len(vals) > 1 else vals[0]
    return {"value": rich, "trapezoid": vals}


def _observed_order(errs) -> float | None:
    if len(errs) < 2 or errs[0] == 0 or errs[1] == 0:
        return None
    return math.log2(abs(errs[1]) / abs(errs[0]))


@dataclass
class CheckReport:
    check: str
    lhs: float
    rhs: float
    residual: float
    grid: tuple
    tolerance: float
    passed: bool
    meta: dict = field(default_factory=dict)

    @property
    def relative(self) -> float:
        return self.residual / max(abs(self.lhs), abs(self.rhs), 1e-300)

    def as_dict(self) -> dict:
        return {"check": self.check, "lhs": self.lhs, "rhs": self.rhs, "residual": self.residual,
                "grid": list(self.grid), "tolerance": self.tolerance, "pass": bool(self.passed),
                **({"meta": self.meta} if self.meta else {})}


def _H_field(patch, ff, H):
    if H is None:
        H = patch.meta.get("H_target")
    if H is None:
        return ff.H
    return np.full_like(ff.H, float(H))


def minkowski_check(patch: SurfacePatch, Y: KillingField, H: float | None = None, layout: str = "axis",
                    tol: float = 1e-6, relative: bool = True, ff: FormField | None = None) -> CheckReport:
    """First Minkowski formula: int eps H <Y, n> dA = 1/2 oint <Y, nu> dsigma.

    With ``relative`` the residual is compared with tol * max(|lhs|, |rhs|, 1).
    """
    ff = ff or fundamental_forms(patch)
    space = patch.space
    Hf = _H_field(patch, ff, H)
    with np.errstate(invalid="ignore"):
        integrand = space.eps * Hf * inner(space, Y(patch.points), ff.n1)
    integrand = np.where(np.isfinite(integrand), integrand, 0.0)
    lhs = surface_integral(patch, ff, integrand)
    loops = boundary_loops(patch, ff, layout)
    rhs = 0.5 * sum(lp.integrate(inner(space, Y(lp.points), lp.nu)) for lp in loops)
    res = abs(lhs["value"] - rhs)
    trap_res = [abs(v - rhs) for v in lhs["trapezoid"]]
    meta = {"lhs_trapezoid": lhs["trapezoid"], "trapezoid_residuals": trap_res,
            "observed_order": _observed_order(trap_res), "relative": relative}
    scale = max(abs(lhs["value"]), abs(rhs), 1.0) if relative else 1.0
    ok = res <= tol * scale
    return CheckReport("minkowski", lhs["value"], rhs, res, patch.shape, tol, bool(ok), meta)


def enclosed_area(space: AmbientSpace, loop: BoundaryLoop) -> float:
    """Area of the horizontal region bounded by a loop that winds once around rho = 0."""
    rho, theta, _ = coordinates(space, loop.points)
    th = np.unwrap(np.append(theta, theta[0]))
    if not np.isclose(abs(th[-1] - th[0]), 2 * math.pi, atol=1e-6):
        raise DomainError("boundary loop does not wind once around the axis")
    F = integral_sn(space.kappa, rho)
    F = np.append(F, F[0])
    dth = np.diff(th)
    # periodic trapezoid of int F dtheta
    return float(abs(np.sum(0.5 * (F[1:] + F[:-1]) * dth)))


def cap_normal_sign(patch: SurfacePatch, ff: FormField, t_plane: float) -> float:
    """Sign s with n_Omega = s d/dt consistent with the surface orientation."""
    t = patch.points[..., -1]
    side = np.sign(np.mean(t - t_plane))
    if side == 0:
        raise DomainError("surface lies in the plane of its boundary")
    dist = np.where(np.all(np.isfinite(ff.n1), axis=-1), np.abs(t - t_plane), -1.0)
    far = np.unravel_index(np.argmax(dist), t.shape)
    # component of n along d/dt, in units of d/dt
    comp = patch.space.eps * float(inner(patch.space, ff.n1[far], patch.space.dt))
    if comp == 0 or not math.isfinite(comp):
        raise DomainError("cannot orient the cap: the normal is horizontal at the farthest point")
    inward = comp * (-side) > 0
    return float(side if inward else -side)


def flux_formula_check(patch: SurfacePatch, Y: KillingField, H: float | None = None,
                       layout: str = "axis", tol: float = 1e-6,
                       ff: FormField | None = None) -> CheckReport:
    """Killing flux formula oint <Y, nu> dsigma + 2 H eps int_Omega <Y, n_Omega> = 0.

    Omega is the horizontal cap bounded by the (single) boundary loop; lhs is
    the boundary term, rhs minus the cap term.
    """
    ff = ff or fundamental_forms(patch)
    space = patch.space
    loops = boundary_loops(patch, ff, layout)
    if len(loops) != 1:
        raise DomainError("flux formula needs a single boundary loop")
    lp = loops[0]
    t = lp.points[..., -1]
    if np.ptp(t) > 1e-9:
        raise DomainError("boundary is not in a horizontal plane")
    t_plane = float(np.mean(t))
    if H is None:
        H = patch.meta.get("H_target")
    if H is None:
        raise DomainError("flux formula needs the constant H")
    sgn = cap_normal_sign(patch, ff, t_plane)
    area = enclosed_area(space, lp)
    if Y.kind == "vertical":
        cap = sgn * space.eps * area
    else:
        cap = 0.0
    bdry = lp.integrate(inner(space, Y(lp.points), lp.nu))
    lhs = bdry
    rhs = -2 * H * space.eps * cap
    res = abs(lhs - rhs)
    ok = res <= tol * max(abs(lhs), abs(rhs), 1.0)
    return CheckReport("flux", lhs, rhs, res, patch.shape, tol, bool(ok),
                       {"n_omega_sign": sgn, "omega_area": area, "t_plane": t_plane})


@dataclass
class Bound:
    value: float
    applies: bool
    reason: str = ""


def height_bound(space: AmbientSpace, H: float, sup_Y: float, inf_Y: float) -> Bound:
    """Upper bound on the flow parameter of a CMC Killing graph (eps = +1).

    kappa >= 0: (1/|H|) sup|Y| / inf|Y|^2;  kappa < 0 (needs 2H^2 + kappa > 0):
    |H| / (H^2 + kappa/2) * sup|Y| / inf|Y|^2.
    """
    if space.eps != 1:
        return Bound(math.inf, False, "height estimate needs eps = +1")
    if inf_Y <= 0 or sup_Y < inf_Y:
        raise DomainError("need 0 < inf|Y| <= sup|Y|")
    if H == 0:
        return Bound(math.inf, False, "no bound for H = 0")
    ratio = sup_Y / inf_Y**2
    if space.kappa >= 0:
        return Bound(ratio / abs(H), True)
    if 2 * H * H + space.kappa <= 0:
        return Bound(math.inf, False, "needs 2H^2 + kappa > 0")
    return Bound(abs(H) / (H * H + space.kappa / 2) * ratio, True)


def area_bound(max_sn_boundary: float, min_sn_domain: float, perimeter: float, area: float) -> float:
    """|H| <= (max_dOmega sn / min_Omega sn) |dOmega| / (2 |Omega|)."""
    if min_sn_domain <= 0:
        raise DomainError("the domain meets the axis of the Killing field")
    if area <= 0 or perimeter <= 0:
        raise DomainError("need positive area and perimeter")
    return max_sn_boundary / min_sn_domain * perimeter / (2 * area)


def disc_area_bound(space: AmbientSpace, center_rho: float, radius: float) -> float:
    """area_bound for a disc of the vertical plane (flat metric d rho^2 + dt^2)."""
    if center_rho - radius <= 0:
        raise DomainError("the disc meets the axis")
    from .ambient import sn
    hi = center_rho + radius
    if space.kappa > 0:
        top = space.rho_max()
        if hi >= top:
            raise DomainError("the disc meets the antipodal axis")
        rr = np.linspace(center_rho - radius, hi, 2001)
        s = sn(space.kappa, rr)
        mx, mn = float(np.max(s)), float(np.min(s))
    else:
        mx, mn = float(sn(space.kappa, hi)), float(sn(space.kappa, center_rho - radius))
    return area_bound(mx, mn, 2 * math.pi * radius, math.pi * radius**2)


@dataclass
class AngleProfile:
    angles: np.ndarray
    mean: float
    std: float
    t_plane: float


def contact_angle_profile(patch: SurfacePatch, layout: str = "axis", ff: FormField | None = None,
                          plane_tol: float = 1e-9) -> AngleProfile:
    """<n1, d/dt> sampled along the boundary, which must lie in a horizontal plane."""
    ff = ff or fundamental_forms(patch)
    loops = boundary_loops(patch, ff, layout)
    if len(loops) != 1:
        raise DomainError("contact angle needs a single boundary loop")
    lp = loops[0]
    t = lp.points[..., -1]
    if np.ptp(t) > plane_tol:
        raise DomainError(f"boundary is not planar: t varies by {np.ptp(t):.3e}")
    ang = inner(patch.space, lp.normal, patch.space.dt)
    return AngleProfile(ang, float(np.mean(ang)), float(np.std(ang)), float(np.mean(t)))
