"""Helicoidal CMC surfaces and their isometric (m, b) families.

A helicoidal surface is X(s, theta) = (rho(s), theta, t(s) + b theta).  In the
natural parameters (s~, theta~) its metric is ds~^2 + U(s~)^2 dtheta~^2 and
sn_kappa(rho)^2 = m^2 U^2 - eps b^2.  Constant mean curvature reduces to a
first order equation for

    z = cs_kappa(rho)   (kappa != 0),        z = m^2 U^2   (kappa = 0),

whose closed-form solutions are the branches listed in ``BRANCHES``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.optimize import brentq, minimize_scalar

from .ambient import AmbientSpace, DomainError, embed_sn_cs
from .surfkit import SurfacePatch

BRANCHES = (
    "HL3plus",
    "HL3minus",
    "MinusMinus",
    "MinusPlus",
    "PlusPlus",
    "DegenerateLinear",
    "DegenerateQuadratic",
    "EuclideanRiemannian",
    "MaximalFlat",
)

# |A| below this counts as A = 0 for the degenerate branches
DEGENERATE_TOL = 1e-12


@dataclass(frozen=True)
class FamilyParams:
    space: AmbientSpace
    H: float
    I: float
    m: float = 1.0
    b: float = 0.0
    s0: float = 0.0
    branch: str | None = None

    def __post_init__(self):
        if self.m == 0 or not math.isfinite(self.m):
            raise DomainError("m must be a non-zero real")
        for name in ("H", "I", "b", "s0"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if self.branch is None:
            object.__setattr__(self, "branch", default_branch(self.space, self.H, self.I, self.b))
        elif self.branch not in BRANCHES:
            raise DomainError(f"unknown branch {self.branch!r}")

    # coefficients of  zdot^2 = -A z^2 - 2 B z + C  (kappa != 0)
    @property
    def A(self) -> float:
        return 4 * self.H**2 * self.space.eps + self.space.kappa

    @property
    def B(self) -> float:
        return 2 * self.H * self.space.kappa * self.I * self.space.eps

    @property
    def C(self) -> float:
        k = self.space.kappa
        return k * (1 - k * self.I**2 * self.space.eps)

    @property
    def D(self) -> float:
        k = self.space.kappa
        return k * (self.A - k * k * self.I**2 * self.space.eps)

    @property
    def a(self) -> float:
        """a = H eps b^2 + I, the kappa = 0 shift."""
        return self.H * self.space.eps * self.b**2 + self.I

    def as_dict(self) -> dict:
        return {"space": self.space.as_dict(), "H": self.H, "I": self.I, "m": self.m,
                "b": self.b, "s0": self.s0, "branch": self.branch}


def _hl3_K(H, a, b):
    return (4 * H * H * b * b + 4 * H * a - 1) / (4 * H**4)


def admissible_branches(space: AmbientSpace, H: float, I: float, b: float = 0.0) -> list:
    """Branches whose sign conditions hold for (H, I, b)."""
    k, eps = space.kappa, space.eps
    if k == 0:
        if eps == 1:
            return ["EuclideanRiemannian"]
        if H == 0:
            return ["MaximalFlat"]
        K = _hl3_K(H, H * eps * b * b + I, b)
        if K > 0:
            return ["HL3plus"]
        if K < 0:
            return ["HL3minus"]
        return []
    p = FamilyParams.__new__(FamilyParams)
    object.__setattr__(p, "space", space)
    object.__setattr__(p, "H", H)
    object.__setattr__(p, "I", I)
    A, B, C, D = p.A, p.B, p.C, p.D
    if abs(A) <= DEGENERATE_TOL * max(1.0, abs(k)):
        if B == 0:
            return ["DegenerateLinear"] if C > 0 else []
        return ["DegenerateQuadratic"]
    if A > 0:
        return ["PlusPlus"] if D > 0 else []
    if D < 0:
        return ["MinusMinus"]
    if D > 0:
        return ["MinusPlus"]
    return []


def default_branch(space: AmbientSpace, H: float, I: float, b: float = 0.0) -> str:
    br = admissible_branches(space, H, I, b)
    if not br:
        raise DomainError(f"no closed-form branch for kappa={space.kappa}, eps={space.eps}, H={H}, I={I}, b={b}")
    return br[0]


def _z_closed(p: FamilyParams):
    """Return (z, zdot) callables of the branch formula."""
    k, eps, H, br = p.space.kappa, p.space.eps, p.H, p.branch
    s0 = p.s0
    if k != 0:
        A, B, C, D = p.A, p.B, p.C, p.D
        if br in ("MinusMinus", "MinusPlus", "PlusPlus"):
            c = math.sqrt(abs(D)) / abs(A)
            shift = -B / A
            lam = math.sqrt(abs(A))
            f, df = {
                "MinusMinus": (np.sinh, np.cosh),
                "MinusPlus": (np.cosh, np.sinh),
                "PlusPlus": (np.sin, np.cos),
            }[br]
            return (lambda s: c * f(lam * (s - s0)) + shift,
                    lambda s: c * lam * df(lam * (s - s0)))
        if br == "DegenerateLinear":
            rc = math.sqrt(C)
            return (lambda s: rc * (np.asarray(s) - s0), lambda s: np.full_like(np.asarray(s, float), rc))
        # DegenerateQuadratic: zdot^2 = C - 2 B z
        return (lambda s: (C - B * B * (np.asarray(s) - s0) ** 2) / (2 * B),
                lambda s: -B * (np.asarray(s) - s0))
    a, b = p.a, p.b
    if br == "MaximalFlat":
        q = a * a + b * b
        return (lambda s: (np.asarray(s) - s0) ** 2 - q, lambda s: 2 * (np.asarray(s) - s0))
    if br in ("HL3plus", "HL3minus"):
        c = math.sqrt(abs(_hl3_K(H, a, b)))
        shift = -(1 - 2 * H * a) / (2 * H * H)
        f, df = (np.sinh, np.cosh) if br == "HL3plus" else (np.cosh, np.sinh)
        return (lambda s: c * f(2 * H * (s - s0)) + shift,
                lambda s: 2 * H * c * df(2 * H * (s - s0)))
    # EuclideanRiemannian
    if H == 0:
        q = a * a + b * b
        return (lambda s: (np.asarray(s) - s0) ** 2 + q, lambda s: 2 * (np.asarray(s) - s0))
    Dd = (1 + 2 * H * a) ** 2 / (4 * H * H) - (a * a + b * b)
    if Dd < 0:
        raise DomainError("no real solution: discriminant is negative")
    amp = math.sqrt(Dd) / abs(H)
    mid = (1 + 2 * H * a) / (2 * H * H)
    return (lambda s: mid + amp * np.sin(2 * H * (s - s0)),
            lambda s: 2 * H * amp * np.cos(2 * H * (s - s0)))


def _check_branch(p: FamilyParams):
    ok = admissible_branches(p.space, p.H, p.I, p.b)
    if p.branch not in ok:
        raise DomainError(
            f"branch {p.branch} does not match the sign conditions (admissible: {ok or 'none'})"
        )


@dataclass
class UProfile:
    """Closed-form datum U(s~) of a helicoidal CMC surface.

    ``domain`` is the s~-interval on which sn^2 = m^2 U^2 - eps b^2 and U are
    positive (and cs > 1 when kappa < 0).
    """

    params: FamilyParams
    domain: tuple
    residual: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self._z, self._zd = _z_closed(self.params)

    @property
    def space(self) -> AmbientSpace:
        return self.params.space

    def z(self, s):
        return self._z(np.asarray(s, dtype=float))

    def zdot(self, s):
        return self._zd(np.asarray(s, dtype=float))

    def zddot(self, s):
        p = self.params
        z = self.z(s)
        if p.space.kappa != 0:
            return -p.A * z - p.B
        eps, H = p.space.eps, p.H
        return 2.0 - 4.0 * eps * H * (H * z - p.a)

    def sn2(self, s):
        """sn_kappa(rho)^2 = m^2 U^2 - eps b^2."""
        k = self.space.kappa
        z = self.z(s)
        if k == 0:
            return z - self.space.eps * self.params.b**2
        return (1.0 - z * z) / k

    def cs(self, s):
        if self.space.kappa == 0:
            return np.ones_like(np.asarray(s, dtype=float))
        return self.z(s)

    def mU2(self, s):
        return self.sn2(s) + self.space.eps * self.params.b**2

    def mU2_dot(self, s):
        k = self.space.kappa
        if k == 0:
            return self.zdot(s)
        return -2.0 * self.z(s) * self.zdot(s) / k

    def mU2_ddot(self, s):
        k = self.space.kappa
        if k == 0:
            return self.zddot(s)
        zd = self.zdot(s)
        return -2.0 * (zd * zd + self.z(s) * self.zddot(s)) / k

    def U(self, s):
        return np.sqrt(self.mU2(s)) / abs(self.params.m)

    def Udot(self, s):
        m2 = self.params.m**2
        return self.mU2_dot(s) / (2 * m2 * self.U(s))

    def Uddot(self, s):
        m2 = self.params.m**2
        U = self.U(s)
        Ud = self.Udot(s)
        return (self.mU2_ddot(s) / (2 * m2) - Ud * Ud) / U

    def P(self, s):
        """R / cs_kappa(rho) = I - 2 H int sn, signed."""
        p = self.params
        k = self.space.kappa
        if k == 0:
            return p.I - p.H * self.sn2(s)
        return p.I + 2 * p.H * self.z(s) / k

    def R(self, s):
        return self.cs(s) * self.P(s)

    def R2(self, s):
        """eps ((m^2U^2 - eps b^2)(1 - kappa sn^2) - m^4 U^2 Udot^2), from U alone."""
        sn2 = self.sn2(s)
        m4U2Ud2 = self.mU2_dot(s) ** 2 / 4.0
        return self.space.eps * (sn2 * (1 - self.space.kappa * sn2) - m4U2Ud2)

    def ode_residual(self, s):
        """Pointwise residual of the first-order equation for z, relative to its size."""
        p = self.params
        z = self.z(s)
        zd = self.zdot(s)
        if self.space.kappa != 0:
            rhs = -p.A * z * z - 2 * p.B * z + p.C
            lhs = zd * zd
        else:
            eps = self.space.eps
            rhs = z - eps * p.b**2 - eps * (p.H * z - p.a) ** 2
            lhs = zd * zd / 4
        scale = 1.0 + np.abs(lhs) + np.abs(z) ** 2 * (abs(p.H) ** 2 + abs(self.space.kappa))
        return np.abs(lhs - rhs) / scale

    def validity(self, s):
        """Positive exactly on the admissible set."""
        sn2 = self.sn2(s)
        v = np.minimum(sn2, self.mU2(s))
        if self.space.kappa < 0:
            v = np.minimum(v, self.z(s) - 1.0)
        return v

    def contains(self, s) -> bool:
        s = np.asarray(s, dtype=float)
        lo, hi = self.domain
        return bool(np.all((s >= lo) & (s <= hi)))


def _valid_interval(up: UProfile, s_ref, window):
    """Admissible component around s_ref, cut at sign changes and at zeros
    where the validity function only touches 0 (passages through the axis)."""
    lo, hi = s_ref - window, s_ref + window
    grid = np.linspace(lo, hi, 4001)
    with np.errstate(all="ignore"):
        v = up.validity(grid)
    fin = np.isfinite(v)
    scale = max(1.0, float(np.max(np.abs(v[fin])))) if np.any(fin) else 1.0

    def val(x):
        with np.errstate(all="ignore"):
            return float(up.validity(x))

    ok = fin & (v > 0)
    cuts = []
    for i in range(1, grid.size - 1):
        if ok[i] and v[i] <= v[i - 1] and v[i] <= v[i + 1] and v[i] < 1e-3 * scale:
            r = minimize_scalar(val, bounds=(grid[i - 1], grid[i + 1]), method="bounded",
                                options={"xatol": 1e-14})
            if r.fun <= 1e-12 * scale:
                cuts.append(float(r.x))
    if not np.any(ok):
        raise DomainError("empty domain: the branch has no admissible samples near s0")
    i = int(np.argmin(np.abs(grid - s_ref)))
    if not ok[i]:
        idx = np.flatnonzero(ok)
        i = int(idx[np.argmin(np.abs(idx - i))])
    j0 = i
    while j0 > 0 and ok[j0 - 1]:
        j0 -= 1
    j1 = i
    while j1 < grid.size - 1 and ok[j1 + 1]:
        j1 += 1

    def edge(j_in, j_out):
        if j_out < 0 or j_out >= grid.size:
            return float(grid[j_in])
        a, b = grid[j_in], grid[j_out]
        fb = val(b)
        if np.isfinite(fb) and fb <= 0:
            return float(brentq(val, a, b, xtol=1e-15))
        return float(a)

    a, b = edge(j0, j0 - 1), edge(j1, j1 + 1)
    here = grid[i]
    for c in cuts:
        if a < c <= here:
            a = c
        elif here < c < b:
            b = c
    if not b > a:
        raise DomainError("empty domain")
    return a, b


def u_solution(space: AmbientSpace, H: float, I: float, b: float = 0.0, m: float = 1.0,
               branch: str | None = None, s0: float = 0.0, s_ref: float | None = None,
               window: float = 10.0) -> UProfile:
    """Closed-form helicoidal datum for the given branch.

    The domain is the admissible component nearest ``s_ref`` (default s0)
    inside [s_ref - window, s_ref + window].
    """
    p = FamilyParams(space, float(H), float(I), float(m), float(b), float(s0), branch)
    _check_branch(p)
    up = UProfile(p, (float("nan"), float("nan")), float("nan"))
    ref = p.s0 if s_ref is None else float(s_ref)
    up.domain = _valid_interval(up, ref, window)
    lo, hi = up.domain
    probe = np.linspace(lo, hi, 257)
    up.residual = float(np.max(up.ode_residual(probe)))
    if not up.residual <= 1e-10:
        raise DomainError(f"closed form fails its equation: residual {up.residual:.3e}")
    return up


def family_member(up: UProfile, m: float) -> UProfile:
    """Member with parameter m that keeps both U(s~) and H.

    For kappa = 0 this fixes b and I from m (the CMC-preserving subfamily of
    the isometric family); for kappa != 0 it exists only when H = 0.  Raises
    when no real member exists.
    """
    p = up.params
    k, eps, H = p.space.kappa, p.space.eps, p.H
    m = float(m)
    if m == 0:
        raise DomainError("m must be non-zero")
    m2 = m * m
    if k == 0:
        if H == 0:
            if abs(m2 - 1) > 1e-14:
                raise DomainError("for H = 0 the U-preserving members have m = +-1")
            raise DomainError("for H = 0 use family_member_circle to move along I^2 + b^2 = const")
        a = (m2 * (eps + 2 * H * p.a) - eps) / (2 * H)
        # matching constant terms: a^2 + b^2 = m^4 (a0^2 + b0^2)
        b2 = m2 * m2 * (p.a**2 + p.b**2) - a * a
        if b2 < 0:
            raise DomainError(f"no real pitch for m={m}")
        b = math.copysign(math.sqrt(b2), p.b if p.b != 0 else 1.0)
        I = a - H * eps * b2
    else:
        if H != 0:
            raise DomainError("for kappa != 0 and H != 0 the only U-preserving members are trivial")
        b2 = (m2 - 1) / (k * eps) + m2 * p.b**2
        I2 = (1 - m2 * (1 - k * eps * p.I**2)) / (k * eps)
        if b2 < 0 or I2 < 0:
            raise DomainError(f"no real member for m={m}")
        b = math.copysign(math.sqrt(b2), p.b if p.b != 0 else 1.0)
        I = math.copysign(math.sqrt(I2), p.I if p.I != 0 else 1.0)
    q = replace(p, m=m, b=b, I=I, branch=None)
    if q.branch != p.branch:
        q = replace(q, branch=p.branch)
    _check_branch(q)
    out = UProfile(q, up.domain, float("nan"), dict(up.meta))
    probe = np.linspace(*up.domain, 257)
    out.residual = float(np.max(out.ode_residual(probe)))
    return out


def family_member_circle(up: UProfile, angle: float) -> UProfile:
    """kappa = 0, H = 0 member (m = 1) with (I, b) rotated by ``angle`` on I^2 + b^2 = const."""
    p = up.params
    if p.space.kappa != 0 or p.H != 0:
        raise DomainError("circle members need kappa = 0 and H = 0")
    r = math.hypot(p.I, p.b)
    ang = math.atan2(p.b, p.I) + angle
    q = replace(p, I=r * math.cos(ang), b=r * math.sin(ang))
    out = UProfile(q, up.domain, float("nan"), dict(up.meta))
    out.residual = float(np.max(out.ode_residual(np.linspace(*up.domain, 257))))
    return out


@dataclass
class BourChart:
    """Sampled chart functions of a family member on an s~-grid."""

    up: UProfile
    s: np.ndarray
    rho: np.ndarray
    sn: np.ndarray
    cs: np.ndarray
    t: np.ndarray
    drift: np.ndarray

    def theta(self, theta_tilde):
        """theta(s~, theta~) on the grid s~ x theta~."""
        th = np.asarray(theta_tilde, dtype=float)
        return th[None, :] / self.up.params.m + self.drift[:, None]


def _cumulative(f, s, epsabs=1e-13, epsrel=1e-11):
    out = np.zeros_like(s)
    for i in range(1, s.size):
        val, _ = quad(f, s[i - 1], s[i], epsabs=epsabs, epsrel=epsrel, limit=200)
        out[i] = out[i - 1] + val
    return out


def _rho_from(space, sn, cs):
    k = space.kappa
    if k == 0:
        return sn
    q = math.sqrt(abs(k))
    if k > 0:
        return np.arctan2(q * sn, cs) / q
    return np.arcsinh(q * sn) / q


def bour_coordinates(up: UProfile, s, t0: float = 0.0) -> BourChart:
    """rho, t and the theta drift of the member on the s~-samples ``s``.

    dt/ds~ = m U P / sn^2 and theta = theta~/m + h(s~) with
    dh/ds~ = -eps b (dt/ds~) / (m^2 U^2), so that the metric is ds~^2 + U^2 dtheta~^2.
    t and h vanish at s[0] (t starts at ``t0``).
    """
    s = np.asarray(s, dtype=float)
    if s.ndim != 1 or s.size < 2 or np.any(np.diff(s) <= 0):
        raise DomainError("s must be an increasing 1-d grid")
    if not up.contains(s) or np.any(up.validity(s) <= 0):
        raise DomainError(f"samples leave the admissible domain {up.domain}")
    p = up.params
    eps, m, b = up.space.eps, p.m, p.b

    def dt(x):
        return m * up.U(x) * up.P(x) / up.sn2(x)

    def dh(x):
        return -eps * b * dt(x) / up.mU2(x)

    t = t0 + _cumulative(dt, s)
    h = _cumulative(dh, s) if b != 0 else np.zeros_like(s)
    sn2 = up.sn2(s)
    snv = np.sqrt(sn2)
    csv = up.cs(s)
    return BourChart(up, s, _rho_from(up.space, snv, csv), snv, csv, t, h)


def helicoidal_patch(up: UProfile, s, theta_tilde, meta: dict | None = None) -> SurfacePatch:
    """Embedded member in its natural chart (s~, theta~)."""
    ch = bour_coordinates(up, s)
    th_t = np.asarray(theta_tilde, dtype=float)
    theta = ch.theta(th_t)
    shape = theta.shape
    sn = np.broadcast_to(ch.sn[:, None], shape)
    cs = np.broadcast_to(ch.cs[:, None], shape)
    t = ch.t[:, None] + up.params.b * theta
    pts = embed_sn_cs(up.space, sn, cs, theta, t)
    m = {"H_target": up.params.H, "family": up.params.as_dict()}
    m.update(meta or {})
    return SurfacePatch(up.space, "natural", ch.s, th_t, pts, m)


def conformal_map(U, s_ref: float, u, rtol: float = 1e-13) -> np.ndarray:
    """s~(u) solving ds~/du = U(s~), s~(0) = s_ref, at the parameters ``u``.

    Inverts u(s~) = int_{s_ref}^{s~} ds / U.
    """
    u = np.asarray(u, dtype=float)

    def f(_, y):
        val = U(y[0])
        if not np.isfinite(val) or val <= 0:
            raise DomainError(f"U must be positive, got {val} at s~={y[0]}")
        return [val]

    out = np.empty_like(u)
    for sign, mask in ((1, u >= 0), (-1, u < 0)):
        if not np.any(mask):
            continue
        uu = u[mask]
        order = np.argsort(sign * uu)
        span = float(np.max(sign * uu))
        if span == 0:
            out[mask] = s_ref
            continue
        sol = solve_ivp(f, (0.0, sign * span), [s_ref], method="DOP853", t_eval=uu[order],
                        rtol=rtol, atol=rtol * 1e-2)
        if not sol.success:
            raise DomainError(f"conformal reparametrization failed: {sol.message}")
        vals = np.empty_like(uu)
        vals[order] = sol.y[0]
        out[mask] = vals
    return out


def u_of_s(U, s_ref: float, s) -> np.ndarray:
    """u(s~) = int_{s_ref}^{s~} ds / U by adaptive quadrature."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    out = np.empty_like(s)
    for i, x in enumerate(s):
        out[i] = quad(lambda y: 1.0 / U(y), s_ref, x, epsabs=1e-14, epsrel=1e-12, limit=200)[0]
    return out


def conformal_reparametrize(up: UProfile, u, theta_tilde, s_ref: float | None = None,
                            meta: dict | None = None) -> SurfacePatch:
    """Embedded member in the conformal chart (u, v) = (int ds~/U, theta~).

    Nodes are placed at s~(u) by integrating ds~/du = U; the chart origin u = 0
    sits at ``s_ref`` (default: middle of the domain).
    """
    lo, hi = up.domain
    ref = 0.5 * (lo + hi) if s_ref is None else float(s_ref)
    u = np.asarray(u, dtype=float)
    s = conformal_map(lambda x: float(up.U(x)) if lo <= x <= hi else float("nan"), ref, u)
    if np.any(np.diff(s) <= 0):
        raise DomainError("U must be positive on the chart")
    start = float(s[0])
    ch = bour_coordinates(up, s)
    th_t = np.asarray(theta_tilde, dtype=float)
    theta = ch.theta(th_t)
    shape = theta.shape
    t = ch.t[:, None] + up.params.b * theta
    pts = embed_sn_cs(up.space, np.broadcast_to(ch.sn[:, None], shape),
                      np.broadcast_to(ch.cs[:, None], shape), theta, t)
    m = {"H_target": up.params.H, "family": up.params.as_dict(), "s_tilde": s,
         "s_ref": ref, "s_start": start, "tol_conf": 1e-8}
    m.update(meta or {})
    return SurfacePatch(up.space, "conformal", u, th_t, pts, m)


def isometric_deformation(up: UProfile, m: float, b: float, s, theta_tilde,
                          meta: dict | None = None) -> SurfacePatch:
    """Member X_{m,b} of the isometric family of the surface carried by ``up``.

    Keeps the metric ds~^2 + U^2 dtheta~^2 for any (m, b); the mean curvature is
    preserved only for the members returned by ``family_member``.  R and cs take
    the signs they have on the base surface at the first sample and must not
    vanish on ``s``.
    """
    if m == 0:
        raise DomainError("m must be non-zero")
    s = np.asarray(s, dtype=float)
    if not up.contains(s):
        raise DomainError(f"samples leave the domain {up.domain}")
    space = up.space
    eps, k = space.eps, space.kappa
    U = up.U(s)
    Ud = up.Udot(s)
    mU2 = m * m * U * U
    sn2 = mU2 - eps * b * b
    cs2 = 1.0 - k * sn2
    R2 = eps * (sn2 * cs2 - m**4 * U * U * Ud * Ud)
    if np.any(sn2 <= 0) or np.any(cs2 <= 0) or np.any(R2 < 0):
        raise DomainError("(m, b) leaves the admissible set on these samples")
    cs_sign = 1.0 if k <= 0 else float(np.sign(up.cs(s[0])) or 1.0)
    R_sign = float(np.sign(up.R(s[0])) or 1.0)
    cs = cs_sign * np.sqrt(cs2)
    snv = np.sqrt(sn2)

    def dt(x):
        x = np.asarray(x, dtype=float)
        Ux, Udx = up.U(x), up.Udot(x)
        a2 = m * m * Ux * Ux - eps * b * b
        c2 = 1.0 - k * a2
        r = R_sign * np.sqrt(np.maximum(eps * (a2 * c2 - m**4 * Ux * Ux * Udx * Udx), 0.0))
        return m * Ux * r / (cs_sign * np.sqrt(c2) * a2)

    t = _cumulative(dt, s)
    h = _cumulative(lambda x: -eps * b * dt(x) / (m * m * up.U(x) ** 2), s) if b != 0 else np.zeros_like(s)
    th_t = np.asarray(theta_tilde, dtype=float)
    theta = th_t[None, :] / m + h[:, None]
    shape = theta.shape
    pts = embed_sn_cs(space, np.broadcast_to(snv[:, None], shape), np.broadcast_to(cs[:, None], shape),
                      theta, t[:, None] + b * theta)
    md = {"base": up.params.as_dict(), "m": float(m), "b": float(b)}
    md.update(meta or {})
    return SurfacePatch(space, "natural", s, th_t, pts, md)


@dataclass
class SecondForm:
    s: np.ndarray
    e: np.ndarray
    f: np.ndarray
    g: np.ndarray
    R: np.ndarray
    K_int: np.ndarray
    K_bar: np.ndarray


def second_form_closed(up: UProfile, s) -> SecondForm:
    """Closed-form second fundamental form in the natural chart.

    g~ = -R/m^2 and f~ = b cs/(m^2 U); e~ follows from the Gauss equation
    K_int = K_bar + eps K_ext with K_int = -U''/U, which puts R in its
    denominator.  Samples with R = 0 are rejected.
    """
    s = np.asarray(s, dtype=float)
    p = up.params
    eps, k, m, b = up.space.eps, up.space.kappa, p.m, p.b
    R = up.R(s)
    if np.any(R == 0):
        raise DomainError("R vanishes on the evaluation set")
    U = up.U(s)
    g = -R / m**2
    f = b * up.cs(s) / (m**2 * U)
    K_int = -up.Uddot(s) / U
    # vertical components of the tangent frame
    dt = m * U * up.P(s) / up.sn2(s)
    T = dt * (1.0 - eps * b * b / up.mU2(s))  # d/ds~ of (t + b theta)
    Eh = 1.0 - eps * T * T
    Gh = U * U - eps * b * b / m**2
    Fh = -T * b / m
    K_bar = k * (Eh * Gh - Fh * Fh) / (U * U)
    e = (eps * U * U * (K_int - K_bar) + f * f) / g
    return SecondForm(s, e, f, g, R, K_int, K_bar)


def mean_curvature_closed(sf: SecondForm, up: UProfile) -> np.ndarray:
    """2H = e~ + g~/U^2 evaluated from the closed forms."""
    return 0.5 * (sf.e + sf.g / up.U(sf.s) ** 2)


def q_constant(space: AmbientSpace, H: float, I: float, b: float = 0.0, m: float = 1.0) -> complex:
    """The constant Hopf coefficient psi of a helicoidal family member.

    For kappa = 0 the value is 2 H psi1 with psi1 from ``psi1_constant``.
    """
    if m == 0:
        raise DomainError("m must be non-zero")
    k, eps = space.kappa, space.eps
    if k == 0:
        return 2 * H * psi1_constant(space, H, I, b, m)
    A = 4 * H * H * eps + k
    re = -(k * k * I * I - 4 * H * H - k * b * b * A) / (2 * m * m * k)
    im = b * k * I / (m * m)
    return complex(re, im)


def psi1_constant(space: AmbientSpace, H: float, I: float, b: float = 0.0, m: float = 1.0) -> complex:
    """psi1 = (H eps b^2 + I)/m^2 - i b/m^2, constant only when kappa = 0."""
    if space.kappa != 0:
        raise DomainError("psi1 is constant only for kappa = 0")
    eps = space.eps
    return complex((H * eps * b * b + I) / m**2, -b / m**2)


def psi1_closed(up: UProfile, s) -> np.ndarray:
    """psi1 = (H U^2 + R/m^2) - i (b/m^2) cs along the member (conformal chart)."""
    p = up.params
    s = np.asarray(s, dtype=float)
    return (p.H * up.U(s) ** 2 + up.R(s) / p.m**2) - 1j * (p.b / p.m**2) * up.cs(s)


# Lorentzian catenoid family (kappa = 0, eps = -1, H = 0)

def catenoid_t(rho, I: float):
    """Profile t = I asinh(rho / I) of the Lorentzian catenoid (m = 1, b = 0)."""
    return I * np.arcsinh(np.asarray(rho, dtype=float) / I)


def catenoid_family_t(rho, I: float, b: float, rho0: float) -> np.ndarray:
    """t(rho) - t(rho0) = int I sqrt(rho^2 - b^2) / (rho sqrt(rho^2 + I^2)) drho."""
    rho = np.atleast_1d(np.asarray(rho, dtype=float))

    def f(r):
        return I * math.sqrt(r * r - b * b) / (r * math.sqrt(r * r + I * I))

    return np.array([quad(f, rho0, r, epsabs=1e-14, epsrel=1e-12)[0] for r in rho])


def catenoid_family_drift(rho, I: float, b: float, rho0: float) -> np.ndarray:
    """h(rho) - h(rho0) with theta~ = m (theta - h):

    h = int b I / (rho sqrt(rho^2 - b^2) sqrt(rho^2 + I^2)) drho.
    """
    rho = np.atleast_1d(np.asarray(rho, dtype=float))

    def f(r):
        return b * I / (r * math.sqrt(r * r - b * b) * math.sqrt(r * r + I * I))

    return np.array([quad(f, rho0, r, epsabs=1e-14, epsrel=1e-12)[0] for r in rho])


def catenoid_family(I: float, b: float = 0.0, m: float = 1.0, s0: float = 0.0) -> UProfile:
    """Maximal family in L^3 containing the Lorentzian catenoid: m^2 U^2 = (s - s0)^2 - (I^2 + b^2)."""
    return u_solution(AmbientSpace(0.0, -1), 0.0, I, b, m, "MaximalFlat", s0,
                      s_ref=s0 + math.sqrt(I * I + b * b) + 1.0)


# JSON descriptor

def family_descriptor(up: UProfile, s_range=None, grid=None) -> dict:
    p = up.params
    d = {
        "schema": 1,
        "kind": "helicoidal",
        "space": p.space.as_dict(),
        "H": p.H,
        "I": p.I,
        "b": p.b,
        "m": p.m,
        "branch": p.branch,
        "s0": p.s0,
        "domain": list(up.domain),
    }
    if s_range is not None:
        d["s_range"] = [float(s_range[0]), float(s_range[1])]
    if grid is not None:
        d["grid"] = [int(grid[0]), int(grid[1])]
    return d


def from_descriptor(d: dict) -> UProfile:
    if d.get("schema") != 1:
        raise DomainError(f"unsupported descriptor schema {d.get('schema')!r}")
    if d.get("kind", "helicoidal") != "helicoidal":
        raise DomainError(f"descriptor kind {d.get('kind')!r} is not helicoidal")
    sp = d["space"]
    space = AmbientSpace(float(sp["kappa"]), int(sp["eps"]))
    dom = d.get("domain")
    ref = 0.5 * (dom[0] + dom[1]) if dom else None
    return u_solution(space, float(d["H"]), float(d["I"]), float(d.get("b", 0.0)),
                      float(d.get("m", 1.0)), d.get("branch"), float(d.get("s0", 0.0)), s_ref=ref)
