"""Rotational CMC profiles: quadrature, ODE integration, fluxes and closed forms.

A rotational surface is generated by a curve (rho, t) in the half plane
theta = const.  With P(rho) = I' - 2H int_0^rho sn_kappa the mean curvature
equation has the first integral

    S(phi) sn_kappa(rho) = P(rho),

where (cos, sin) = (C, S) for eps = +1 and (cosh, sinh) for eps = -1 give the
profile direction.  ``I`` denotes the constant written with the indefinite
primitive -cs_kappa/kappa of sn_kappa, so that I' = I + 2H/kappa (I' = I when
kappa = 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .ambient import AmbientSpace, DomainError, embed_point, integral_sn, sn_cs
from .ode import LD, dopri54
from .surfkit import SurfacePatch

ROTATIONAL_CLASSES = (
    "HorizontalPlane",
    "LorentzianCatenoid",
    "CompleteDiscOrthogonalAxis",
    "LightConeAsymptotic",
    "Inconclusive",
)


def flux_from_I(space: AmbientSpace, H: float, I: float) -> float:
    return I if space.kappa == 0 else I + 2.0 * H / space.kappa


def I_from_flux(space: AmbientSpace, H: float, flux: float) -> float:
    return flux if space.kappa == 0 else flux - 2.0 * H / space.kappa


def P_of_rho(space: AmbientSpace, H: float, flux: float, rho):
    return flux - 2.0 * H * integral_sn(space.kappa, rho)


def _S(eps, phi):
    return np.sin(phi) if eps == 1 else np.sinh(phi)


def _C(eps, phi):
    return np.cos(phi) if eps == 1 else np.cosh(phi)


def flux_of_profile(space: AmbientSpace, H: float, rho, phi):
    """The conserved flux I' = S(phi) sn(rho) + 4H sn(rho/2)^2."""
    s = sn_cs(space.kappa, rho)[0]
    # an axis sample of a catenoid has phi = +-inf and sn = 0: nan, not a warning
    with np.errstate(invalid="ignore"):
        return _S(space.eps, phi) * s + 2.0 * H * integral_sn(space.kappa, rho)


@dataclass
class ProfileCurve:
    """Samples (s, rho, t, phi) of a rotational profile.

    ``s`` is arclength for ``kind`` in {"graph", "arclength"} and the conformal
    parameter u (ds = sn du) for kind "conformal".
    """

    space: AmbientSpace
    H: float
    I: float
    flux: float
    s: np.ndarray
    rho: np.ndarray
    t: np.ndarray
    phi: np.ndarray
    kind: str
    status: str = "completed"
    meta: dict = field(default_factory=dict)

    def flux_samples(self) -> np.ndarray:
        return flux_of_profile(self.space, self.H, self.rho, self.phi)

    def flux_drift(self) -> float:
        f = self.flux_samples()
        return float(np.max(np.abs(f - self.flux)))

    def rows(self):
        f = self.flux_samples()
        return [
            (float(a), float(b), float(c), float(d), float(e))
            for a, b, c, d, e in zip(self.s, self.rho, self.t, self.phi, f)
        ]


def _graph_integrand(space, H, flux):
    eps = space.eps

    def slope_and_arc(rho):
        s, _ = sn_cs(space.kappa, rho)
        P = P_of_rho(space, H, flux, rho)
        D = s * s - eps * P * P
        if D <= 0:
            return (0.0, 1.0) if s == 0 and P == 0 else (math.nan, math.nan)
        r = math.sqrt(D)
        return P / r, s / r

    return slope_and_arc


def _discriminant(space, H, flux, rho):
    s, _ = sn_cs(space.kappa, rho)
    P = P_of_rho(space, H, flux, rho)
    return s * s - space.eps * P * P


def rotational_profile(space: AmbientSpace, H: float, I: float | None = None, *,
                       flux: float | None = None, rho_range=(0.0, 1.0), n: int = 201,
                       t0: float = 0.0, tol: float = 1e-12) -> ProfileCurve:
    """Graph t(rho) of the rotational CMC surface with constants (H, I).

    Exactly one of ``I`` and ``flux`` (= I') must be given.  The slope is
    dt/drho = P / sqrt(sn^2 - eps P^2), integrated by adaptive quadrature between
    consecutive samples.  If the discriminant vanishes inside ``rho_range`` the
    curve is truncated at that point (vertical tangent for eps = +1) and
    ``status`` records the obstruction.
    """
    if (I is None) == (flux is None):
        raise DomainError("give exactly one of I and flux")
    if flux is None:
        flux = flux_from_I(space, H, I)
    I = I_from_flux(space, H, flux)
    a, b = map(float, rho_range)
    if not 0 <= a < b:
        raise DomainError("rho_range must satisfy 0 <= a < b")
    if b > space.rho_max():
        raise DomainError("rho_range exceeds pi/sqrt(kappa)")
    if n < 2:
        raise DomainError("n must be at least 2")
    D = lambda r: _discriminant(space, H, flux, r)
    probe_a = a if a > 0 else min(1e-9, b * 1e-9)
    if D(probe_a) <= 0:
        raise DomainError(f"sn^2 - eps P^2 <= 0 at rho={a}: no graph starts there")
    status = "completed"
    end = b
    # scan for a sign change of the discriminant
    grid = np.linspace(probe_a, b, 4 * n + 1)
    dv = np.array([D(r) for r in grid])
    bad = np.nonzero(dv <= 0)[0]
    if bad.size:
        j = bad[0]
        end = brentq(D, grid[j - 1], grid[j], xtol=1e-15)
        status = "vertical_tangent" if space.eps == 1 else "light_like"
    rho = np.linspace(a, end, n)
    f = _graph_integrand(space, H, flux)
    slope = lambda r: f(r)[0]
    arc = lambda r: f(r)[1]
    t = np.empty(n)
    s = np.empty(n)
    t[0], s[0] = t0, 0.0
    for i in range(1, n):
        lo, hi = rho[i - 1], rho[i]
        if status != "completed" and i == n - 1:
            # integrable 1/sqrt endpoint: rho = hi - sigma^2
            L = math.sqrt(hi - lo)
            g1 = lambda sg: 2 * sg * slope(hi - sg * sg) if sg > 0 else 0.0
            g2 = lambda sg: 2 * sg * arc(hi - sg * sg) if sg > 0 else 0.0
            dt = quad(_safe(g1, hi, L), 0, L, epsabs=tol, epsrel=tol, limit=200)[0]
            ds = quad(_safe(g2, hi, L), 0, L, epsabs=tol, epsrel=tol, limit=200)[0]
        else:
            dt = quad(slope, lo, hi, epsabs=tol, epsrel=tol, limit=200)[0]
            ds = quad(arc, lo, hi, epsabs=tol, epsrel=tol, limit=200)[0]
        t[i] = t[i - 1] + dt
        s[i] = s[i - 1] + ds
    sv, _ = sn_cs(space.kappa, rho)
    P = P_of_rho(space, H, flux, rho)
    with np.errstate(divide="ignore", invalid="ignore"):
        Sphi = np.where(sv > 0, P / np.where(sv > 0, sv, 1.0), 0.0)
    if space.eps == 1:
        phi = np.arcsin(np.clip(Sphi, -1.0, 1.0))
    else:
        phi = np.arcsinh(Sphi)
    if a == 0 and flux != 0:
        phi[0] = math.copysign(math.pi / 2, flux) if space.eps == 1 else math.copysign(math.inf, flux)
    return ProfileCurve(space, H, I, flux, s, rho, t, phi, "graph", status,
                        {"rho_range": [a, float(end)], "tol": tol})


def _safe(g, hi, L):
    # the substitution integrand has a finite limit at sigma = 0
    def h(sg):
        v = g(sg)
        if not math.isfinite(v):
            v = g(max(sg, 1e-12 * L))
        return v if math.isfinite(v) else 0.0
    return h


def _rhs(space: AmbientSpace, H: float, param: str):
    k, eps = space.kappa, space.eps
    H = LD(H)
    q = LD(math.sqrt(abs(k))) if k != 0 else LD(0)

    def snc(r):
        if k > 0:
            return np.sin(q * r) / q, np.cos(q * r)
        if k < 0:
            return np.sinh(q * r) / q, np.cosh(q * r)
        return r, LD(1)

    def f(s, y):
        r, _, p = y
        if eps == 1:
            C, S = np.cos(p), np.sin(p)
        else:
            C, S = np.cosh(p), np.sinh(p)
        sn_, cs_ = snc(r)
        if param == "conformal":
            return np.array([sn_ * C, sn_ * S, -2 * H * sn_ - S * cs_], dtype=LD)
        return np.array([C, S, -2 * H - S * cs_ / sn_], dtype=LD)

    return f


def axis_seed(space: AmbientSpace, H: float, delta: float, t_axis: float = 0.0):
    """State (s, rho, t, phi) at rho = delta on the disc meeting the axis orthogonally.

    phi comes from the vanishing flux, S(phi) sn(rho) = -4H sn(rho/2)^2, and s, t
    from Gauss-Legendre quadrature of drho / C(phi) and S(phi) / C(phi) drho.
    """
    x, w = np.polynomial.legendre.leggauss(12)
    r = 0.5 * delta * (x + 1)
    s_half, c_half = sn_cs(space.kappa, r / 2)
    Sphi = -2.0 * H * s_half / c_half
    if space.eps == 1:
        Cphi = np.sqrt(1 - Sphi**2)
    else:
        Cphi = np.sqrt(1 + Sphi**2)
    s = 0.5 * delta * np.sum(w / Cphi)
    t = t_axis + 0.5 * delta * np.sum(w * Sphi / Cphi)
    sh, ch = sn_cs(space.kappa, delta / 2)
    S0 = -2.0 * H * sh / ch
    phi = math.asin(S0) if space.eps == 1 else math.asinh(S0)
    return s, delta, t, phi


def integrate_profile_system(space: AmbientSpace, H: float, init=(0.0, 0.0, 0.0),
                             s_max: float = 10.0, tol: float = 1e-15, s_eval=None,
                             rho_stop: float | None = None, param: str = "arclength",
                             seed_delta: float = 1e-4) -> ProfileCurve:
    """Integrate the profile system from ``init`` = (rho0, t0, phi0).

    Arclength form: rho' = C(phi), t' = S(phi), phi' = -2H - S(phi) ct(rho).
    ``param="conformal"`` uses ds = sn(rho) du instead, which removes the
    pole of ct at the axis.  Starting on the axis (rho0 = 0, phi0 = 0) the
    first step is taken from the vanishing-flux relation (``axis_seed``).
    Stepping is the embedded Dormand-Prince 5(4) pair in extended precision
    with relative tolerance ``tol``.
    """
    rho0, t0, phi0 = map(float, init)
    if param not in ("arclength", "conformal"):
        raise DomainError(f"unknown parameter {param!r}")
    if rho0 < 0:
        raise DomainError("rho0 must be non-negative")
    pre_s, pre = [], []
    s0 = 0.0
    if rho0 == 0:
        if param == "conformal":
            raise DomainError("the conformal parameter cannot start on the axis")
        if phi0 != 0:
            raise DomainError("an axis start needs phi0 = 0")
        pre_s, pre = [0.0], [(0.0, t0, 0.0)]
        s0, rho0, t0, phi0 = axis_seed(space, H, seed_delta, t0)
    flux = float(flux_of_profile(space, H, rho0, phi0)) if not pre else 0.0
    rmax = space.rho_max()
    stop_at = rho_stop

    def event(s, y):
        r = float(y[0])
        if stop_at is not None and r >= stop_at:
            return "rho_stop"
        if r <= 0:
            return "axis_reached"
        if r >= rmax:
            return "pole"
        return ""

    f = _rhs(space, H, param)
    y0 = np.array([rho0, t0, phi0], dtype=LD)
    if s_eval is not None:
        s_eval = np.sort(np.asarray(s_eval, dtype=float))
        has_axis = bool(pre) and s_eval[0] == 0
        rest = s_eval[1:] if has_axis else s_eval
        if rest.size and rest[0] < s0:
            raise DomainError(f"samples below the seed parameter {s0:.3e} are not available")
        res = dopri54(f, s0, y0, float(s_eval[-1]), rtol=tol, atol=tol * 1e-3,
                      s_eval=rest, event=event)
        if not has_axis:
            pre_s, pre = [], []
    else:
        res = dopri54(f, s0, y0, s_max, rtol=tol, atol=tol * 1e-3, event=event)
    s = np.concatenate([pre_s, res.s.astype(float)])
    Y = res.y.astype(float)
    if pre:
        Y = np.vstack([np.array(pre), Y])
    status = res.status
    if status in ("step_underflow", "max_steps"):
        status = f"truncated:{status}"
    I = I_from_flux(space, H, flux)
    return ProfileCurve(space, H, I, flux, s, Y[:, 0], Y[:, 1], Y[:, 2],
                        param if param == "conformal" else "arclength", status,
                        {"tol": tol, "nsteps": res.nsteps, "seed_delta": seed_delta})


def revolve(curve: ProfileCurve, n_theta: int = 65, theta_range=(0.0, 2 * math.pi),
            meta: dict | None = None) -> SurfacePatch:
    """Rotate uniformly spaced profile samples into a surface patch."""
    s = curve.s
    if s.size < 5 or not np.allclose(np.diff(s), s[1] - s[0], rtol=1e-9, atol=1e-13):
        raise DomainError("revolve needs at least 5 uniformly spaced samples")
    th = np.linspace(theta_range[0], theta_range[1], n_theta)
    R, T = np.meshgrid(curve.rho, th, indexing="ij")
    Tt, _ = np.meshgrid(curve.t, th, indexing="ij")
    pts = embed_point(curve.space, R, T, Tt)
    chart = "conformal" if curve.kind == "conformal" else "cylindrical"
    m = {"H_target": curve.H, "I": curve.I, "flux": curve.flux, "source": curve.kind}
    if chart == "conformal":
        m["tol_conf"] = 1e-8
    m.update(meta or {})
    return SurfacePatch(curve.space, chart, s, th, pts, m)


def profile_patch(space: AmbientSpace, H: float, s_range, n_s: int = 201, n_theta: int = 65,
                  theta_range=(0.0, 2 * math.pi), flux: float = 0.0, tol: float = 1e-15,
                  init=None) -> SurfacePatch:
    """Cylindrical patch (s, theta) of a rotational CMC surface.

    With ``init`` None the profile starts on the axis (zero flux); otherwise
    ``init`` is (rho0, t0, phi0) and the arclength origin sits there.
    """
    s = np.linspace(s_range[0], s_range[1], n_s)
    if init is None:
        if flux != 0:
            raise DomainError("an axis start has zero flux")
        init = (0.0, 0.0, 0.0)
    c = integrate_profile_system(space, H, init, s_eval=s, tol=tol)
    if c.s.size != n_s:
        raise DomainError(f"profile ended early ({c.status}) at s={c.s[-1]:.6g}")
    return revolve(c, n_theta, theta_range)


def conformal_profile_patch(space: AmbientSpace, H: float, init, u_range, n_u: int = 201,
                            n_theta: int = 65, theta_range=(0.0, 2 * math.pi),
                            tol: float = 1e-15) -> SurfacePatch:
    """Conformal patch (u, theta) of a rotational CMC surface, ds = sn(rho) du."""
    u = np.linspace(u_range[0], u_range[1], n_u)
    c = integrate_profile_system(space, H, init, s_eval=u, tol=tol, param="conformal")
    if c.s.size != n_u:
        raise DomainError(f"profile ended early ({c.status})")
    return revolve(c, n_theta, theta_range)


def asymptotic_angle(space: AmbientSpace, H: float) -> float:
    """Limit angle arcsinh(2|H| / sqrt(-kappa)) of Lorentzian rotational discs."""
    if not (space.kappa < 0 and space.eps == -1):
        raise DomainError("the asymptotic angle needs kappa < 0 and eps = -1")
    return math.asinh(2.0 * abs(H) / math.sqrt(-space.kappa))


@dataclass
class RotationalClass:
    kind: str
    flux: float
    measured: dict = field(default_factory=dict)


def _aitken(x):
    x0, x1, x2 = x
    d = x2 - 2 * x1 + x0
    return x2 if d == 0 else x2 - (x2 - x1) ** 2 / d


def classify_rotational(curve: ProfileCurve, flux_tol: float = 1e-9, h_tol: float = 1e-12) -> RotationalClass:
    """Classify a Lorentzian rotational CMC profile in M^2(kappa) x R, kappa <= 0."""
    sp = curve.space
    if sp.eps != -1 or sp.kappa > 0:
        raise DomainError("classification needs eps = -1 and kappa <= 0")
    flux = float(np.median(curve.flux_samples()[np.isfinite(curve.flux_samples())]))
    H = curve.H
    rho, phi = curve.rho, curve.phi
    ok = np.isfinite(phi)
    m = {"flux": flux}
    if abs(H) <= h_tol:
        if abs(flux) <= flux_tol:
            m["max_abs_phi"] = float(np.max(np.abs(phi[ok])))
            return RotationalClass("HorizontalPlane", flux, m)
        i0 = int(np.argmin(np.where(ok, rho, np.inf)))
        m["slope_at_min_rho"] = float(np.tanh(abs(phi[i0])))
        m["rho_min"] = float(rho[i0])
        m["slope_at_max_rho"] = float(np.tanh(abs(phi[ok][-1])))
        return RotationalClass("LorentzianCatenoid", flux, m)
    k = sp.kappa
    if rho[ok].size < 12 or (k < 0 and rho[ok][-1] * math.sqrt(-k) < 5):
        return RotationalClass("Inconclusive", flux, m)
    S = np.sinh(phi[ok])
    r = rho[ok]
    # three samples across the last decade in rho
    r_end = r[-1]
    pick = [np.argmin(np.abs(r - (r_end - d))) for d in (2.0, 1.0, 0.0)] if k < 0 else None
    if k < 0:
        m["sinh_phi_limit"] = float(_aitken([S[i] for i in pick]))
        m["sinh_phi_infinity"] = 2 * abs(H) / math.sqrt(-k)
    else:
        m["growth"] = float(S[-1] / r[-1])
    m["sinh_phi_last"] = float(S[-1])
    if abs(flux) <= flux_tol:
        return RotationalClass("CompleteDiscOrthogonalAxis", flux, m)
    m["monotone_tail"] = bool(np.all(np.diff(S[len(S) // 2:]) <= 0) or np.all(np.diff(S[len(S) // 2:]) >= 0))
    return RotationalClass("LightConeAsymptotic", flux, m)


# closed forms with vanishing Q ---------------------------------------------------

def _asn(k, y):
    if k > 0:
        q = math.sqrt(k)
        return np.arcsin(np.clip(q * y, -1, 1)) / q
    if k < 0:
        q = math.sqrt(-k)
        return np.arcsinh(q * y) / q
    return y


def _acs(k, y):
    if k > 0:
        return np.arccos(np.clip(y, -1, 1)) / math.sqrt(k)
    if k < 0:
        return np.arccosh(np.maximum(y, 1.0)) / math.sqrt(-k)
    raise DomainError("cs_0 is constant")


def q_zero_case(space: AmbientSpace, H: float, sign: int) -> str:
    """Case label (eps, sign of 4H^2 eps + kappa, sign of I) of the closed form."""
    k, e = space.kappa, space.eps
    if k == 0:
        raise DomainError("closed forms with vanishing Q need kappa != 0")
    if H == 0:
        raise DomainError("closed forms with vanishing Q need H != 0")
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    A = 4 * H * H * e + k
    es = "1" if e == 1 else "-1"
    if sign == -1:
        if A == 0:
            return "0"
        if A > 0:
            if e == -1 and k < 0:
                raise DomainError("excluded combination")
            return "1+-" if e == 1 else "-1+-"
        return "-1--" if e == -1 else "1--"
    if A == 0:
        raise DomainError("no closed form for I = 2H/kappa with 4H^2 eps + kappa = 0")
    if A > 0:
        if k < 0:
            raise DomainError("there are no examples with kappa < 0 for I = 2H/kappa and c^2 > 0")
        return "1++" if e == 1 else "-1++"
    if (e == 1 and k < 0) or (e == -1 and k > 0):
        return "1-+"
    return "-1-+"


@dataclass
class QZeroCurve:
    """Closed-form rotational surface with vanishing Q.

    ``relation(rho, t)`` is the implicit equation of the case, and
    ``t_of_rho`` its non-negative solution branch.
    """

    space: AmbientSpace
    H: float
    sign: int
    case: str
    c: float

    @property
    def I(self) -> float:
        return self.sign * 2 * self.H / self.space.kappa

    @property
    def flux(self) -> float:
        return flux_from_I(self.space, self.H, self.I)

    def relation(self, rho, t):
        k, e, H = self.space.kappa, self.space.eps, self.H
        A = 4 * H * H * e + k
        c = self.c
        X = sn_cs(k, np.asarray(rho) / 2)[0] ** 2
        C = sn_cs(k, np.asarray(rho) / 2)[1] ** 2
        arg = c * np.asarray(t) / 2
        snm, csm = sn_cs(-k, arg)
        snp, csp = sn_cs(k, arg)
        cs_ = self.case
        if cs_ == "1+-":
            return A * X + 4 * H * H * e * snm**2 - 1
        if cs_ == "-1+-":
            return 4 * H * H * e * k * snm**2 + A * C
        if cs_ == "-1--":
            return A * X - 4 * H * H * e * snp**2 - 1
        if cs_ == "1--":
            return 4 * H * H * e * k * snp**2 - A * C
        if cs_ == "0":
            return np.asarray(t) ** 2 - self.space.eps_kappa * 4 / k * C
        if cs_ == "1++":
            return A * k * X - 4 * H * H * e * csm**2
        if cs_ == "-1++":
            return A * X + 4 * H * H * e * snm**2
        if cs_ == "1-+":
            return A * k * X - 4 * H * H * e * csp**2
        return A * X - 4 * H * H * e * snp**2

    def t_of_rho(self, rho):
        """Non-negative t on the relation; nan where the case has no real solution."""
        k, e, H = self.space.kappa, self.space.eps, self.H
        A = 4 * H * H * e + k
        c = self.c
        rho = np.asarray(rho, dtype=float)
        s2, c2 = sn_cs(k, rho / 2)
        X, C = np.asarray(s2) ** 2, np.asarray(c2) ** 2
        cs_ = self.case
        with np.errstate(invalid="ignore"):
            if cs_ == "0":
                v = self.space.eps_kappa * 4 / k * C
                return np.where(v >= 0, np.sqrt(np.abs(v)), np.nan)
            if cs_ in ("1+-", "-1+-", "-1++"):
                kk = -k
                y = {"1+-": (1 - A * X) / (4 * H * H * e),
                     "-1+-": -A * C / (4 * H * H * e * k),
                     "-1++": -A * X / (4 * H * H * e)}[cs_]
                inv = _asn
            elif cs_ in ("-1--", "1--", "-1-+"):
                kk = k
                y = {"-1--": (A * X - 1) / (4 * H * H * e),
                     "1--": A * C / (4 * H * H * e * k),
                     "-1-+": A * X / (4 * H * H * e)}[cs_]
                inv = _asn
            else:
                kk = -k if cs_ == "1++" else k
                y = A * k * X / (4 * H * H * e)
                inv = _acs
            valid = y >= 0
            r = np.sqrt(np.where(valid, y, 0.0))
            if inv is _asn:
                if kk > 0:
                    valid &= r * math.sqrt(kk) <= 1
            else:
                valid &= (r <= 1) if kk > 0 else (r >= 1)
            t = 2.0 / c * inv(kk, r)
        return np.where(valid, t, np.nan)

    def branch_sign(self, rho) -> float:
        """Sign s such that t = s * t_of_rho(rho) has the slope sign of P."""
        rho = float(rho)
        h = 1e-6 * max(1.0, rho)
        d = self.t_of_rho(np.array([rho + h]))[0] - self.t_of_rho(np.array([rho - h]))[0]
        P = P_of_rho(self.space, self.H, self.flux, rho)
        return float(np.sign(P) * np.sign(d)) or 1.0

    def samples(self, rho) -> np.ndarray:
        """Points (rho, t) on the profile branch that is a graph with slope sign of P."""
        rho = np.asarray(rho, dtype=float)
        t = self.t_of_rho(rho)
        D = _discriminant_vec(self.space, self.H, self.flux, rho)
        ok = np.isfinite(t) & (D > 0)
        if not np.any(ok):
            raise DomainError("no valid samples in the requested range")
        mid = rho[ok][np.count_nonzero(ok) // 2]
        return np.stack([rho[ok], self.branch_sign(mid) * t[ok]], axis=-1)


def _discriminant_vec(space, H, flux, rho):
    s, _ = sn_cs(space.kappa, rho)
    P = P_of_rho(space, H, flux, rho)
    return np.asarray(s) ** 2 - space.eps * np.asarray(P) ** 2


def rotational_q_zero(space: AmbientSpace, H: float, sign: int) -> QZeroCurve:
    """Closed-form rotational CMC surface with I = sign * 2H / kappa (so Q = 0)."""
    case = q_zero_case(space, H, sign)
    c = math.sqrt(abs(space.eps + space.kappa / (4 * H * H)))
    return QZeroCurve(space, H, sign, case, c)
