"""The product spaces M^2(kappa) x R and their flat embeddings.

A point of M^2(kappa) x R is stored in cylindrical coordinates (rho, theta, t)
around the axis {p0} x R, or as a vector of the flat space E^3 (kappa = 0) or
E^4 (kappa != 0) carrying the diagonal metric ``signature``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# below this value of |kappa| rho^2 the series branch is used
SERIES_SWITCH = 1e-8


class DomainError(ValueError):
    """Raised when an input lies outside the domain of an operation."""


@dataclass(frozen=True)
class AmbientSpace:
    """M^2(kappa) x R with metric eps dt^2 + dsigma^2.

    Parameters
    ----------
    kappa : float
        Curvature of the base surface.
    eps : int
        Sign of the dt^2 term, +1 (Riemannian) or -1 (Lorentzian).
    """

    kappa: float
    eps: int = 1
    eps_kappa: int = field(init=False)
    radius: float = field(init=False)
    embed_dim: int = field(init=False)
    signature: tuple = field(init=False)

    def __post_init__(self):
        if self.eps not in (1, -1):
            raise DomainError(f"eps must be +1 or -1, got {self.eps!r}")
        k = float(self.kappa)
        if not math.isfinite(k):
            raise DomainError("kappa must be finite")
        object.__setattr__(self, "kappa", k)
        object.__setattr__(self, "eps", int(self.eps))
        sk = (k > 0) - (k < 0)
        object.__setattr__(self, "eps_kappa", sk)
        if sk == 0:
            object.__setattr__(self, "radius", math.inf)
            object.__setattr__(self, "embed_dim", 3)
            object.__setattr__(self, "signature", (1.0, 1.0, float(self.eps)))
        else:
            object.__setattr__(self, "radius", 1.0 / math.sqrt(abs(k)))
            object.__setattr__(self, "embed_dim", 4)
            object.__setattr__(self, "signature", (float(sk), 1.0, 1.0, float(self.eps)))

    @property
    def sig(self) -> np.ndarray:
        return np.asarray(self.signature)

    @property
    def dt(self) -> np.ndarray:
        """The unit vertical vector d/dt in embedding coordinates."""
        v = np.zeros(self.embed_dim)
        v[-1] = 1.0
        return v

    def rho_max(self) -> float:
        """Largest admissible polar radius (the antipodal point for kappa > 0)."""
        return math.pi / math.sqrt(self.kappa) if self.kappa > 0 else math.inf

    def as_dict(self) -> dict:
        return {"kappa": self.kappa, "eps": self.eps}


def _series(kappa, rho):
    x = kappa * rho * rho
    sn = rho * (1.0 - x / 6.0 + x * x / 120.0)
    cs = 1.0 - x / 2.0 + x * x / 24.0
    return sn, cs


def sn_cs(kappa: float, rho):
    """Return (sn_kappa(rho), cs_kappa(rho)), vectorised over rho."""
    rho = np.asarray(rho, dtype=float)
    k = float(kappa)
    small = np.abs(k) * rho * rho < SERIES_SWITCH
    if k > 0:
        q = math.sqrt(k)
        sn = np.sin(q * rho) / q
        cs = np.cos(q * rho)
    elif k < 0:
        q = math.sqrt(-k)
        sn = np.sinh(q * rho) / q
        cs = np.cosh(q * rho)
    else:
        sn = rho.copy()
        cs = np.ones_like(rho)
    if k != 0 and np.any(small):
        s2, c2 = _series(k, rho)
        sn = np.where(small, s2, sn)
        cs = np.where(small, c2, cs)
    if sn.ndim == 0:
        return float(sn), float(cs)
    return sn, cs


def sn(kappa: float, rho):
    return sn_cs(kappa, rho)[0]


def cs(kappa: float, rho):
    return sn_cs(kappa, rho)[1]


def ct(kappa: float, rho):
    """cs/sn; the pole sn = 0 yields nan (see ``kappa_trig`` for the flag)."""
    s, c = sn_cs(kappa, rho)
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(s != 0.0, np.asarray(c) / np.where(s != 0.0, s, 1.0), np.nan)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class KappaTrig:
    sn: float
    cs: float
    ct: float
    pole: bool


def kappa_trig(kappa: float, rho: float) -> KappaTrig:
    """Generalised trigonometric functions of geodesic polar coordinates.

    ``ct`` is nan with ``pole=True`` where sn vanishes.
    """
    if rho < 0:
        raise DomainError("rho must be non-negative")
    s, c = sn_cs(kappa, rho)
    if s == 0.0:
        return KappaTrig(s, c, math.nan, True)
    return KappaTrig(s, c, c / s, False)


def integral_sn(kappa: float, rho):
    """Integral of sn_kappa over [0, rho], equal to 2 sn_kappa(rho/2)^2."""
    return 2.0 * np.asarray(sn(kappa, np.asarray(rho) / 2.0)) ** 2


def embed_point(space: AmbientSpace, rho, theta, t) -> np.ndarray:
    """Flat-space coordinates of the point with cylindrical coordinates (rho, theta, t).

    Broadcasts over array inputs; the coordinate axis is last.
    """
    rho, theta, t = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (rho, theta, t)))
    if np.any(rho < 0):
        raise DomainError("rho must be non-negative")
    if space.kappa > 0 and np.any(rho > space.rho_max() * (1 + 1e-14)):
        raise DomainError("rho exceeds pi/sqrt(kappa)")
    s, c = sn_cs(space.kappa, rho)
    if space.kappa == 0:
        return np.stack([s * np.cos(theta), s * np.sin(theta), t], axis=-1)
    return np.stack([space.radius * c, s * np.cos(theta), s * np.sin(theta), t], axis=-1)


def embed_sn_cs(space: AmbientSpace, s, c, theta, t) -> np.ndarray:
    """Like ``embed_point`` but from precomputed sn and cs values."""
    s, c, theta, t = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (s, c, theta, t)))
    if space.kappa == 0:
        return np.stack([s * np.cos(theta), s * np.sin(theta), t], axis=-1)
    return np.stack([space.radius * c, s * np.cos(theta), s * np.sin(theta), t], axis=-1)


def coordinates(space: AmbientSpace, X) -> tuple:
    """Inverse of ``embed_point``: (rho, theta, t) with theta in (-pi, pi]."""
    X = np.asarray(X, dtype=float)
    if X.shape[-1] != space.embed_dim:
        raise DomainError("dimension mismatch")
    t = X[..., -1]
    if space.kappa == 0:
        rho = np.hypot(X[..., 0], X[..., 1])
        theta = np.arctan2(X[..., 1], X[..., 0])
        return rho, theta, t
    s = np.hypot(X[..., 1], X[..., 2])
    theta = np.arctan2(X[..., 2], X[..., 1])
    q = math.sqrt(abs(space.kappa))
    if space.kappa > 0:
        rho = np.arctan2(q * s, q * X[..., 0]) / q
    else:
        rho = np.arcsinh(q * s) / q
    return rho, theta, t


def inner(space: AmbientSpace, u, v) -> np.ndarray:
    """Signed flat inner product, contracted over the last axis."""
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape[-1] != space.embed_dim or v.shape[-1] != space.embed_dim:
        raise DomainError(
            f"dimension mismatch: expected {space.embed_dim}, got {u.shape[-1]} and {v.shape[-1]}"
        )
    return np.sum(u * v * space.sig, axis=-1)


def quadric_defect(space: AmbientSpace, X) -> np.ndarray:
    """|eps_kappa <p,p> - r^2| for the base part p of X (zero when kappa = 0)."""
    X = np.asarray(X, dtype=float)
    if space.kappa == 0:
        return np.zeros(X.shape[:-1])
    p = X[..., :3]
    q = space.eps_kappa * np.sum(p * p * space.sig[:3], axis=-1)
    return np.abs(q - space.radius**2)
