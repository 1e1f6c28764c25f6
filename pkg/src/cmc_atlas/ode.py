"""Embedded Dormand-Prince 5(4) integrator in extended precision.

The profile systems conserve a first integral whose size grows like
sn_kappa(rho)^2; resolving its drift below 1e-8 far out on hyperbolic
profiles is beyond float64 step errors, so stepping runs in ``np.longdouble``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LD = np.longdouble

_C = [LD(0), LD(1) / 5, LD(3) / 10, LD(4) / 5, LD(8) / 9, LD(1), LD(1)]
_A = [
    [],
    [LD(1) / 5],
    [LD(3) / 40, LD(9) / 40],
    [LD(44) / 45, LD(-56) / 15, LD(32) / 9],
    [LD(19372) / 6561, LD(-25360) / 2187, LD(64448) / 6561, LD(-212) / 729],
    [LD(9017) / 3168, LD(-355) / 33, LD(46732) / 5247, LD(49) / 176, LD(-5103) / 18656],
    [LD(35) / 384, LD(0), LD(500) / 1113, LD(125) / 192, LD(-2187) / 6784, LD(11) / 84],
]
_B5 = _A[6] + [LD(0)]
_B4 = [LD(5179) / 57600, LD(0), LD(7571) / 16695, LD(393) / 640, LD(-92097) / 339200,
       LD(187) / 2100, LD(1) / 40]
_BE = [b5 - b4 for b5, b4 in zip(_B5, _B4)]


@dataclass
class RKResult:
    s: np.ndarray
    y: np.ndarray
    status: str
    nsteps: int
    nrejected: int


def dopri54(fun, s0, y0, s_end, rtol=1e-10, atol=None, s_eval=None, event=None,
            h0=None, h_min=1e-14, max_steps=2_000_000) -> RKResult:
    """Integrate y' = fun(s, y) from s0 towards s_end.

    ``fun`` receives and returns ``np.longdouble`` arrays.  When ``s_eval`` is
    given, steps are clipped so that every requested abscissa is hit exactly and
    only those samples are returned; otherwise every accepted step is returned.
    ``event(s, y)`` returning a non-empty string stops the run with that status.
    """
    y = np.asarray(y0, dtype=LD)
    s = LD(s0)
    s_end = LD(s_end)
    direction = 1 if s_end >= s else -1
    rtol = LD(rtol)
    atol = LD(rtol * 1e-3 if atol is None else atol)
    targets = None
    if s_eval is not None:
        targets = [LD(v) for v in np.asarray(s_eval, dtype=float)]
        targets = sorted(targets, reverse=(direction < 0))
    out_s, out_y = [], []
    ti = 0
    if targets is not None:
        while ti < len(targets) and (targets[ti] - s) * direction <= 0:
            out_s.append(targets[ti])
            out_y.append(y.copy())
            ti += 1
    else:
        out_s.append(s)
        out_y.append(y.copy())
    k1 = fun(s, y)
    h = LD(h0) if h0 is not None else LD(1e-3) * max(LD(1), abs(s_end - s)) * direction
    h = abs(h) * direction
    status = "completed"
    nsteps = nrej = 0
    while (s_end - s) * direction > 0:
        if nsteps + nrej > max_steps:
            status = "max_steps"
            break
        stop = s_end
        if targets is not None and ti < len(targets):
            stop = targets[ti]
        hit = False
        if (s + h - stop) * direction >= 0:
            h = stop - s
            hit = True
        ks = [k1]
        for i in range(1, 7):
            yi = y + h * sum(a * k for a, k in zip(_A[i], ks))
            ks.append(fun(s + _C[i] * h, yi))
        y5 = y + h * sum(b * k for b, k in zip(_B5, ks) if b != 0)
        err_vec = h * sum(b * k for b, k in zip(_BE, ks))
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y5))
        err = np.sqrt(np.mean((err_vec / scale) ** 2))
        if not np.all(np.isfinite(y5)):
            err = LD(np.inf)
        if err <= 1:
            s = s + h
            y = y5
            k1 = ks[6]
            nsteps += 1
            if targets is not None:
                if hit and ti < len(targets):
                    out_s.append(s)
                    out_y.append(y.copy())
                    ti += 1
            else:
                out_s.append(s)
                out_y.append(y.copy())
            if event is not None:
                msg = event(s, y)
                if msg:
                    status = msg
                    break
            fac = LD(5) if err == 0 else min(LD(5), LD(0.9) * err ** LD(-0.2))
            if not hit:
                h = h * fac
            else:
                h = h * max(LD(1), min(fac, LD(5)))
        else:
            nrej += 1
            fac = LD(0.2) if not np.isfinite(err) else max(LD(0.2), LD(0.9) * err ** LD(-0.25))
            h = h * fac
            if abs(h) < h_min:
                status = "step_underflow"
                break
    return RKResult(np.array(out_s, dtype=LD), np.array(out_y, dtype=LD), status, nsteps, nrej)
