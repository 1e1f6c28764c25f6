"""Constant mean curvature surfaces in M^2(kappa) x R, Riemannian and Lorentzian.

Submodules: ambient, surfkit, profiles, helicoidal, integral_checks,
killing_graph, export, cli.  Names below load lazily so the command line can
cap BLAS threads before numpy starts.
"""

import importlib

__version__ = "0.1.0"

_LAZY = {
    "AmbientSpace": "ambient",
    "DomainError": "ambient",
    "embed_point": "ambient",
    "inner": "ambient",
    "kappa_trig": "ambient",
    "SurfacePatch": "surfkit",
    "fundamental_forms": "surfkit",
    "hopf_coefficients": "surfkit",
    "cr_residual": "surfkit",
    "integrate_profile_system": "profiles",
    "rotational_profile": "profiles",
    "u_solution": "helicoidal",
    "solve_killing_graph": "killing_graph",
}

__all__ = sorted(_LAZY) + ["__version__"]


def __getattr__(name):
    if name in _LAZY:
        return getattr(importlib.import_module(f".{_LAZY[name]}", __name__), name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
