"""Command-line front end.

    cmc-atlas generate rotational|helicoidal|qzero|catenoid
    cmc-atlas deform --family fam.json --m M [--b B]
    cmc-atlas verify q|cmc|gauss|flux|minkowski|angle
    cmc-atlas solve-graph --kappa 0 --H 0.3 --domain disc:center=3,r=1 --grid 65
    cmc-atlas bounds height|area
    cmc-atlas export obj|csv|json

Exit status: 0 on success, 2 when a verification fails, 1 on usage or domain
errors.  Options may come from a TOML file (--config); flags win over the file.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2

KINDS = {
    "generate": ("rotational", "helicoidal", "qzero", "catenoid"),
    "deform": (),
    "verify": ("q", "cmc", "gauss", "flux", "minkowski", "angle"),
    "solve-graph": (),
    "bounds": ("height", "area"),
    "export": ("obj", "csv", "json"),
}

# dest: (type, help); every default is None so config values can fill the gaps
OPTIONS = {
    "kappa": (float, "base curvature"),
    "eps": (int, "metric sign of dt^2 (+1 or -1)"),
    "H": (float, "mean curvature"),
    "I": (float, "first integral"),
    "flux": (float, "flux I' = I + 2H/kappa"),
    "b": (float, "pitch"),
    "m": (float, "family parameter m"),
    "branch": (str, "closed-form branch of U"),
    "s0": (float, "shift of the U profile"),
    "sign": (int, "sign of I = +-2H/kappa for qzero"),
    "rho_min": (float, "start of the rho range"),
    "rho_max": (float, "end of the rho range"),
    "n": (int, "number of samples"),
    "s_min": (float, "start of the profile parameter range"),
    "s_max": (float, "end of the profile parameter range"),
    "grid": (str, "lattice size NxM (or N)"),
    "theta_max": (float, "end of the angular range of natural charts"),
    "h": (float, "lattice step of conformal charts"),
    "family": (str, "family descriptor JSON"),
    "field": (str, "Killing field: vertical or rotation"),
    "tol": (float, "verification tolerance"),
    "domain": (str, "graph domain, disc:center=C,r=R[,t=T] or rect:rho0=..,rho1=..,t0=..,t1=.."),
    "max_iter": (int, "Newton iteration cap"),
    "sup_Y": (float, "sup |Y| over the domain"),
    "inf_Y": (float, "inf |Y| over the domain"),
    "out": (str, "output path"),
    "obj": (str, "OBJ mesh output path"),
    "report": (str, "JSON report path"),
}

DEFAULTS = {"kappa": 0.0, "eps": 1, "H": 0.0, "m": 1.0, "s0": 0.0, "sign": 1, "rho_min": 0.0,
            "rho_max": 1.0, "n": 201, "h": 0.01, "field": "vertical", "max_iter": 25}

CONFIG_META = {"schema", "command", "kind"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    command: str
    kind: str | None
    values: dict = field(default_factory=dict)
    self_test: bool = False

    def get(self, key, default=None):
        v = self.values.get(key)
        if v is None:
            v = DEFAULTS.get(key, default)
        return v

    def require(self, key):
        v = self.get(key)
        if v is None:
            raise UsageError(f"--{key.replace('_', '-')} is required for {self.command}")
        return v

    def validate(self):
        if self.command not in KINDS:
            raise UsageError(f"unknown command {self.command!r}")
        kinds = KINDS[self.command]
        if kinds and not self.self_test and self.kind not in kinds:
            raise UsageError(f"{self.command} needs one of {', '.join(kinds)}")
        if self.get("eps") not in (1, -1):
            raise UsageError("--eps must be +1 or -1")
        for key in ("n", "max_iter"):
            if self.get(key) is not None and self.get(key) < 1:
                raise UsageError(f"--{key.replace('_', '-')} must be positive")
        if self.get("tol") is not None and not self.get("tol") > 0:
            raise UsageError("--tol must be positive")


def _load_toml(path):
    if sys.version_info >= (3, 11):
        import tomllib
    else:
        import tomli as tomllib
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    if data.get("schema", 1) != 1:
        raise UsageError(f"unsupported config schema {data.get('schema')!r}")
    unknown = sorted(set(data) - set(OPTIONS) - CONFIG_META)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    return data


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="TOML config file")
    common.add_argument("--self-test", action="store_true", help="run the built-in examples")
    for key, (typ, hlp) in OPTIONS.items():
        common.add_argument("--" + key.replace("_", "-"), dest=key, type=typ, default=None, help=hlp)
    p = _Parser(prog="cmc-atlas", description="CMC surfaces in M^2(kappa) x R")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    for cmd, kinds in KINDS.items():
        sp = sub.add_parser(cmd, parents=[common])
        if kinds:
            sp.add_argument("kind", nargs="?", choices=kinds)
    return p


def parse_config(argv) -> RunConfig:
    args = build_parser().parse_args(argv)
    if not args.command:
        raise UsageError("a command is required")
    values = {}
    kind = getattr(args, "kind", None)
    if args.config:
        data = _load_toml(args.config)
        if data.get("command", args.command) != args.command:
            raise UsageError(f"config is for {data['command']!r}, not {args.command!r}")
        kind = kind or data.get("kind")
        values.update({k: v for k, v in data.items() if k in OPTIONS})
    for key in OPTIONS:
        v = getattr(args, key)
        if v is not None:
            values[key] = v
    cfg = RunConfig(args.command, kind, values, args.self_test)
    cfg.validate()
    return cfg


def _threads():
    v = os.environ.get("CMC_ATLAS_THREADS")
    if v is None:
        return None
    try:
        n = int(v)
    except ValueError:
        raise UsageError("CMC_ATLAS_THREADS must be a positive integer") from None
    if n < 1:
        raise UsageError("CMC_ATLAS_THREADS must be a positive integer")
    return n


def _grid(cfg, default):
    g = cfg.get("grid")
    if g is None:
        return default
    parts = str(g).lower().split("x")
    try:
        vals = [int(p) for p in parts]
    except ValueError:
        raise UsageError(f"bad grid {g!r}") from None
    if len(vals) == 1:
        vals = vals * 2
    if len(vals) != 2 or min(vals) < 5:
        raise UsageError(f"bad grid {g!r}: need NxM with N, M >= 5")
    return tuple(vals)


def _space(cfg):
    from .ambient import AmbientSpace
    return AmbientSpace(float(cfg.get("kappa")), int(cfg.get("eps")))


def _emit(cfg, text, default_stdout=True):
    from .export import atomic_write
    out = cfg.get("out")
    if out:
        atomic_write(out, text)
    elif default_stdout:
        sys.stdout.write(text)


def _family(cfg):
    from .helicoidal import from_descriptor
    path = cfg.require("family")
    with open(path) as fh:
        d = json.load(fh)
    return from_descriptor(d), d


def _s_range(cfg, up, d=None):
    lo, hi = up.domain
    if d and "s_range" in d and cfg.get("s_min") is None and cfg.get("s_max") is None:
        return tuple(d["s_range"])
    a = cfg.get("s_min")
    b = cfg.get("s_max")
    if a is None or b is None:
        span = min(hi - lo, 2.0) if math.isfinite(hi - lo) else 2.0
        c = 0.5 * (lo + hi) if math.isfinite(hi - lo) else (lo + 1.0 if math.isfinite(lo) else hi - 3.0)
        a = c - 0.45 * span if a is None else a
        b = c + 0.45 * span if b is None else b
    return float(a), float(b)


def _natural_patch(cfg, grid):
    import numpy as np
    from .helicoidal import helicoidal_patch
    up, d = _family(cfg)
    a, b = _s_range(cfg, up, d)
    s = np.linspace(a, b, grid[0])
    th = np.linspace(0.0, cfg.get("theta_max", 2 * math.pi), grid[1])
    return up, helicoidal_patch(up, s, th)


def _rotational_patch(cfg, grid, s_range):
    """Patch of the rotational surface through the axis, s in [s_min, s_max]."""
    from .profiles import integrate_profile_system, profile_patch
    space = _space(cfg)
    H = float(cfg.get("H"))
    a = float(cfg.get("s_min", s_range[0]))
    b = float(cfg.get("s_max", s_range[1]))
    if not b > a >= 0:
        raise UsageError("need 0 <= s_min < s_max")
    if a == 0:
        return profile_patch(space, H, (a, b), grid[0], grid[1])
    c = integrate_profile_system(space, H, (0.0, 0.0, 0.0), s_eval=[0.0, a], tol=1e-15)
    if c.s.size != 2:
        raise UsageError(f"the profile from the axis ends before s = {a}")
    init = (float(c.rho[-1]), float(c.t[-1]), float(c.phi[-1]))
    p = profile_patch(space, H, (0.0, b - a), grid[0], grid[1], init=init)
    p.u = p.u + a
    return p


def _report(cfg, body: dict, passed: bool) -> int:
    from .export import write_json
    rep = {"schema": 1, "command": cfg.command, "kind": cfg.kind, "pass": bool(passed)}
    rep.update(body)
    if cfg.get("report"):
        write_json(cfg.get("report"), rep)
    status = "PASS" if passed else "FAIL"
    name = f"{cfg.command} {cfg.kind}" if cfg.kind else cfg.command
    print(f"{name}: {status}", file=sys.stderr)
    return EXIT_OK if passed else EXIT_FAIL


# generate


def cmd_generate(cfg):
    import numpy as np
    from .export import csv_text, dumps_json
    space = _space(cfg)
    H = float(cfg.get("H"))
    if cfg.kind == "rotational":
        from .profiles import rotational_profile
        I, flux = cfg.get("I"), cfg.get("flux")
        if I is None and flux is None:
            flux = 0.0
        if I is not None and flux is not None:
            raise UsageError("give only one of --I and --flux")
        c = rotational_profile(space, H, I, flux=flux, rho_range=(cfg.get("rho_min"), cfg.get("rho_max")),
                               n=cfg.get("n"))
        _emit(cfg, csv_text(["s", "rho", "t", "phi", "I_prime"], c.rows()))
        return _report(cfg, {"status": c.status, "samples": int(c.s.size), "flux": c.flux, "I": c.I,
                             "flux_drift": c.flux_drift(), "rho_end": float(c.rho[-1])}, True)
    if cfg.kind == "qzero":
        from .profiles import rotational_q_zero
        q = rotational_q_zero(space, H, int(cfg.get("sign")))
        rho = np.linspace(cfg.get("rho_min"), cfg.get("rho_max"), cfg.get("n"))
        pts = q.samples(rho)
        res = q.relation(pts[:, 0], pts[:, 1])
        _emit(cfg, csv_text(["rho", "t", "relation"], [tuple(map(float, r)) for r in np.column_stack([pts, res])]))
        return _report(cfg, {"case": q.case, "I": q.I, "samples": int(pts.shape[0]),
                             "max_relation": float(np.max(np.abs(res)))}, True)
    from .helicoidal import catenoid_family, family_descriptor, u_solution
    if cfg.kind == "helicoidal":
        up = u_solution(space, H, float(cfg.get("I", 0.0)), float(cfg.get("b", 0.0)), float(cfg.get("m")),
                        cfg.get("branch"), float(cfg.get("s0")))
    else:
        up = catenoid_family(float(cfg.require("I")), float(cfg.get("b", 0.0)), float(cfg.get("m")),
                             float(cfg.get("s0")))
    s_range = None
    if cfg.get("s_min") is not None and cfg.get("s_max") is not None:
        s_range = (cfg.get("s_min"), cfg.get("s_max"))
    grid = _grid(cfg, None)
    d = family_descriptor(up, s_range, grid)
    _emit(cfg, dumps_json(d))
    return _report(cfg, {"family": d, "ode_residual": up.residual}, True)


# deform


def cmd_deform(cfg):
    import numpy as np
    from .export import write_obj
    from .helicoidal import family_member, helicoidal_patch, isometric_deformation
    from .surfkit import fundamental_forms
    up, d = _family(cfg)
    grid = _grid(cfg, (101, 33))
    a, b = _s_range(cfg, up, d)
    s = np.linspace(a, b, grid[0])
    th = np.linspace(0.0, cfg.get("theta_max", 1.0), grid[1])
    m = float(cfg.get("m"))
    tol = cfg.get("tol", 1e-6)
    base = fundamental_forms(helicoidal_patch(up, s, th))
    if cfg.get("b") is None:
        member = family_member(up, m)
        patch = helicoidal_patch(member, s, th)
        cmc = True
    else:
        patch = isometric_deformation(up, m, float(cfg.get("b")), s, th)
        member, cmc = None, False
    ff = fundamental_forms(patch)
    dEFG = max(float(np.max(np.abs(getattr(ff, k)[1:-1, 1:-1] - getattr(base, k)[1:-1, 1:-1]))) for k in "EFG")
    body = {"m": m, "metric_deviation": dEFG, "tolerance": tol, "grid": list(grid)}
    passed = dEFG <= tol
    if cmc:
        dH = float(np.max(np.abs(ff.interior("H") - up.params.H)))
        body.update({"b": member.params.b, "I": member.params.I, "H_deviation": dH})
        passed = passed and dH <= tol
    else:
        body["b"] = float(cfg.get("b"))
        body["H_range"] = [float(np.min(ff.interior("H"))), float(np.max(ff.interior("H")))]
    if cfg.get("out"):
        write_obj(cfg.get("out"), patch.points, f"member m={m} b={body['b']}")
    return _report(cfg, body, passed)


# verify


def cmd_verify(cfg):
    import numpy as np
    from .surfkit import fundamental_forms
    k = cfg.kind
    if k == "q":
        from .helicoidal import conformal_reparametrize, q_constant
        from .surfkit import cr_residual, hopf_coefficients
        up, _ = _family(cfg)
        grid = _grid(cfg, (201, 65))
        h = float(cfg.get("h"))
        lo, hi = up.domain
        ref = 0.5 * (lo + hi) if math.isfinite(hi - lo) else None
        u = (np.arange(grid[0]) - (grid[0] - 1) / 2) * h
        v = np.arange(grid[1]) * h
        patch = conformal_reparametrize(up, u, v, s_ref=ref)
        q = hopf_coefficients(patch, order=4)
        cr = cr_residual(q)
        psi = q.interior("psi")
        tol = cfg.get("tol", 1e-5)
        qc = q_constant(up.space, up.params.H, up.params.I, up.params.b, up.params.m)
        body = {"cr_max": cr.max, "cr_l2": cr.l2, "tolerance": tol, "h": h, "grid": list(grid),
                "psi_mean": complex(psi.mean()), "psi_std": float(np.std(psi)), "q_constant": complex(qc)}
        return _report(cfg, body, cr.max <= tol)
    if k in ("cmc", "gauss"):
        grid = _grid(cfg, (201, 65))
        if cfg.get("family"):
            up, patch = _natural_patch(cfg, grid)
            H = up.params.H
        else:
            patch = _rotational_patch(cfg, grid, (0.2, 3.0))
            H = float(cfg.get("H"))
        ff = fundamental_forms(patch)
        tol = cfg.get("tol", 1e-6)
        if k == "cmc":
            val = float(np.max(np.abs(ff.interior("H") - H)))
            body = {"max_H_error": val, "H_target": H}
        else:
            val = float(np.max(np.abs(ff.gauss_residual(patch.space.eps)[2:-2, 2:-2])))
            body = {"max_gauss_residual": val}
        body.update({"tolerance": tol, "grid": list(grid)})
        return _report(cfg, body, val <= tol)
    from .integral_checks import KillingField, contact_angle_profile, flux_formula_check, minkowski_check
    if cfg.get("family"):
        raise UsageError(f"verify {k} works on rotational caps; drop --family")
    grid = _grid(cfg, (201, 65))
    patch = _rotational_patch(cfg, grid, (0.0, 1.0))
    ff = fundamental_forms(patch)
    if k == "angle":
        tol = cfg.get("tol", 1e-7)
        a = contact_angle_profile(patch, ff=ff)
        body = {"angle_mean": a.mean, "angle_std": a.std, "t_plane": a.t_plane, "tolerance": tol,
                "grid": list(grid)}
        return _report(cfg, body, a.std <= tol)
    fname = cfg.get("field")
    if fname not in ("vertical", "rotation"):
        raise UsageError("--field must be vertical or rotation")
    Y = getattr(KillingField, fname)(patch.space)
    tol = cfg.get("tol", 1e-6)
    check = minkowski_check if k == "minkowski" else flux_formula_check
    rep = check(patch, Y, H=float(cfg.get("H")), tol=tol, ff=ff)
    body = rep.as_dict()
    body.pop("pass", None)
    body["field"] = fname
    return _report(cfg, body, rep.passed)


# solve-graph


def parse_domain(text: str, space, n: int):
    from .killing_graph import GraphDomain
    try:
        kind, _, rest = text.partition(":")
        vals = dict(kv.split("=") for kv in rest.split(",") if kv)
        vals = {k.strip(): float(v) for k, v in vals.items()}
    except ValueError:
        raise UsageError(f"bad domain {text!r}") from None
    if kind == "disc":
        if not {"center", "r"} <= set(vals) or set(vals) - {"center", "r", "t"}:
            raise UsageError("disc domain needs center=..,r=.. (optional t=..)")
        return GraphDomain.disc(space, vals["center"], vals["r"], n=n, center_t=vals.get("t", 0.0))
    if kind in ("rect", "rectangle"):
        keys = {"rho0", "rho1", "t0", "t1"}
        if set(vals) != keys:
            raise UsageError("rect domain needs rho0, rho1, t0, t1")
        return GraphDomain.rectangle(space, vals["rho0"], vals["rho1"], vals["t0"], vals["t1"], n=n)
    raise UsageError(f"unknown domain kind {kind!r}")


def cmd_solve_graph(cfg):
    from .export import write_json, write_obj
    from .killing_graph import (gradient_estimate_check, height_check, min_principle_check,
                                solve_killing_graph, superharmonic_check)
    space = _space(cfg)
    grid = _grid(cfg, (65, 65))
    if grid[0] != grid[1]:
        raise UsageError("graph lattices are square")
    dom = parse_domain(cfg.require("domain"), space, grid[0])
    H = float(cfg.get("H"))
    sol = solve_killing_graph(dom, H, tol=cfg.get("tol", 1e-8), max_iter=cfg.get("max_iter"))
    checks = [height_check(sol), superharmonic_check(sol), min_principle_check(sol)]
    if sol.margin.guaranteed:
        checks.append(gradient_estimate_check(sol))
    passed = sol.converged and all(c.passed for c in checks)
    out = cfg.get("out")
    if out:
        write_json(out, sol.as_json())
    obj = cfg.get("obj") or (os.path.splitext(out)[0] + ".obj" if out else None)
    if obj:
        write_obj(obj, sol.patch.points, f"Killing graph H={H}")
    body = {"domain": dom.as_dict(), "H": H, "diagnostics": sol.diagnostics(),
            "checks": [c.as_dict() for c in checks], "margin_reason": sol.margin.reason}
    return _report(cfg, body, passed)


# bounds


def cmd_bounds(cfg):
    from .integral_checks import area_bound, height_bound
    space = _space(cfg)
    H = float(cfg.get("H"))
    dom = None
    if cfg.get("domain"):
        dom = parse_domain(cfg.get("domain"), space, 33)
    if cfg.kind == "height":
        if dom is not None:
            lo, hi = dom.sn_extremes()
        else:
            lo, hi = cfg.require("inf_Y"), cfg.require("sup_Y")
        b = height_bound(space, H, hi, lo)
        return _report(cfg, {"bound": b.value, "applies": b.applies, "reason": b.reason, "H": H,
                             "sup_Y": hi, "inf_Y": lo}, True)
    if dom is None:
        raise UsageError("bounds area needs --domain")
    val = area_bound(dom.max_sn_boundary(), dom.sn_extremes()[0], dom.perimeter, dom.area)
    return _report(cfg, {"bound": val, "H": H, "domain": dom.as_dict()}, abs(H) <= val)


# export


def cmd_export(cfg):
    import numpy as np
    from .export import csv_text, dumps_json, obj_text, patch_json
    grid = _grid(cfg, (101, 33))
    if cfg.get("family"):
        up, patch = _natural_patch(cfg, grid)
    else:
        up, patch = None, _rotational_patch(cfg, grid, (0.0, 1.0))
    if cfg.kind == "obj":
        text = obj_text(patch.points)
    elif cfg.kind == "json":
        text = dumps_json(patch_json(patch))
    elif up is None:
        from .profiles import integrate_profile_system
        c = integrate_profile_system(patch.space, float(cfg.get("H")), (0.0, 0.0, 0.0), s_eval=patch.u,
                                     tol=1e-15) if patch.u[0] == 0 else None
        if c is None:
            raise UsageError("export csv of a rotational profile starts on the axis")
        text = csv_text(["s", "rho", "t", "phi", "I_prime"], c.rows())
    else:
        from .helicoidal import bour_coordinates
        ch = bour_coordinates(up, patch.u)
        text = csv_text(["s", "rho", "t", "drift"], [tuple(map(float, r)) for r in
                                                    np.column_stack([ch.s, ch.rho, ch.t, ch.drift])])
    _emit(cfg, text)
    return _report(cfg, {"grid": list(grid), "format": cfg.kind}, True)


# self-tests


def _close(a, b, tol=1e-12):
    return abs(a - b) <= tol * max(1.0, abs(b))


def self_tests(command: str) -> list:
    import numpy as np
    from .ambient import AmbientSpace, embed_point, inner, kappa_trig
    results = []

    def check(name, ok):
        results.append((name, bool(ok)))

    if command == "generate":
        k = kappa_trig(1.0, math.pi / 2)
        check("kappa_trig(1, pi/2) = (1, 0, 0)", _close(k.sn, 1) and abs(k.cs) < 1e-15 and abs(k.ct) < 1e-15)
        k = kappa_trig(0.0, 2.0)
        check("kappa_trig(0, 2) = (2, 1, 0.5)", _close(k.sn, 2) and _close(k.cs, 1) and _close(k.ct, 0.5))
        check("embed_point flat", np.allclose(embed_point(AmbientSpace(0, 1), 1.0, 0.0, 5.0), [1, 0, 5]))
        check("embed_point north pole", np.allclose(embed_point(AmbientSpace(1, 1), 0.0, 0.3, 0.0), [1, 0, 0, 0]))
        from .profiles import rotational_profile
        c = rotational_profile(AmbientSpace(0, 1), 0.0, flux=0.0, rho_range=(0.0, 2.0), n=11)
        check("H = 0, zero flux profile is a horizontal plane", np.max(np.abs(c.t)) == 0.0)
    elif command == "deform":
        from .helicoidal import family_member, u_solution
        up = u_solution(AmbientSpace(0, 1), 0.3, 0.2, 0.5, s_ref=0.0)
        mem = family_member(up, 1.0)
        check("m = 1 member is the base surface", _close(mem.params.b, 0.5) and _close(mem.params.I, 0.2))
    elif command == "verify":
        from .surfkit import QField, SurfacePatch, cr_residual, fundamental_forms, hopf_coefficients
        sp = AmbientSpace(1, 1)
        u = np.linspace(0.1, 1.0, 11)
        v = np.linspace(0, 1, 11)
        R, T = np.meshgrid(u, v, indexing="ij")
        P = SurfacePatch(sp, "cylindrical", u, v, embed_point(sp, R, T, np.zeros_like(R)))
        ff = fundamental_forms(P)
        check("horizontal slice has H = 0 and vanishing second form",
              max(np.max(np.abs(getattr(ff, a))) for a in "efgH") < 1e-10)
        c = np.full((9, 9), 1 + 2j)
        q = QField(c, c, c, np.zeros((9, 9)), (0.1, 0.1), np.ones((9, 9)))
        check("constant psi has zero CR residual", cr_residual(q).max == 0.0)
        fl = AmbientSpace(0, 1)
        x = np.linspace(-1, 1, 11)
        X, Yg = np.meshgrid(x, x, indexing="ij")
        Pc = SurfacePatch(fl, "conformal", x, x, np.stack([X, Yg, np.zeros_like(X)], axis=-1))
        check("flat plane has psi = 0", np.max(np.abs(hopf_coefficients(Pc).psi)) < 1e-12)
        check("inner(dt, dt) = -1 for eps = -1", inner(AmbientSpace(0, -1), [0, 0, 1], [0, 0, 1]) == -1)
    elif command == "solve-graph":
        from .killing_graph import GraphDomain, existence_margin, solve_killing_graph
        d = GraphDomain.disc(AmbientSpace(0, 1), 3.0, 1.0, n=33)
        m = existence_margin(d, 0.0)
        check("H = 0 margin is min kappa_g / gamma~", m.guaranteed and abs(m.value - 1 / 1.75) < 1e-6)
        s = solve_killing_graph(d, 0.0)
        check("H = 0 solves with u = 0 in <= 2 iterations",
              s.converged and s.iterations <= 2 and np.max(np.abs(s.u)) == 0.0)
    elif command == "bounds":
        from .integral_checks import area_bound, height_bound
        sp = AmbientSpace(0, 1)
        vals = [height_bound(sp, H, 4.0, 2.0).value for H in (0.1, 0.3, 1.0)]
        check("height bound decreases in |H|", vals[0] > vals[1] > vals[2])
        check("height bound for H = 0.3 on the rho in [2, 4] disc", _close(vals[1], 1 / 0.3))
        check("area bound of a unit disc at rho = 3", _close(area_bound(4.0, 2.0, 2 * math.pi, math.pi), 2.0))
    elif command == "export":
        from .export import dumps_json, obj_text
        txt = obj_text(np.zeros((3, 3, 3)))
        check("3x3 OBJ has 9 vertices and 8 faces",
              txt.count("\nv ") + txt.startswith("v ") == 9 and txt.count("\nf ") == 8)
        check("nan serialises to null", dumps_json({"x": float("nan")}).strip() == '{\n  "x": null\n}')
        check("17 significant digits", dumps_json([0.1]).strip() == "[0.10000000000000001]")
    return results


def run_self_test(cfg) -> int:
    res = self_tests(cfg.command)
    for name, ok in res:
        print(f"{'PASS' if ok else 'FAIL'} {cfg.command}: {name}", file=sys.stderr)
    passed = all(ok for _, ok in res)
    return _report(cfg, {"self_test": [{"name": n, "pass": ok} for n, ok in res]}, passed)


HANDLERS = {
    "generate": cmd_generate,
    "deform": cmd_deform,
    "verify": cmd_verify,
    "solve-graph": cmd_solve_graph,
    "bounds": cmd_bounds,
    "export": cmd_export,
}


def dispatch(cfg: RunConfig) -> int:
    if cfg.self_test:
        return run_self_test(cfg)
    return HANDLERS[cfg.command](cfg)


def main(argv=None) -> int:
    try:
        threads = _threads()
        if threads is not None:
            for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
                os.environ.setdefault(var, str(threads))
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
        return dispatch(cfg)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError, KeyError) as e:
        # DomainError is a ValueError
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
