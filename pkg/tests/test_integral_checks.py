import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmc_atlas.ambient import AmbientSpace, DomainError, embed_point, sn
from cmc_atlas.integral_checks import (KillingField, area_bound, contact_angle_profile,
                                       disc_area_bound, enclosed_area, boundary_loops,
                                       flux_formula_check, height_bound, minkowski_check,
                                       surface_integral)
from cmc_atlas.surfkit import SurfacePatch, fundamental_forms

# -2 pi eps H (cosh rho_b - 1) for the hyperbolic cap over s in [0, 2]
CAP_RHS = -11.7636421889765482682256914265
CAP_RHO_B = 2.2388339416878203853375813434


def tilted_bump(n=101, nv=65):
    """Graph t = (1 - r^2)(1 + r cos(theta)/2) over the unit disc: planar boundary, angle not constant."""
    sp = AmbientSpace(0.0, 1)
    r = np.linspace(0.0, 1.0, n)
    th = np.linspace(0.0, 2 * math.pi, nv)
    R, T = np.meshgrid(r, th, indexing="ij")
    t = (1 - R**2) * (1 + 0.5 * R * np.cos(T))
    return SurfacePatch(sp, "cylindrical", r, th, embed_point(sp, R, T, t))


def test_hemisphere_minkowski(hemisphere):
    patch, ff = hemisphere
    r = minkowski_check(patch, KillingField.vertical(patch.space), ff=ff)
    assert r.rhs == pytest.approx(math.pi, rel=1e-8)
    assert r.relative <= 1e-6 and r.passed
    assert r.meta["observed_order"] == pytest.approx(2.0, abs=0.05)


def test_hyperbolic_cap_minkowski(hyperbolic_cap):
    patch, ff = hyperbolic_cap
    r = minkowski_check(patch, KillingField.vertical(patch.space), ff=ff)
    assert abs(r.rhs - CAP_RHS) <= 1e-6
    assert abs(r.lhs - CAP_RHS) <= 1e-6
    assert r.meta["observed_order"] == pytest.approx(2.0, abs=0.05)


def test_rotation_field_minkowski_vanishes(hyperbolic_cap):
    patch, ff = hyperbolic_cap
    r = minkowski_check(patch, KillingField.rotation(patch.space), ff=ff)
    assert abs(r.lhs) < 1e-6 and abs(r.rhs) < 1e-6


def test_flux_formula_on_caps(hemisphere, hyperbolic_cap):
    for patch, ff in (hemisphere, hyperbolic_cap):
        r = flux_formula_check(patch, KillingField.vertical(patch.space), ff=ff)
        assert r.passed, r.as_dict()
    patch, ff = hemisphere
    assert flux_formula_check(patch, KillingField.vertical(patch.space), ff=ff).lhs == \
        pytest.approx(2 * math.pi, rel=1e-7)


def test_enclosed_area_hyperbolic(hyperbolic_cap):
    patch, ff = hyperbolic_cap
    lp = boundary_loops(patch, ff)[0]
    assert enclosed_area(patch.space, lp) == pytest.approx(2 * math.pi * (math.cosh(CAP_RHO_B) - 1), rel=1e-7)


def test_surface_integral_sphere_area(hemisphere):
    patch, ff = hemisphere
    out = surface_integral(patch, ff, np.ones(patch.shape))
    assert out["value"] == pytest.approx(2 * math.pi, rel=1e-8)
    assert len(out["trapezoid"]) >= 2


@pytest.mark.parametrize("kappa,eps", [(1.0, 1), (-1.0, 1), (-1.0, -1), (0.0, -1)])
def test_rotation_norm_is_sn(kappa, eps):
    sp = AmbientSpace(kappa, eps)
    rho = np.array([0.2, 0.7, 1.3])
    X = embed_point(sp, rho, np.array([0.1, 2.0, -1.0]), np.array([0.0, 1.0, -2.0]))
    assert np.allclose(KillingField.rotation(sp).norm(X), sn(kappa, rho), rtol=1e-13)
    assert np.allclose(KillingField.vertical(sp).norm(X), 1.0)


def test_killing_field_errors():
    with pytest.raises(DomainError):
        KillingField(AmbientSpace(0.0, 1), "screw")
    with pytest.raises(DomainError):
        KillingField.rotation(AmbientSpace(1.0, 1), axis=(0.0, 1.0))


def test_height_bound_cases():
    assert height_bound(AmbientSpace(0.0, 1), 0.3, 4.0, 3.0).value == pytest.approx(4 / 9 / 0.3)
    b = height_bound(AmbientSpace(-1.0, 1), 1.0, 1.0, 1.0)
    assert b.applies and b.value == pytest.approx(2.0)
    assert not height_bound(AmbientSpace(-1.0, 1), 0.5, 1.0, 1.0).applies
    assert not height_bound(AmbientSpace(0.0, -1), 0.5, 1.0, 1.0).applies
    assert not height_bound(AmbientSpace(0.0, 1), 0.0, 1.0, 1.0).applies
    with pytest.raises(DomainError):
        height_bound(AmbientSpace(0.0, 1), 0.3, 1.0, 2.0)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.05, 5.0), st.floats(0.05, 5.0), st.floats(1.0, 4.0), st.floats(0.1, 3.0))
def test_height_bound_monotone(H1, H2, ratio, inf_Y):
    """Larger |H| or a narrower spread of |Y| never loosens the bound."""
    sp = AmbientSpace(1.0, 1)
    lo, hi = sorted((H1, H2))
    assert height_bound(sp, hi, ratio * inf_Y, inf_Y).value <= height_bound(sp, lo, ratio * inf_Y, inf_Y).value * (1 + 1e-12)
    assert height_bound(sp, lo, inf_Y, inf_Y).value <= height_bound(sp, lo, ratio * inf_Y, inf_Y).value * (1 + 1e-12)


def test_area_bound():
    assert disc_area_bound(AmbientSpace(0.0, 1), 3.0, 1.0) == pytest.approx(2.0)
    assert area_bound(1.0, 1.0, 2 * math.pi, math.pi) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        disc_area_bound(AmbientSpace(0.0, 1), 1.0, 1.0)
    with pytest.raises(DomainError):
        disc_area_bound(AmbientSpace(1.0, 1), 2.5, 1.0)


def test_contact_angle_constant_on_caps(hemisphere, hyperbolic_cap):
    for patch, ff in (hemisphere, hyperbolic_cap):
        a = contact_angle_profile(patch, ff=ff)
        assert a.std <= 1e-7


def test_contact_angle_control_varies():
    a = contact_angle_profile(tilted_bump())
    assert a.t_plane == pytest.approx(0.0)
    assert a.std > 1e-2


def test_contact_angle_needs_planar_boundary():
    sp = AmbientSpace(0.0, 1)
    r = np.linspace(0.0, 1.0, 21)
    th = np.linspace(0.0, 2 * math.pi, 33)
    R, T = np.meshgrid(r, th, indexing="ij")
    p = SurfacePatch(sp, "cylindrical", r, th, embed_point(sp, R, T, R * np.cos(T)))
    with pytest.raises(DomainError):
        contact_angle_profile(p)


def test_boundary_needs_full_turn():
    sp = AmbientSpace(0.0, 1)
    r = np.linspace(0.0, 1.0, 11)
    th = np.linspace(0.0, 1.0, 11)
    R, T = np.meshgrid(r, th, indexing="ij")
    p = SurfacePatch(sp, "cylindrical", r, th, embed_point(sp, R, T, 0 * R))
    with pytest.raises(DomainError):
        boundary_loops(p, fundamental_forms(p))
