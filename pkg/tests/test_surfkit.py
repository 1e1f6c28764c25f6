import numpy as np
import pytest

from cmc_atlas.ambient import AmbientSpace, DomainError, embed_point, inner
from cmc_atlas.helicoidal import conformal_map, u_of_s
from cmc_atlas.surfkit import (QField, SurfacePatch, conformality_defect, cr_residual,
                               curvature_norm_residual, derivative, fundamental_forms,
                               hopf_coefficients, psi2_norm_residual)

from conftest import conformal_family_patch

GD_15 = 1.1317283452505090937429693907  # 2 atan(tanh(3/4)), mpmath


def _slice_patch(space, n=21):
    u = np.linspace(0.2, 1.2, n)
    v = np.linspace(0.0, 1.0, n)
    R, T = np.meshgrid(u, v, indexing="ij")
    return SurfacePatch(space, "cylindrical", u, v, embed_point(space, R, T, np.full_like(R, 0.7)))


@pytest.mark.parametrize("k,e", [(1.0, 1), (-1.0, 1), (0.0, 1), (-1.0, -1), (1.0, -1)])
def test_horizontal_slice_is_totally_geodesic(k, e):
    ff = fundamental_forms(_slice_patch(AmbientSpace(k, e)))
    for name in "efgH":
        assert np.max(np.abs(getattr(ff, name))) < 1e-10


def test_round_cylinder_has_H_half():
    sp = AmbientSpace(0.0, 1)
    th = np.linspace(0, 2 * np.pi, 65)
    t = np.linspace(0, 1, 21)
    TH, T = np.meshgrid(th, t, indexing="ij")
    pts = np.stack([np.cos(TH), np.sin(TH), T], axis=-1)
    ff = fundamental_forms(SurfacePatch(sp, "cylindrical", th, t, pts))
    assert np.max(np.abs(np.abs(ff.interior("H")) - 0.5)) < 1e-8
    assert np.max(np.abs(ff.interior("K_ext"))) < 1e-8


def test_small_grid_rejected():
    sp = AmbientSpace(0.0, 1)
    with pytest.raises(DomainError):
        fundamental_forms(_slice_patch(sp, n=4))


def test_derivative_orders():
    x = np.linspace(0, 1, 41)
    h = x[1] - x[0]
    for order, tol in ((2, 1e-3), (4, 1e-6), (6, 1e-9)):
        d = derivative(np.sin(x), h, 0, 1, order)
        assert np.max(np.abs(d - np.cos(x))) < tol
        d2 = derivative(np.sin(x), h, 0, 2, order)
        assert np.max(np.abs(d2 + np.sin(x))) < 100 * tol


def test_normal_contract(hyperbolic_cap):
    patch, ff = hyperbolic_cap
    sp = patch.space
    w = (slice(1, -1), slice(1, -1))
    assert np.max(np.abs(inner(sp, ff.n1, ff.n1)[w] - sp.eps)) < 1e-12
    for d in (ff.Xu, ff.Xv):
        scale = np.sqrt(np.abs(inner(sp, d, d)))[w]
        assert np.max(np.abs(inner(sp, ff.n1, d)[w]) / np.maximum(scale, 1e-300)) < 1e-10
    assert np.max(np.abs(inner(sp, ff.n1, ff.n2)[w])) < 1e-10
    # time-like normal of a space-like surface
    assert np.min(ff.nu[w] ** 2) >= 1 - 1e-12


def test_hyperbolic_cap_mean_curvature(hyperbolic_cap):
    _, ff = hyperbolic_cap
    assert np.max(np.abs(ff.interior("H")[1:] + 0.5)) <= 1e-6


def test_gauss_equation_second_order():
    """|K_int - K_bar - eps K_ext| at order 2 shrinks by about 4 per halving."""
    from cmc_atlas.profiles import profile_patch
    sp = AmbientSpace(1.0, 1)
    res = []
    for n in (41, 81):
        p = profile_patch(sp, 0.4, (0.3, 1.3), n, n)
        ff = fundamental_forms(p, order=2)
        q = (n - 1) // 4  # the middle half in both parameters
        res.append(np.max(np.abs(ff.gauss_residual(sp.eps)[q:-q, q:-q])))
    assert res[0] / res[1] > 3.5


def test_helicoid_psi_is_half():
    up, patch = conformal_family_patch(AmbientSpace(1.0, 1), 0.0, 0.0, 1.0)
    q = hopf_coefficients(patch)
    psi = q.interior("psi")
    assert np.max(np.abs(psi - 0.5)) < 1e-8


def test_flat_helicoid_psi1():
    up, patch = conformal_family_patch(AmbientSpace(0.0, 1), 0.0, 0.0, 1.0, s_ref=2.0)
    q = hopf_coefficients(patch)
    assert np.max(np.abs(q.interior("psi1") + 1j)) < 1e-8
    assert np.all(q.psi2 == 0)


def test_plane_has_zero_psi():
    sp = AmbientSpace(0.0, -1)
    x = np.linspace(-1, 1, 11)
    X, Y = np.meshgrid(x, x, indexing="ij")
    p = SurfacePatch(sp, "conformal", x, x, np.stack([X, Y, np.zeros_like(X)], axis=-1))
    q = hopf_coefficients(p)
    assert np.max(np.abs(q.psi)) == 0


def test_non_conformal_chart_rejected(hyperbolic_cap):
    patch, _ = hyperbolic_cap
    with pytest.raises(DomainError):
        hopf_coefficients(patch)
    bad = SurfacePatch(patch.space, "conformal", patch.u, patch.v, patch.points, {"tol_conf": 1e-8})
    with pytest.raises(DomainError, match="not conformal"):
        hopf_coefficients(bad)


def test_constant_psi_has_zero_residual():
    c = np.full((9, 9), 0.3 - 0.7j)
    q = QField(c, c, c, np.zeros((9, 9)), (0.1, 0.2), np.ones((9, 9)))
    assert cr_residual(q).max == 0.0


def test_cr_residual_two_grid_and_perturbation():
    """CMC patch: residual drops ~16x at order 4 per halving; H + delta sin(u) raises it."""
    sp = AmbientSpace(1.0, 1)
    from cmc_atlas.helicoidal import conformal_reparametrize, u_solution
    up = u_solution(sp, 0.3, 0.2, 0.5)
    out = []
    for h in (0.02, 0.01):
        u = np.arange(-0.4, 0.4 + h / 2, h)
        p = conformal_reparametrize(up, u, u + 0.4)
        out.append(cr_residual(hopf_coefficients(p, order=4)).max)
    assert out[0] / out[1] > 3.5
    U = np.meshgrid(p.u, p.v, indexing="ij")[0]
    pert = cr_residual(hopf_coefficients(p, order=4, H=0.3 + 1e-2 * np.sin(U))).max
    assert pert > 100 * out[1]


@pytest.mark.parametrize("space,H,I,b,s_ref,span", [
    (AmbientSpace(1.0, 1), 0.3, 0.2, 0.5, None, 1.0),
    (AmbientSpace(-1.0, 1), 0.3, 0.2, 0.5, None, 1.0),
    (AmbientSpace(-1.0, -1), 0.8, 0.2, 0.5, -1.5, 0.05),
    (AmbientSpace(1.0, -1), 0.3, 0.2, 0.5, -0.3, 1.0),
])
def test_curvature_identities(space, H, I, b, s_ref, span):
    up, p = conformal_family_patch(space, H, I, b, s_ref=s_ref, span=span)
    ff = fundamental_forms(p)
    q = hopf_coefficients(p, ff)
    w = (slice(3, -3), slice(3, -3))
    assert np.max(curvature_norm_residual(q, ff, space)[w]) < 1e-8
    assert np.max(psi2_norm_residual(q, ff, space)[w]) < 1e-8


def test_conformal_identity_for_unit_U():
    u = np.linspace(-1, 1, 9)
    assert np.allclose(conformal_map(lambda s: 1.0, 0.0, u), u, atol=1e-12)


def test_gudermannian_oracle_and_round_trip():
    s = np.linspace(-3, 3, 13)
    u = u_of_s(np.cosh, 0.0, s)
    assert np.max(np.abs(u - 2 * np.arctan(np.tanh(s / 2)))) < 1e-12
    assert u_of_s(np.cosh, 0.0, np.array([1.5]))[0] == pytest.approx(GD_15, abs=1e-13)
    back = conformal_map(np.cosh, 0.0, u)
    assert np.max(np.abs(back - s)) <= 1e-10


@pytest.mark.parametrize("space,s_ref,span", [
    (AmbientSpace(1.0, 1), None, 1.0),
    (AmbientSpace(0.0, 1), 0.0, 1.0),
    (AmbientSpace(-1.0, -1), -1.5, 0.05),
])
def test_conformal_output_defect(space, s_ref, span):
    H = 0.8 if space.eps == -1 else 0.3
    _, p = conformal_family_patch(space, H, 0.2, 0.5, s_ref=s_ref, span=span)
    assert conformality_defect(fundamental_forms(p)) <= 1e-8
