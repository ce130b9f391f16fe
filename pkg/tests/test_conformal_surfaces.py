import numpy as np
import pytest

from movingframes import builtins
from movingframes import conformal_surfaces as cs
from movingframes.errors import IrregularPoint, UmbilicPoint
from movingframes.groups import (GRAM, Geometry, frame_residual, frame_violations,
                                 project_sphere, random_group_element)
from movingframes.surfaces import AnalyticSurface, SampledSurface

from .conftest import ellipsoid

TWO_PI = 2 * np.pi
R2 = "sqrt(2)"


def ip(a, b):
    return np.einsum("...i,ij,...j->...", a, GRAM, b)


def rotated_clifford():
    """Clifford torus with parameters rotated by 45 degrees."""
    a, b = "((u+v)/sqrt(2))", "((v-u)/sqrt(2))"
    return AnalyticSurface([f"cos{a}/{R2}", f"sin{a}/{R2}", f"cos{b}/{R2}", f"sin{b}/{R2}"],
                           domain=((-3, 3), (-3, 3)))


def bumped_clifford(eps):
    bump = "exp(cos(u)+cos(v)-2)"
    n = f"sqrt(1+({eps!r}*{bump})^2)"
    comps = [f"(cos(u)+{eps!r}*{bump}*cos(u))/({R2}*{n})",
             f"(sin(u)+{eps!r}*{bump}*sin(u))/({R2}*{n})",
             f"(cos(v)-{eps!r}*{bump}*cos(v))/({R2}*{n})",
             f"(sin(v)-{eps!r}*{bump}*sin(v))/({R2}*{n})"]
    return AnalyticSurface(comps, domain=((0, TWO_PI), (0, TWO_PI)), periodic=(True, True))


def tangent_residual(S, u, v, vec):
    """Distance of the S^3 direction of ``vec`` at S(u, v) from the tangent plane."""
    fr = cs.surface_frame_f1(S, u, v)
    h = 1e-7
    d = (project_sphere(fr.matrix[..., 0] + h * vec) - project_sphere(fr.matrix[..., 0] - h * vec))
    d = d / (2 * h)
    P = S.partials(u, v, 1)
    B = np.stack([P[(1, 0)], P[(0, 1)]], -1)
    coef, *_ = np.linalg.lstsq(B, d, rcond=None)
    return np.linalg.norm(B @ coef - d)


def test_first_frame_on_clifford(clifford):
    fr = cs.surface_frame_f1(clifford, 0.0, 0.0)
    assert frame_violations(fr.matrix) == []
    assert np.max(np.abs(fr.omega3)) <= 1e-7
    for k in (1, 2):
        assert tangent_residual(clifford, 0.0, 0.0, fr.matrix[:, k]) <= 1e-8


def test_first_frame_normal_on_sphere(sphere):
    u, v = np.array([0.3, 1.2, 4.0]), np.array([0.5, 1.5, 2.5])
    fr = cs.surface_frame_f1(sphere, u, v)
    y = sphere.points(u, v)
    e3 = fr.matrix[..., 3]
    normal = e3[..., 1:4] - e3[..., :1] * y
    euclid = y / np.linalg.norm(y, axis=-1, keepdims=True)
    cos = np.sum(normal * euclid, -1) / np.linalg.norm(normal, axis=-1)
    np.testing.assert_allclose(np.abs(cos), 1.0, atol=1e-10)


def test_collapsed_parametrization():
    S = AnalyticSurface(["u", "u", "0"], domain=((0, 1), (0, 1)))
    with pytest.raises(IrregularPoint):
        cs.surface_frame_f1(S, 0.5, 0.5)


def test_shape_coefficients(clifford, sphere):
    sc = cs.shape_coefficients(sphere, *sphere.grid(16))
    np.testing.assert_allclose(sc.a, sc.c, atol=1e-10)
    np.testing.assert_allclose(sc.b, 0.0, atol=1e-10)
    sc = cs.shape_coefficients(clifford, *clifford.grid(16))
    np.testing.assert_allclose(sc.b, 0.0, atol=1e-12)
    assert np.ptp(sc.a) <= 1e-7 and np.ptp(sc.c) <= 1e-7
    assert abs(sc.a[0, 0] - sc.c[0, 0]) > 1.0
    assert sc.residual.max() <= 1e-6


def _ambient_directions(S, u, v):
    fr = cs.surface_frame_f1(S, u, v)
    P = S.partials(u, v, 1)
    out = []
    for ang in cs.curvature_line_directions(S, u, v):
        d = np.cos(ang)[..., None] * P[(1, 0)] + np.sin(ang)[..., None] * P[(0, 1)]
        out.append(d / np.linalg.norm(d, axis=-1, keepdims=True))
    return out


def _same_lines(a, b):
    cos = np.abs(np.sum(a[0] * b[0], -1)), np.abs(np.sum(a[0] * b[1], -1))
    return np.maximum(cos[0], cos[1])


def test_rotated_parameters_keep_invariants(clifford):
    R = rotated_clifford()
    u, v = np.array([0.2, 1.0, -1.5]), np.array([0.3, -0.7, 2.0])
    U, V = (u + v) / np.sqrt(2), (v - u) / np.sqrt(2)  # the same points on the torus
    np.testing.assert_allclose(R.points(u, v), clifford.points(U, V), atol=1e-14)
    sr, s0 = cs.shape_coefficients(R, u, v), cs.shape_coefficients(clifford, U, V)
    assert np.min(np.abs(sr.b)) > 0.1
    np.testing.assert_allclose(sr.density, s0.density, atol=1e-6)
    np.testing.assert_allclose(_same_lines(_ambient_directions(R, u, v),
                                           _ambient_directions(clifford, U, V)), 1.0, atol=1e-6)


def test_third_fundamental_form_examples():
    z = np.zeros(1)
    umb = cs.ShapeCoefficients(z + 2.0, z, z + 2.0, z)
    assert all(np.all(x == 0) for x in cs.third_fundamental_form(umb))
    diag = cs.ShapeCoefficients(z + 1.0, z, z - 1.0, z)
    assert cs.third_fundamental_form(diag) == (0.0, -0.0, -2.0)
    n1, n2 = cs.null_directions(diag)
    np.testing.assert_allclose(sorted([n1[0], n2[0]]), [0.0, np.pi / 2])
    skew = cs.ShapeCoefficients(z + 1.0, z + 1.0, z + 1.0, z)
    n1, n2 = cs.null_directions(skew)
    np.testing.assert_allclose(sorted([n1[0], n2[0]]), [np.pi / 4, 3 * np.pi / 4])
    assert np.isnan(cs.null_directions(umb)[0][0])


def test_willmore_suite(clifford, sphere):
    rep = cs.willmore_density_and_energy(sphere, (32, 32))
    assert rep.energy <= 1e-10 and rep.umbilic.all()
    rep = cs.willmore_density_and_energy(clifford, (64, 64))
    oracle = cs.euclidean_willmore_s3(clifford, (64, 64))
    assert oracle == pytest.approx(2 * np.pi**2, rel=1e-10)
    assert rep.energy == pytest.approx(oracle, rel=5e-3)
    assert rep.gauss_area == pytest.approx(rep.energy, rel=1e-2)
    assert not rep.umbilic.any()


def test_willmore_of_torus_of_revolution():
    S = builtins.surface("torus_of_revolution(2, 1)")
    rep = cs.willmore_density_and_energy(S, (64, 64))
    assert rep.energy == pytest.approx(builtins.torus_willmore(2.0, 1.0), rel=1e-6)
    assert rep.gauss_area == pytest.approx(rep.energy, rel=1e-2)


@pytest.mark.parametrize("seed", range(5))
def test_willmore_is_moebius_invariant(clifford, seed):
    g = random_group_element(Geometry.MOEBIUS3, seed)
    moved = cs.moebius_image_surface(clifford, g)
    W = cs.willmore_density_and_energy(moved, (64, 64), gauss_area=False).energy
    assert W == pytest.approx(2 * np.pi**2, rel=1e-2)


def test_willmore_is_stationary_at_clifford():
    W0 = 2 * np.pi**2
    for eps in (1e-3, 1e-2):
        W = cs.willmore_density_and_energy(bumped_clifford(eps), (64, 64), gauss_area=False)
        assert W.energy - W0 >= -1e-3


def test_gauss_map(sphere, clifford):
    G = cs.conformal_gauss_map(sphere, *sphere.grid(8))
    assert np.max(np.ptp(G.reshape(-1, 5), axis=0)) <= 1e-6
    U, V = clifford.grid(8)
    G = cs.conformal_gauss_map(clifford, U, V)
    e0 = cs.surface_frame_f1(clifford, U, V).matrix[..., 0]
    np.testing.assert_allclose(ip(G, G), 1.0, atol=1e-8)
    np.testing.assert_allclose(ip(G, e0), 0.0, atol=1e-8)


def test_gauss_map_is_independent_of_first_frame(clifford):
    R = rotated_clifford()
    u, v = np.array([0.2, 1.0]), np.array([0.3, -0.7])
    U, V = (u + v) / np.sqrt(2), (v - u) / np.sqrt(2)
    np.testing.assert_allclose(cs.conformal_gauss_map(R, u, v),
                               cs.conformal_gauss_map(clifford, U, V), atol=1e-8)


def test_third_frame_on_clifford(clifford):
    U, V = clifford.grid(4)
    f3 = cs.adapted_frame_f3(clifford, U, V)
    assert frame_residual(f3.matrix).max() <= 1e-8
    assert np.max(np.abs(f3.rotated_b)) <= 1e-9
    np.testing.assert_allclose(f3.shape, np.broadcast_to(np.diag([1.0, -1.0]), f3.shape.shape),
                               atol=1e-9)
    # the dual of the Clifford torus is its antipodal image
    np.testing.assert_allclose(f3.dual_point, -clifford.points(U, V), atol=1e-8)


def test_third_frame_kills_omega03():
    S = builtins.surface("torus_of_revolution(2, 1)")
    u, v = np.array([0.3, 2.0]), np.array([1.0, 4.0])
    f3 = cs.adapted_frame_f3(S, u, v)
    Gu, Gv = cs._gauss_derivatives(S, u, v)
    e4 = f3.matrix[..., 4]
    np.testing.assert_allclose(ip(Gu, e4), 0.0, atol=1e-6)
    np.testing.assert_allclose(ip(Gv, e4), 0.0, atol=1e-6)
    assert np.max(np.abs(f3.rotated_b)) <= 1e-9
    assert frame_residual(f3.matrix).max() <= 1e-8


def test_dual_of_dual_returns_the_surface(clifford):
    U, V, D = cs.dual_surface_points(clifford, 64)
    dual = SampledSurface(D, clifford.domain, clifford.periodic)
    idx = (slice(3, None, 8), slice(5, None, 8))
    back = cs.adapted_frame_f3(dual, U[idx], V[idx]).dual_point
    np.testing.assert_allclose(back, clifford.points(U[idx], V[idx]), atol=1e-5)


def test_umbilic_sample_raises(sphere):
    with pytest.raises(UmbilicPoint):
        cs.adapted_frame_f3(sphere, 1.0, 1.0)


@pytest.mark.parametrize("seed", range(5))
def test_umbilics_and_curvature_lines_are_moebius_invariant(seed, sphere):
    g = random_group_element(Geometry.MOEBIUS3, seed)
    E = ellipsoid()
    U, V = E.grid(24)
    for S in (E, sphere):
        moved = cs.moebius_image_surface(S, g)
        r0 = cs.willmore_density_and_energy(S, (24, 24), gauss_area=False)
        r1 = cs.willmore_density_and_energy(moved, (24, 24), gauss_area=False)
        assert np.array_equal(r0.umbilic, r1.umbilic)
    a = cs.curvature_line_directions(E, U, V)
    b = cs.curvature_line_directions(cs.moebius_image_surface(E, g), U, V)

    def gap(x, y):
        return np.abs(np.mod(x - y + np.pi / 2, np.pi) - np.pi / 2)

    err = np.minimum(np.maximum(gap(a[0], b[0]), gap(a[1], b[1])),
                     np.maximum(gap(a[0], b[1]), gap(a[1], b[0])))
    assert np.max(err) <= 1e-4
