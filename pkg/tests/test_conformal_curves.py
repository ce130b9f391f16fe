import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from movingframes import conformal_curves as cc
from movingframes import euclidean
from movingframes.curves import AnalyticCurve, MappedCurve, ReparamTable, sample_curve
from movingframes.errors import CircleDegeneracy
from movingframes.groups import (Geometry, act, frame_residual, frame_violations, null_lift,
                                 project_sphere, random_group_element)
from movingframes.jets import Jet

from .conftest import spherical_curve

TWO_PI = 2 * np.pi
ELLIPSE3 = AnalyticCurve(["2*cos(t)", "sin(t)", "0"], domain=(0.0, TWO_PI), periodic=True)
CIRCLE3 = AnalyticCurve(["cos(t)", "sin(t)", "0"], domain=(0.0, TWO_PI), periodic=True)
SPIRAL = AnalyticCurve(["exp(0.2*t)*cos(t)", "exp(0.2*t)*sin(t)", "0"], domain=(0.0, 6.0))


def test_null_lift_of_points_is_null(twisted_cubic):
    Z = cc.null_lift_jet(twisted_cubic.jet(np.linspace(0.6, 1.4, 9), 3))
    np.testing.assert_allclose(Z.value, null_lift(twisted_cubic.points(np.linspace(0.6, 1.4, 9))))
    norm = cc._ip(Z, Z)
    assert np.max(np.abs(norm.coef)) <= 1e-12


def test_frames_satisfy_relations(twisted_cubic):
    t = np.linspace(0.5, 1.5, 64)
    fr = cc.conformal_adapted_frame(twisted_cubic, t)
    assert fr.residual.max() <= 1e-8
    assert frame_violations(fr.matrix[10]) == []


def test_frenet_equations(twisted_cubic):
    res = cc.frenet_residuals(twisted_cubic, np.linspace(0.6, 1.4, 50))
    assert res.max() <= 1e-5


def test_latitude_circle_is_degenerate():
    lat = AnalyticCurve(["0.6*cos(t)", "0.6*sin(t)", "0.8", "0"], domain=(0.0, TWO_PI),
                        periodic=True)
    with pytest.raises(CircleDegeneracy):
        cc.conformal_adapted_frame(lat, 1.0)


def test_density_examples():
    t = np.linspace(0.0, 6.0, 40)
    rho = cc.conformal_arclength_density(SPIRAL, t)
    assert rho.min() > 0 and np.ptp(np.log(rho)) < 2.0
    assert np.max(cc.conformal_arclength_density(CIRCLE3, t)) <= 1e-6
    # ellipse density vanishes at the vertices t = k pi / 2
    vertices = np.arange(4) * np.pi / 2
    assert np.max(cc.conformal_arclength_density(ELLIPSE3, vertices)) <= 1e-6


def test_density_matches_planar_oracle():
    plane = AnalyticCurve(["2*cos(t)", "sin(t)"], domain=(0.0, TWO_PI), periodic=True)
    t = np.linspace(0.3, 1.2, 7)
    np.testing.assert_allclose(cc.conformal_arclength_density(plane, t),
                               cc.planar_density_oracle(plane, t), rtol=1e-10)


def test_degeneracy_detection(twisted_cubic):
    assert cc.detect_circle_degeneracy(CIRCLE3) == [(0.0, TWO_PI)]
    bad = cc.detect_circle_degeneracy(ELLIPSE3)
    assert len(bad) == 4
    centres = sorted(0.5 * (a + b) for a, b in bad)
    np.testing.assert_allclose(centres, np.arange(4) * np.pi / 2, atol=1e-6)
    assert cc.detect_circle_degeneracy(twisted_cubic) == []


def test_spherical_curve_has_zero_torsion():
    inv = cc.conformal_kappa_tau(spherical_curve(), n=256)
    assert np.max(np.abs(inv.tau)) <= 1e-5


def test_twisted_cubic_is_not_spherical(twisted_cubic):
    inv = cc.conformal_kappa_tau(twisted_cubic, n=256)
    assert np.max(np.abs(inv.tau)) >= 1e-2


def test_log_spiral_invariants_constant():
    fr = cc.conformal_adapted_frame(SPIRAL, np.linspace(0.0, 6.0, 40))
    assert np.ptp(fr.kappa) <= 1e-4 and np.ptp(fr.tau) <= 1e-4
    assert np.max(np.abs(fr.tau)) <= 1e-8


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31))
def test_moebius_invariance(seed):
    c = AnalyticCurve(["t", "t^2", "t^3"], domain=(0.5, 1.5))
    g = random_group_element(Geometry.MOEBIUS3, seed)
    t = np.linspace(0.6, 1.4, 9)
    f1 = cc.conformal_adapted_frame(c, t)
    f2 = cc.conformal_adapted_frame(cc.moebius_image(c, g), t)
    np.testing.assert_allclose(f2.kappa, f1.kappa, atol=1e-5)
    np.testing.assert_allclose(np.abs(f2.tau), np.abs(f1.tau), atol=1e-5)
    np.testing.assert_allclose(f2.density, f1.density, rtol=1e-8)


def test_sampled_curve_invariants(twisted_cubic):
    # fifth derivatives from 7-point stencils: roundoff grows like h^-5, so
    # a moderate grid is the accurate one
    sampled = sample_curve(twisted_cubic, 101)
    t = np.linspace(0.7, 1.3, 7)
    f1 = cc.conformal_adapted_frame(twisted_cubic, t)
    f2 = cc.conformal_adapted_frame(sampled, t)
    np.testing.assert_allclose(f2.kappa, f1.kappa, atol=1e-5)
    np.testing.assert_allclose(f2.tau, f1.tau, atol=1e-5)


@pytest.fixture(scope="module")
def round_trip():
    c = AnalyticCurve(["t", "t^2", "t^3"], domain=(0.5, 1.5))
    inv = cc.conformal_kappa_tau(c, n=512)
    rec = cc.frenet_reconstruct(inv, cc.conformal_adapted_frame(c, inv.t[0]))
    return c, inv, rec


def test_reconstruction_round_trip(round_trip):
    c, inv, rec = round_trip
    again = cc.conformal_adapted_frame(rec, inv.s)
    assert np.sqrt(np.mean((again.kappa - inv.kappa) ** 2)) <= 1e-4
    assert np.sqrt(np.mean((again.tau - inv.tau) ** 2)) <= 1e-4
    # the reconstructed points are the original curve, node by node
    np.testing.assert_allclose(rec.points(inv.s), project_sphere(null_lift(c.points(inv.t))),
                               atol=1e-8)


def test_reconstruction_between_nodes(round_trip):
    c, inv, rec = round_trip
    table = ReparamTable(c, cc.CONFORMAL_DENSITY)
    s = 0.5 * (inv.s[1:] + inv.s[:-1])
    want = project_sphere(null_lift(c.points(table.t_of_s(s))))
    np.testing.assert_allclose(rec.points(s), want, atol=1e-6)


def test_reconstruction_is_left_equivariant(round_trip):
    c, inv, rec = round_trip
    g = random_group_element(Geometry.MOEBIUS3, 11)
    F0 = g.matrix @ cc.conformal_adapted_frame(c, inv.t[0]).matrix
    moved = cc.frenet_reconstruct(inv, F0)
    np.testing.assert_allclose(moved.values, act(g, rec.values), atol=1e-6)


def test_zero_invariants_give_log_spiral():
    s = np.linspace(0.0, 4.0, 64)
    inv = cc.ConformalInvariants(s, s, np.zeros(64), np.zeros(64))
    rec = cc.frenet_reconstruct(inv, cc.spiral_frame(), n_out=256)
    y = cc.stereographic_image(rec)
    assert np.max(np.abs(y.points(rec.s)[:, 2])) <= 1e-10
    plane = MappedCurve(y, lambda j: Jet.stack([j[..., 0], j[..., 1]]), 2)
    ratio = euclidean.log_spiral_invariant(plane, np.linspace(0.1, 3.9, 50))
    assert np.ptp(ratio) <= 1e-3


def test_reorthonormalize_repairs_drift():
    F = cc.spiral_frame() + 1e-6 * np.random.default_rng(0).normal(size=(5, 5))
    assert frame_residual(F) > 1e-7
    assert frame_residual(cc.reorthonormalize(F)) <= 1e-12
