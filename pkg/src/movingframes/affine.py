"""
Equi-affine invariants of plane curves.

The lift is built in three adaptations on jets of the curve:

1. tangent frames ``e1 = gamma'``, ``e2 = J gamma' / |gamma'|^2`` (unit area),
   on which the relative invariant ``u = phi21 / omega1`` is measured;
2. rescaling ``e1 -> a e1``, ``e2 -> e2 / a`` with ``a = u^(-1/3)`` so that
   ``u = 1``;
3. shearing ``e2 -> e2 + v e1`` with ``v = phi11 / omega1`` so that
   ``phi11 = 0``.

The result is ``e1 = gamma_s``, ``e2 = gamma_ss`` in affine arclength ``s``.
"""

import enum
import warnings
from dataclasses import dataclass

import numpy as np

from . import jets
from ._intervals import merge_intervals, sign_change_roots
from .curves import Density, jets_in_arclength
from .errors import InflectionPoint
from .groups import Geometry, GroupElement

INFLECTION_TOL = 1e-8
CONSISTENCY_TOL = 1e-6
GUARD = 1e-2
CONSTANCY_TOL = 1e-5


def _det(a, b):
    """Determinant of two plane vectors (arrays or vector jets)."""
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _rot90(e):
    return jets.Jet.stack([-e[..., 1], e[..., 0]])


def _affine_density(g):
    d1 = g.derivative()
    return jets.cbrt(_det(d1, d1.derivative()))


AFFINE_DENSITY = Density(_affine_density, 2, "equiaffine")


def affine_arclength_density(j):
    """Signed cube root of ``det(gamma', gamma'')``; positive when bending counterclockwise."""
    d = j.d
    return np.cbrt(_det(d[1], d[2]))


def _is_inflectional(d1, d2):
    scale = np.hypot(d1[..., 0], d1[..., 1]) * np.hypot(d2[..., 0], d2[..., 1])
    return np.abs(_det(d1, d2)) <= INFLECTION_TOL * scale


def _check_point(c, t):
    d = c.jet(t, 2).d
    bad = _is_inflectional(d[1], d[2])
    if np.any(bad):
        where = np.atleast_1d(np.asarray(t, dtype=float) * np.ones(bad.shape))[np.atleast_1d(bad)]
        raise InflectionPoint("curve is inflectional (det(gamma', gamma'') vanishes)", list(where))


def detect_inflections(c, n=2048, guard=GUARD):
    """Parameter intervals where ``|det(gamma', gamma'')|`` falls below tolerance.

    The tolerance is ``1e-8`` times the largest sampled ``|det|``.  Isolated
    sign changes between samples are located with Brent's method; every
    flagged parameter is padded by ``guard`` and overlapping pads merged.
    """
    t = c.sample_parameters(n)

    def det_at(x):
        d = c.jet(x, 2).d
        return _det(d[1], d[2])

    det = det_at(t)
    tol = INFLECTION_TOL * np.max(np.abs(det))
    flagged = list(t[np.abs(det) <= tol])
    tt, dd = t, det
    if c.periodic:
        tt = np.append(t, c.domain[1])
        dd = np.append(det, det[0])
    flagged += sign_change_roots(lambda x: float(det_at(np.asarray(x))), tt, dd)
    return merge_intervals(flagged, guard, c.usable_domain(), c.periodic)


@dataclass(frozen=True)
class AffineAdaptState:
    """``u`` of the tangent frame and ``v`` of the rescaled frame."""

    u: np.ndarray
    v: np.ndarray


@dataclass(frozen=True)
class AffineFrame:
    basepoint: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    a_scale: np.ndarray
    b_shear: np.ndarray
    state: AffineAdaptState

    @property
    def det(self):
        return _det(self.e1, self.e2)

    def matrix(self):
        m = np.eye(3)
        m[1:, 0] = self.basepoint
        m[1:, 1] = self.e1
        m[1:, 2] = self.e2
        return m

    def group_element(self):
        return GroupElement(Geometry.EQUIAFFINE2, self.matrix())


@dataclass(frozen=True)
class _Forms:
    omega1: jets.Jet
    omega2: jets.Jet
    phi11: jets.Jet
    phi21: jets.Jet


def _forms(b, e1, e2):
    """Coefficients of ``db`` and ``de1`` in the frame, on d/dt."""
    db, de1 = b.derivative(), e1.derivative()
    area = _det(e1, e2)
    return _Forms(_det(db, e2) / area, _det(e1, db) / area,
                  _det(de1, e2) / area, _det(e1, de1) / area)


def _tangent_frame(g, scale=1.0):
    d1 = g.derivative()
    e1 = d1 * scale
    e2 = _rot90(d1) / (d1 * d1).sum()[..., None] / scale
    return e1, e2


def relative_invariant(c, t, scale=1.0):
    """``u = phi21 / omega1`` on the tangent frame ``(scale gamma', J gamma' / (scale |gamma'|^2))``.

    Rescaling the tangent vector by ``a`` multiplies ``u`` by ``a^3``.
    """
    g = c.jet(t, 3)
    e1, e2 = _tangent_frame(g, scale)
    f = _forms(g, e1, e2)
    return (f.phi21 / f.omega1).value


def affine_frame_lift(c, t):
    """The unique equi-affine frame at ``c(t)``: ``e1 = gamma_s``, ``e2 = gamma_ss``.

    Raises:
        InflectionPoint: if ``det(gamma', gamma'')`` vanishes at ``t``.
    """
    _check_point(c, t)
    g = c.jet(t, 4)
    # tangent frames: measure u
    e1, e2 = _tangent_frame(g)
    f = _forms(g, e1, e2)
    u = f.phi21 / f.omega1
    # rescale so that u = 1
    a = 1.0 / jets.cbrt(u)
    e1 = e1.truncate(a.order) * a[..., None]
    e2 = e2.truncate(a.order) / a[..., None]
    f = _forms(g, e1, e2)
    v = f.phi11 / f.omega1
    # shear so that phi11 = 0
    e2 = e2.truncate(v.order) + e1.truncate(v.order) * v[..., None]
    return AffineFrame(g.value, e1.value, e2.value, a.value, v.value,
                       AffineAdaptState(u.value, v.value))


def arclength_jet(c, t, order=3):
    """Jet of the curve with respect to affine arclength at ``c(t)``."""
    return jets_in_arclength(c.jet(t, order + 1), AFFINE_DENSITY, order)


def affine_curvature(c, t):
    """Affine curvature: the scalar with ``gamma_sss = -kappa gamma_s``.

    Solved in least squares over both components; a relative discrepancy
    above ``1e-6`` triggers a :class:`RuntimeWarning`.
    """
    _check_point(c, t)
    d = arclength_jet(c, t, 3).d
    gs, gsss = d[1], d[3]
    kappa = -np.sum(gsss * gs, axis=-1) / np.sum(gs * gs, axis=-1)
    resid = np.linalg.norm(gsss + kappa[..., None] * gs, axis=-1)
    scale = np.maximum(np.linalg.norm(gsss, axis=-1), np.finfo(float).tiny)
    if np.any(resid > CONSISTENCY_TOL * np.maximum(scale, 1.0)):
        warnings.warn(f"gamma_sss is not parallel to gamma_s (residual {resid.max():.3g})",
                      RuntimeWarning, stacklevel=2)
    return kappa


class ConicType(str, enum.Enum):
    PARABOLA = "Parabola"
    ELLIPSE = "Ellipse"
    HYPERBOLA = "Hyperbola"
    NOT_CONSTANT = "NotConstantCurvature"


def classify_conic(c, n=64):
    """Classify a curve by the sign of its (constant) affine curvature."""
    flagged = detect_inflections(c)
    if flagged:
        raise InflectionPoint("curve has inflection points", flagged)
    t = c.sample_parameters(n, margin=0.0)
    kappa = affine_curvature(c, t)
    mean = float(np.mean(kappa))
    if np.ptp(kappa) > CONSTANCY_TOL * (1.0 + abs(mean)):
        return ConicType.NOT_CONSTANT
    if abs(mean) <= CONSTANCY_TOL:
        return ConicType.PARABOLA
    return ConicType.ELLIPSE if mean > 0 else ConicType.HYPERBOLA
