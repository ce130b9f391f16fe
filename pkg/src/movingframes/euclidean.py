"""
Euclidean invariants of plane curves: curvature, arclength and the
orthonormal frame lift ``(b, e1, e2)`` with ``e1`` tangent.

Along the lift the canonical and connection forms pull back to
``omega1 = ds``, ``omega2 = 0``, ``phi21 = kappa ds``; :func:`frame_pullbacks`
measures those pullbacks numerically.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import jets
from .curves import EUCLIDEAN_DENSITY  # noqa: F401  (re-exported)
from .errors import IrregularPoint
from .groups import Geometry, GroupElement
from .expr import eval_jet, parse

REGULAR_TOL = 1e-10


def _cross(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _speed(d1):
    speed = np.hypot(d1[..., 0], d1[..., 1])
    if np.any(speed <= REGULAR_TOL):
        raise IrregularPoint("curve is not regular (|gamma'| vanishes)")
    return speed


def euclidean_curvature(j):
    """Signed curvature ``det(g', g'') / |g'|^3`` from a jet of order >= 2."""
    d = j.d
    return _cross(d[1], d[2]) / _speed(d[1]) ** 3


def euclidean_arclength_density(j):
    """``|g'(t)|``."""
    d1 = j.d[1]
    return np.hypot(d1[..., 0], d1[..., 1])


@dataclass(frozen=True)
class EuclideanFrame:
    basepoint: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    theta: np.ndarray

    def matrix(self):
        """3x3 block matrix ``[[1, 0], [b, (e1 e2)]]`` (unbatched frames only)."""
        m = np.eye(3)
        m[1:, 0] = self.basepoint
        m[1:, 1] = self.e1
        m[1:, 2] = self.e2
        return m

    def group_element(self):
        return GroupElement(Geometry.EUCLIDEAN2, self.matrix())


def euclidean_frame_lift(c, t):
    """Orthonormal frame with ``e1`` the unit tangent at ``c(t)``."""
    d = c.jet(t, 1).d
    e1 = d[1] / _speed(d[1])[..., None]
    e2 = np.stack([-e1[..., 1], e1[..., 0]], axis=-1)
    return EuclideanFrame(d[0], e1, e2, np.arctan2(e1[..., 1], e1[..., 0]))


@dataclass(frozen=True)
class Pullbacks:
    """Pullbacks of (omega1, omega2, phi21) evaluated on d/dt."""

    t: np.ndarray
    omega1: np.ndarray
    omega2: np.ndarray
    phi21: np.ndarray

    @property
    def curvature(self):
        return self.phi21 / self.omega1


def frame_pullbacks(c, t, h=1e-4):
    """Pull back the canonical/connection forms along the lift by central differences."""
    t = np.asarray(t, dtype=float)
    f0 = euclidean_frame_lift(c, t)
    fp = euclidean_frame_lift(c, t + h)
    fm = euclidean_frame_lift(c, t - h)
    db = (fp.basepoint - fm.basepoint) / (2 * h)
    de1 = (fp.e1 - fm.e1) / (2 * h)
    dot = lambda a, b: np.sum(a * b, axis=-1)  # noqa: E731
    return Pullbacks(t, dot(db, f0.e1), dot(db, f0.e2), dot(de1, f0.e2))


def curvature_along(c, t):
    return euclidean_curvature(c.jet(t, 2))


def log_spiral_invariant(c, t):
    """``(d kappa / d sigma) / kappa^2``, constant exactly on logarithmic spirals."""
    g = c.jet(t, 3)
    d1 = g.derivative()
    d2 = d1.derivative()
    speed2 = (d1 * d1).sum()
    speed = jets.sqrt(speed2)
    kappa = (d1[..., 0] * d2[..., 1] - d1[..., 1] * d2[..., 0]) / (speed * speed2)
    dk = kappa.derivative().value / speed.value
    return dk / kappa.value**2


# -- graph-form presentation ---------------------------------------------------------


def graph_frame_path(f_source, variable="x"):
    """Moving frame ``x -> g(x)`` of the graph ``(x, f(x))`` as a path in ASO(2).

    ``b = (x, f(x))`` and ``A`` is rotation by ``arctan f'(x)``.
    """
    ast = parse(f_source, [variable])

    def path(x):
        d = eval_jet(ast, {variable: x}, 1).d
        theta = np.arctan(d[1])
        c, s = np.cos(theta), np.sin(theta)
        return GroupElement(Geometry.EUCLIDEAN2, [[1, 0, 0], [x, c, -s], [d[0], s, c]])

    return path


def graph_curvature(f_source, x, variable="x"):
    """``f'' / (1 + f'^2)^(3/2)`` evaluated through jets."""
    d = eval_jet(parse(f_source, [variable]), {variable: x}, 2).d
    return d[2] / (1.0 + d[1] ** 2) ** 1.5


def taylor_normalized_curvature(c, t0, h=1e-3):
    """Curvature by normalizing the curve's Taylor expansion, brute force.

    Translates ``c(t0)`` to the origin, rotates the tangent onto the positive
    x-axis, and reads off the second derivative of the resulting graph with a
    central difference in the new abscissa, Richardson-extrapolated over the
    steps ``h`` and ``h / 2``.  Uses point evaluations only.
    """
    pts = c.points
    base = pts(np.array(t0))
    dt = 1e-6
    tangent = (pts(np.array(t0 + dt)) - pts(np.array(t0 - dt))) / (2 * dt)
    theta = np.arctan2(tangent[1], tangent[0])
    rot = np.array([[np.cos(theta), np.sin(theta)], [-np.sin(theta), np.cos(theta)]])

    def standardized(t):
        return rot @ (pts(np.array(t)) - base)

    def abscissa_at(x):
        # find t with standardized x-coordinate equal to x, near t0
        step = x / max(np.linalg.norm(tangent), 1e-300)
        a, b = (t0, t0 + 4 * step) if step > 0 else (t0 + 4 * step, t0)
        return brentq(lambda t: standardized(t)[0] - x, a, b, xtol=1e-15, rtol=1e-15)

    def second_difference(step):
        return (standardized(abscissa_at(step))[1] + standardized(abscissa_at(-step))[1]) / step**2

    return (4.0 * second_difference(0.5 * h) - second_difference(h)) / 3.0
