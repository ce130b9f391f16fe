"""
Conformal geometry of surfaces in S^3.

Surfaces are lifted to the null cone like curves.  At each point the first
adapted frame has ``e0 = Z``, ``e1, e2`` spanning the lifted tangent plane
(Minkowski Gram-Schmidt on ``Z_u, Z_v``), ``e4`` the null completion and
``e3`` the unit normal.  With the coframe ``omega^i = <dZ, e_i>`` the
normal components of ``de_1, de_2`` are

    omega^3_1 = a omega^1 + b omega^2,   omega^3_2 = b omega^1 + c omega^2,

and the Willmore 2-form is ``(b^2 + (a - c)^2 / 4) omega^1 ^ omega^2``.
Moving ``e3`` by ``H e0`` with ``H = (a + c) / 2`` makes the shape matrix
trace free; the resulting ``e3`` is the conformal Gauss map.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .conformal_curves import _cofactor_completion, moebius_jet_map, null_lift_jet
from .errors import ConditioningWarning, IrregularPoint, UmbilicPoint
from .groups import GRAM, frame_residual, project_sphere
from .surfaces import MappedSurface

REGULAR_TOL = 1e-10
UMBILIC_REL = 1e-10
F3_UMBILIC_REL = 1e-8
CONDITION_LIMIT = 1e8
FD_STEP = 1e-5


def _ip(a, b):
    return np.einsum("...i,ij,...j->...", a, GRAM, b)


@dataclass(frozen=True)
class SurfaceFrameF1:
    """First-order frames (columns of ``matrix``) and coframe values.

    ``coframe[..., i, k]`` is ``omega^(i+1)`` evaluated on the k-th parameter
    direction; ``omega3`` holds ``omega^3`` on the two directions (zero up to
    rounding).
    """

    matrix: np.ndarray
    coframe: np.ndarray
    omega3: np.ndarray
    second: np.ndarray

    @property
    def residual(self):
        return frame_residual(self.matrix)


def _lifted_partials(S, u, v, order=2):
    return S.partials(u, v, order, fn=null_lift_jet)


def _frame_from_partials(P):
    Z, Zu, Zv = P[(0, 0)], P[(1, 0)], P[(0, 1)]
    nu2 = _ip(Zu, Zu)
    nv2 = _ip(Zv, Zv)
    e1 = Zu / np.sqrt(nu2)[..., None]
    w = Zv - _ip(Zv, e1)[..., None] * e1
    w2 = _ip(w, w)
    if np.any(w2 <= REGULAR_TOL * nv2) or np.any(nu2 <= 0):
        raise IrregularPoint("parametrization is not an immersion here")
    e2 = w / np.sqrt(w2)[..., None]
    h = -(Z @ GRAM.T) / np.sum(Z * Z, axis=-1)[..., None]
    h = h - _ip(h, e1)[..., None] * e1 - _ip(h, e2)[..., None] * e2
    e4 = h + 0.5 * _ip(h, h)[..., None] * Z
    e3 = _cofactor_completion(Z, e1, e2, e4)
    F = np.stack([Z, e1, e2, e3, e4], axis=-1)
    coframe = np.stack([np.stack([_ip(Zu, e), _ip(Zv, e)], axis=-1) for e in (e1, e2)], axis=-2)
    omega3 = np.stack([_ip(Zu, e3), _ip(Zv, e3)], axis=-1)
    second = np.empty(Z.shape[:-1] + (2, 2))
    second[..., 0, 0] = _ip(P[(2, 0)], e3)
    second[..., 0, 1] = second[..., 1, 0] = _ip(P[(1, 1)], e3)
    second[..., 1, 1] = _ip(P[(0, 2)], e3)
    return SurfaceFrameF1(F, coframe, omega3, second)


def surface_frame_f1(S, u, v):
    """First adapted frame at ``S(u, v)``.

    Raises:
        IrregularPoint: if ``S_u, S_v`` are dependent.
    """
    return _frame_from_partials(_lifted_partials(S, u, v))


@dataclass(frozen=True)
class ShapeCoefficients:
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    residual: np.ndarray

    @property
    def density(self):
        """Willmore density ``b^2 + (a - c)^2 / 4`` per ``omega^1 ^ omega^2``."""
        return self.b**2 + 0.25 * (self.a - self.c) ** 2

    @property
    def mean(self):
        return 0.5 * (self.a + self.c)

    @property
    def matrix(self):
        return np.stack([np.stack([self.a, self.b], -1), np.stack([self.b, self.c], -1)], -2)


def _shape_from_frame(fr):
    """Least-squares ``(a, b, c)`` from the four normal components of ``de_1, de_2``."""
    M = fr.coframe
    cond = np.linalg.cond(M)
    if np.any(cond > CONDITION_LIMIT):
        warnings.warn(f"coframe condition number {np.max(cond):.3g}", ConditioningWarning,
                      stacklevel=3)
    # omega^3_i on direction k: e_i = sum_b N[i, b] Z_b + (multiple of Z), N = M^-T
    N = np.linalg.inv(np.swapaxes(M, -1, -2))
    rhs = N @ fr.second  # rhs[i, k] = omega^3_i(d_k)
    zero = np.zeros(M.shape[:-2])
    rows = []
    for k in range(2):
        m1, m2 = M[..., 0, k], M[..., 1, k]
        rows.append(np.stack([m1, m2, zero], -1))  # omega^3_1 = a w1 + b w2
        rows.append(np.stack([zero, m1, m2], -1))  # omega^3_2 = b w1 + c w2
    A = np.stack(rows, -2)
    y = np.stack([rhs[..., 0, 0], rhs[..., 1, 0], rhs[..., 0, 1], rhs[..., 1, 1]], -1)
    sol = (np.linalg.pinv(A) @ y[..., None])[..., 0]
    resid = np.linalg.norm((A @ sol[..., None])[..., 0] - y, axis=-1)
    return ShapeCoefficients(sol[..., 0], sol[..., 1], sol[..., 2], resid)


def shape_coefficients(S, u, v):
    """Shape coefficients ``(a, b, c)`` in the first adapted frame."""
    return _shape_from_frame(surface_frame_f1(S, u, v))


def third_fundamental_form(sc):
    """Coefficients of ``b (w1)^2 - b (w2)^2 + (c - a) w1 w2``."""
    return sc.b, -sc.b, sc.c - sc.a


def _principal_angle(sc):
    """Angle (in the ``e1, e2`` plane) that diagonalizes the shape matrix."""
    return 0.5 * np.arctan2(2.0 * sc.b, sc.a - sc.c)


def null_directions(sc):
    """Null directions of the third fundamental form as angles in the ``(w1, w2)`` plane.

    Returns two angles modulo pi; NaN where the form vanishes identically.
    """
    phi = _principal_angle(sc)
    zero = sc.density == 0
    phi = np.where(zero, np.nan, phi)
    return np.mod(phi, np.pi), np.mod(phi + 0.5 * np.pi, np.pi)


def curvature_line_directions(S, u, v):
    """Curvature-line directions as parameter-space angles ``atan2(dv, du)`` modulo pi."""
    fr = surface_frame_f1(S, u, v)
    sc = _shape_from_frame(fr)
    out = []
    for ang in null_directions(sc):
        xy = np.stack([np.cos(ang), np.sin(ang)], -1)
        duv = np.linalg.solve(fr.coframe, np.nan_to_num(xy)[..., None])[..., 0]
        a = np.mod(np.arctan2(duv[..., 1], duv[..., 0]), np.pi)
        out.append(np.where(np.isnan(ang), np.nan, a))
    return tuple(out)


# -- second adaptation: conformal Gauss map ------------------------------------------


def _trace_normalize(fr, sc):
    H = sc.mean[..., None]
    e0, e3, e4 = fr.matrix[..., 0], fr.matrix[..., 3], fr.matrix[..., 4]
    F = fr.matrix.copy()
    F[..., 3] = e3 + H * e0
    F[..., 4] = e4 + H * e3 + 0.5 * H**2 * e0
    return F


def conformal_gauss_map(S, u, v):
    """Central sphere at ``S(u, v)`` as a unit spacelike vector (``<G, G> = 1``)."""
    fr = surface_frame_f1(S, u, v)
    return _trace_normalize(fr, _shape_from_frame(fr))[..., 3]


def _gauss_derivatives(S, u, v, h=FD_STEP):
    """Partials of the Gauss map by three-point differences.

    Stencils are shifted inward near the edges of non-periodic axes; the
    derivative at the original point comes from the interpolating quadratic.
    """
    u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
    out = []
    for axis in range(2):
        x = (u, v)[axis]
        shift = np.zeros_like(x)
        if not S.periodic[axis]:
            lo, hi = S.usable_domain()[axis]
            shift = np.where(x - h < lo, h, np.where(x + h > hi, -h, 0.0))

        def G(dx):
            return conformal_gauss_map(S, u + dx * (axis == 0), v + dx * (axis == 1))

        gm, g0, gp = G(shift - h), G(shift), G(shift + h)
        first = (gp - gm) / (2 * h)
        second = (gp - 2 * g0 + gm) / h**2
        out.append(first - shift[..., None] * second)
    return out[0], out[1]


# -- Willmore energy -------------------------------------------------------------------------


def _quadrature_weights(surface, U, V):
    weights = []
    for axis, per in enumerate(surface.periodic):
        x = (U[:, 0] if axis == 0 else V[0, :])
        if per:
            lo, hi = surface.usable_domain()[axis]
            weights.append(np.full(x.size, (hi - lo) / x.size))
        else:
            weights.append(simpson(np.eye(x.size), x=x, axis=-1))
    return np.outer(weights[0], weights[1])


@dataclass(frozen=True)
class WillmoreReport:
    """Willmore density on a parameter grid with its integrals."""

    U: np.ndarray
    V: np.ndarray
    density: np.ndarray
    area_element: np.ndarray
    weights: np.ndarray
    energy: float
    gauss_area: float
    umbilic: np.ndarray

    @property
    def density_per_parameter_area(self):
        return self.density * self.area_element


def willmore_density_and_energy(S, grid=(64, 64), gauss_area=True):
    """Willmore density, energy and Gauss-image area on an ``n x m`` grid.

    Periodic axes use the trapezoid rule on the half-open grid, others
    Simpson's rule.  A sample is umbilic where its density per parameter area
    is below ``1e-10`` of the grid maximum (with an absolute floor of
    ``1e-10`` so that totally umbilic surfaces are flagged everywhere).
    """
    n, m = (grid, grid) if np.isscalar(grid) else grid
    U, V = S.grid(n, m)
    fr = surface_frame_f1(S, U, V)
    sc = _shape_from_frame(fr)
    area = np.abs(np.linalg.det(fr.coframe))
    dens = sc.density
    w = _quadrature_weights(S, U, V)
    per_param = dens * area
    umbilic = per_param < UMBILIC_REL * max(np.max(per_param), 1.0)
    energy = float(np.sum(per_param * w))
    g_area = float("nan")
    if gauss_area:
        Gu, Gv = _gauss_derivatives(S, U, V)
        g = _ip(Gu, Gu) * _ip(Gv, Gv) - _ip(Gu, Gv) ** 2
        g_area = float(np.sum(np.sqrt(np.maximum(g, 0.0)) * w))
    return WillmoreReport(U, V, dens, area, w, energy, g_area, umbilic)


# -- third adaptation and the dual surface ----------------------------------------------------


@dataclass(frozen=True)
class AdaptedFrameF3:
    """Fully adapted frame, its shape matrix (diag(1, -1)) and the dual point."""

    matrix: np.ndarray
    shape: np.ndarray
    rotated_b: np.ndarray
    dual_null: np.ndarray
    dual_point: np.ndarray


def adapted_frame_f3(S, u, v, umbilic_threshold=None, h=FD_STEP):
    """Umbilic-free adapted frame with ``b = 0``, ``omega^0_3 = 0`` and ``Omega = w1 ^ w2``.

    Args:
        S: surface provider.
        u, v: parameters.
        umbilic_threshold: density below which a point counts as umbilic;
            by default ``1e-8 * max(1, H^2)``.
        h: step of the central differences of the Gauss map.

    Returns:
        :class:`AdaptedFrameF3`; ``dual_point`` is the S^3 point of ``e4``.

    Raises:
        UmbilicPoint: at umbilic samples.
    """
    u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
    fr = surface_frame_f1(S, u, v)
    sc = _shape_from_frame(fr)
    dens = sc.density
    limit = F3_UMBILIC_REL * np.maximum(1.0, sc.mean**2) if umbilic_threshold is None \
        else umbilic_threshold
    bad = dens < limit
    if np.any(bad):
        raise UmbilicPoint("umbilic point: the third fundamental form vanishes",
                           list(zip(u[bad], v[bad])))
    F = _trace_normalize(fr, sc)
    S2 = sc.matrix - sc.mean[..., None, None] * np.eye(2)
    # rotate e1, e2 to diagonalize the shape matrix
    phi = _principal_angle(sc)
    cs, sn = np.cos(phi), np.sin(phi)
    R = np.stack([np.stack([cs, sn], -1), np.stack([-sn, cs], -1)], -2)
    e1 = cs[..., None] * F[..., 1] + sn[..., None] * F[..., 2]
    e2 = -sn[..., None] * F[..., 1] + cs[..., None] * F[..., 2]
    M = R @ fr.coframe
    Sr = R @ S2 @ np.swapaxes(R, -1, -2)
    mu = np.sqrt(dens)
    # scale so that Omega = w1 ^ w2
    e0 = mu[..., None] * F[..., 0]
    e4 = F[..., 4] / mu[..., None]
    M = mu[..., None, None] * M
    Sn = Sr / mu[..., None, None]
    # null rotation killing omega^0_3 = -<de3, e4>
    Gu, Gv = _gauss_derivatives(S, u, v, h)
    w03 = -np.stack([_ip(Gu, e4), _ip(Gv, e4)], -1)
    pq = np.linalg.solve(np.swapaxes(M, -1, -2), w03[..., None])
    t = -np.linalg.solve(Sn, pq)[..., 0]
    t1, t2 = t[..., :1], t[..., 1:]
    e1n = e1 + t1 * e0
    e2n = e2 + t2 * e0
    e4n = e4 + t1 * e1 + t2 * e2 + 0.5 * (t1**2 + t2**2) * e0
    matrix = np.stack([e0, e1n, e2n, F[..., 3], e4n], -1)
    return AdaptedFrameF3(matrix, Sn, Sr[..., 0, 1], e4n, project_sphere(e4n))


def dual_surface_points(S, n, m=None):
    """Dual surface sampled on the parameter grid of ``S``."""
    U, V = S.grid(n, n if m is None else m)
    return U, V, adapted_frame_f3(S, U, V).dual_point


def moebius_image_surface(S, g):
    """The S^3 surface ``g . S``."""
    return MappedSurface(S, moebius_jet_map(g), 4)


# -- classical oracle ---------------------------------------------------------------------


def euclidean_willmore_s3(S, grid=(64, 64)):
    """``int (H^2 + 1) dA`` of a surface in S^3 from its classical fundamental forms.

    Works directly with the R^4 position vector; for R^3 surfaces pass them
    through inverse stereographic projection first.
    """
    n, m = (grid, grid) if np.isscalar(grid) else grid
    U, V = S.grid(n, m)
    P = S.partials(U, V, 2)
    X, Xu, Xv = P[(0, 0)], P[(1, 0)], P[(0, 1)]
    # unit normal within S^3: orthogonal to X, Xu, Xv
    B = np.stack([X, Xu, Xv], -2)
    _, _, vt = np.linalg.svd(B)
    N = vt[..., -1, :]
    E, Fm, G = (np.sum(Xu * Xu, -1), np.sum(Xu * Xv, -1), np.sum(Xv * Xv, -1))
    L, Mm, Nn = (np.sum(P[(2, 0)] * N, -1), np.sum(P[(1, 1)] * N, -1), np.sum(P[(0, 2)] * N, -1))
    det = E * G - Fm**2
    H = 0.5 * (E * Nn - 2 * Fm * Mm + G * L) / det
    w = _quadrature_weights(S, U, V)
    return float(np.sum((H**2 + 1.0) * np.sqrt(det) * w))
