"""
Conformal (Moebius) invariants of curves in S^3.

Curves are lifted to the null cone of the form ``<z, z> = z1^2 + z2^2 + z3^2
- 2 z0 z4``; R^3 curves through ``y -> (1, y, |y|^2/2)``, S^3 curves through
the x/z change of model.  Writing ``Z`` for the lift and ``P`` for the part
of ``Z'''`` orthogonal to ``span(Z, Z', Z'')``, the adapted frame is

* ``e0 = lambda Z`` with ``lambda^2 = |P| / |Z'|^3``,
* ``e1 = de0/ds`` with ``ds/dt = (|P| / |Z'|)^(1/2)`` (conformal arclength),
* ``e4 = de1/ds - kappa e0`` with ``kappa = -<de1/ds, de1/ds> / 2``,
* ``e2 = P / |P|`` and ``e3`` completing a frame of determinant one,

and it satisfies the Frenet system

    de0 = e1 ds,  de1 = (kappa e0 + e4) ds,  de2 = (e0 + tau e3) ds,
    de3 = -tau e2 ds,  de4 = (kappa e1 + e2) ds.

Points where ``P`` vanishes are circle-degenerate (the curve has higher
order contact with its osculating circle); the frame does not exist there.
"""

from dataclasses import dataclass
from math import factorial

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline

from . import jets
from ._intervals import contains, merge_intervals, sign_change_roots
from .curves import CurveProvider, Density, MappedCurve, ReparamTable, SampledCurve
from .errors import CircleDegeneracy, IrregularPoint, ToleranceFailure
from .groups import GRAM, frame_residual, project_sphere
from .jets import Jet

SQRT2 = np.sqrt(2.0)
FRAME_ORDER = 5
DENSITY_REL_TOL = 1e-6
# |P| relative to the full third derivative below which P is rounding noise
NOISE_FLOOR = 1e-10
GUARD = 1e-2
DRIFT_TOL = 1e-7


def _ip(a, b):
    return jets.inner_product(a, b, GRAM)


def _times(v, s):
    """Vector jet times scalar jet."""
    return v * s[..., None]


def null_lift_jet(g):
    """Lift a curve jet to the null cone (z-coordinates).

    Accepts planar curves (embedded at height 0), R^3 curves, S^3 curves
    given as unit 4-vectors, and null curves (5 components, returned as is).
    """
    n = g.coef.shape[-1]
    one = np.zeros(g.coef.shape[:-1])
    one[0] = 1.0
    one = Jet(g.t0, one)
    if n == 2:
        g = Jet.stack([g[..., 0], g[..., 1], g[..., 0] * 0.0])
        n = 3
    if n == 3:
        comps = [one, g[..., 0], g[..., 1], g[..., 2], (g * g).sum() * 0.5]
    elif n == 4:
        comps = [(one + g[..., 3]) / SQRT2, g[..., 0], g[..., 1], g[..., 2],
                 (one - g[..., 3]) / SQRT2]
    elif n == 5:
        return g
    else:
        raise ValueError(f"cannot lift curves with {n} components")
    return Jet.stack(comps)


@dataclass
class _Osculating:
    Z: Jet
    v: Jet
    f1: Jet
    f4: Jet
    P: Jet
    PP: Jet
    indicator: np.ndarray


def _osculating(Z):
    """Reference frame (Z, f1, f4) of the osculating circle and the normal part P of Z'''."""
    Zt = Z.derivative()
    Ztt = Zt.derivative()
    Zttt = Ztt.derivative()
    v2 = _ip(Zt, Zt)
    if np.any(v2.value <= 1e-20):
        raise IrregularPoint("curve is not regular (Z' vanishes)")
    v = jets.sqrt(v2)
    f1 = Zt / v[..., None]
    u = Ztt / v2[..., None]
    u = u - _times(f1, _ip(u, f1))
    f4 = u + _times(Z, _ip(u, u) * 0.5)
    a, b, c = _ip(Zttt, f4), _ip(Zttt, f1), _ip(Zttt, Z)
    P = Zttt + _times(Z, a) + _times(f4, c) - _times(f1, b)
    PP = _ip(P, P)
    pp = np.maximum(PP.value, 0.0)
    total = a.value**2 + b.value**2 + c.value**2 + pp
    indicator = np.sqrt(pp / np.maximum(total, np.finfo(float).tiny))
    return _Osculating(Z, v, f1, f4, P, PP, indicator)


def _conformal_density(g):
    o = _osculating(null_lift_jet(g))
    return jets.power(o.PP, 0.25) / jets.sqrt(o.v)


CONFORMAL_DENSITY = Density(_conformal_density, 3, "conformal")


def _density_values(c, t):
    """Conformal arclength density and the degeneracy indicator, tolerant of P = 0."""
    o = _osculating(null_lift_jet(c.jet(t, 3)))
    pp = np.maximum(o.PP.value, 0.0)
    return pp**0.25 / np.sqrt(o.v.value), o.indicator


def conformal_arclength_density(c, t):
    """``ds/dt`` of conformal arclength; zero at circle-degenerate points."""
    return _density_values(c, t)[0]


def _cofactor_completion(e0, e1, e2, e4):
    """Unit vector ``n`` with ``<n, x> = det[e0, e1, e2, x, e4]``."""
    M = np.stack([e0, e1, e2, np.zeros_like(e0), e4], axis=-1)
    cof = np.empty(e0.shape)
    for i in range(5):
        Mi = M.copy()
        Mi[..., i, 3] = 1.0
        cof[..., i] = np.linalg.det(Mi)
    n = cof @ GRAM.T
    norm = np.sqrt(np.einsum("...i,ij,...j->...", n, GRAM, n))
    return n / norm[..., None]


@dataclass(frozen=True)
class ConformalFrame:
    """Adapted frames (columns ``e0..e4`` of ``matrix``) with their invariants."""

    t: np.ndarray
    matrix: np.ndarray
    kappa: np.ndarray
    tau: np.ndarray
    density: np.ndarray
    s: np.ndarray = None

    def e(self, k):
        return self.matrix[..., :, k]

    @property
    def residual(self):
        """Largest violation of the frame relations and of ``det = 1``."""
        return frame_residual(self.matrix)


def _degenerate_params(t, mask):
    return list(np.atleast_1d(np.broadcast_to(t, mask.shape))[np.atleast_1d(mask)])


def conformal_adapted_frame(c, t):
    """The adapted conformal frame at ``c(t)`` (``t`` scalar or array).

    Raises:
        CircleDegeneracy: where the curve is circle-degenerate.
        IrregularPoint: where the curve is singular.
    """
    t = np.asarray(t, dtype=float)
    o = _osculating(null_lift_jet(c.jet(t, FRAME_ORDER)))
    bad = o.indicator < NOISE_FLOOR
    if np.any(bad):
        raise CircleDegeneracy("osculating circle is stationary (conformal arclength vanishes)",
                               _degenerate_params(t, bad))
    rho = jets.power(o.PP, 0.25) / jets.sqrt(o.v)
    lam = jets.power(o.PP, 0.25) / jets.power(o.v, 1.5)
    e0 = _times(o.Z.truncate(lam.order), lam)
    e1 = e0.derivative() / rho.truncate(1)[..., None]
    e1s = e1.derivative() / rho.truncate(0)[..., None]
    kappa = _ip(e1s, e1s) * -0.5
    e4 = e1s - _times(e0.truncate(0), kappa)
    e2 = o.P / jets.sqrt(o.PP)[..., None]
    e3 = _cofactor_completion(e0.value, e1.value, e2.value, e4.value)
    e2s = (e2.derivative() / rho.truncate(1)[..., None]).value
    tau = np.einsum("...i,ij,...j->...", e2s, GRAM, e3)
    matrix = np.stack([e0.value, e1.value, e2.value, e3, e4.value], axis=-1)
    return ConformalFrame(t, matrix, kappa.value, tau, rho.value)


def frenet_matrix(kappa, tau):
    """``A`` with ``dF/ds = F A`` for the conformal Frenet system."""
    kappa, tau = np.broadcast_arrays(np.asarray(kappa, float), np.asarray(tau, float))
    A = np.zeros(kappa.shape + (5, 5))
    A[..., 1, 0] = 1.0
    A[..., 0, 1] = kappa
    A[..., 4, 1] = 1.0
    A[..., 0, 2] = 1.0
    A[..., 3, 2] = tau
    A[..., 2, 3] = -tau
    A[..., 1, 4] = kappa
    A[..., 2, 4] = 1.0
    return A


def frenet_residuals(c, t, h=1e-4):
    """Largest entry of ``dF/ds - F A(kappa, tau)`` at each ``t``.

    ``dF/ds`` is a central difference in ``t`` divided by the conformal
    arclength between the two stencil points (8-point Gauss-Legendre).
    """
    t = np.asarray(t, dtype=float)
    f0 = conformal_adapted_frame(c, t)
    fp = conformal_adapted_frame(c, t + h)
    fm = conformal_adapted_frame(c, t - h)
    x, w = np.polynomial.legendre.leggauss(8)
    nodes = t[..., None] + h * x
    ds = h * (conformal_arclength_density(c, nodes) @ w)
    dF = (fp.matrix - fm.matrix) / ds[..., None, None]
    expected = f0.matrix @ frenet_matrix(f0.kappa, f0.tau)
    return np.max(np.abs(dF - expected), axis=(-1, -2))


# -- degeneracy detection ---------------------------------------------------------


def detect_circle_degeneracy(c, n=1024, guard=GUARD):
    """Parameter intervals on which the curve is circle-degenerate.

    A sample is flagged where the conformal density is below ``1e-6`` of its
    maximum over the samples, or where ``P`` is at the rounding-noise level.
    Isolated zeros of ``P`` between samples (vertices of plane curves) are
    found from sign changes of ``<P(t), P(t_k)>`` and refined by Brent's
    method.  Flagged parameters are padded by ``guard`` and merged.
    """
    t = c.sample_parameters(n)
    rho, indicator = _density_values(c, t)
    flagged = rho < DENSITY_REL_TOL * np.max(rho)
    flagged |= indicator < NOISE_FLOOR
    points = list(t[flagged])

    def P_at(x):
        return _osculating(null_lift_jet(c.jet(x, 3))).P.value

    P = P_at(t)
    tt = t
    if c.periodic:
        tt = np.append(t, c.domain[1])
        P = np.concatenate([P, P[:1]])
    rho_max = np.max(rho)
    for k in range(len(tt) - 1):
        if flagged[k] or flagged[(k + 1) % len(t)]:
            continue
        ref = P[k]
        pair = np.array([ref @ GRAM @ ref, P[k + 1] @ GRAM @ ref])
        roots = sign_change_roots(lambda x: float(P_at(np.asarray(x)) @ GRAM @ ref),
                                  tt[k:k + 2], pair)
        for r in roots:
            if conformal_arclength_density(c, np.asarray(r)) < DENSITY_REL_TOL * rho_max:
                points.append(r)
    return merge_intervals(points, guard, c.usable_domain(), c.periodic)


# -- invariants along a curve ----------------------------------------------------


@dataclass(frozen=True)
class ConformalInvariants:
    """Samples of conformal arclength ``s`` and the invariants ``kappa``, ``tau``."""

    t: np.ndarray
    s: np.ndarray
    kappa: np.ndarray
    tau: np.ndarray
    periodic: bool = False
    length: float = None


def conformal_kappa_tau(c, n=512, t=None, n_intervals=512):
    """Conformal arclength and invariants at ``n`` samples (or at ``t``).

    Raises:
        CircleDegeneracy: if any sample lies in a degenerate interval
            (guard band included); the error lists the intervals.
    """
    bad = detect_circle_degeneracy(c)
    if t is None:
        t = c.sample_parameters(n)
    t = np.asarray(t, dtype=float)
    period = c.period if c.periodic else None
    if bad and np.any(contains(bad, t, period)):
        raise CircleDegeneracy("samples meet circle-degenerate intervals", bad)
    table = ReparamTable(c, CONFORMAL_DENSITY, n_intervals)
    frame = conformal_adapted_frame(c, t)
    return ConformalInvariants(t, table.s_of_t(t), frame.kappa, frame.tau,
                               c.periodic, table.total)


# -- reconstruction -------------------------------------------------------------------


def reorthonormalize(F, iterations=2):
    """Pull an approximate frame back onto the group: ``F <- F (I - E/2)``, ``E = J F^T J F - I``."""
    F = np.array(F, dtype=float)
    eye = np.eye(5)
    for _ in range(iterations):
        E = GRAM @ np.swapaxes(F, -1, -2) @ GRAM @ F - eye
        F = F @ (eye - 0.5 * E)
    return F


def _frenet_taylor(F, kappa_coef, tau_coef, order):
    """Taylor coefficients of the Frenet solution through ``F``.

    ``kappa_coef[m]``, ``tau_coef[m]`` are normalized Taylor coefficients of
    the invariants at the base point.  Returns ``G`` with
    ``F(s0 + d) = sum_j G[j] d^j``, from ``(j + 1) G[j+1] = sum_i G[i] A[j-i]``.
    """
    m = kappa_coef.shape[0]
    A = [frenet_matrix(kappa_coef[i], tau_coef[i]) if i < m else None for i in range(order)]
    for i in range(1, min(m, order)):
        # the constant entries of A belong to the zeroth coefficient only
        A[i][..., 1, 0] = A[i][..., 4, 1] = A[i][..., 0, 2] = A[i][..., 2, 4] = 0.0
    G = [np.asarray(F, dtype=float)]
    for j in range(order):
        acc = np.zeros_like(G[0])
        for i in range(j + 1):
            if A[j - i] is not None:
                acc = acc + G[i] @ A[j - i]
        G.append(acc / (j + 1))
    return np.stack(G)


class ReconstructedCurve(CurveProvider):
    """S^3 curve produced by integrating the Frenet system, parametrized by ``s``.

    Frames are stored at uniform arclength nodes.  Jets at any ``s`` come from
    the Taylor expansion of the Frenet system about the nearest node, using the
    interpolated invariants, so derivatives are not limited by finite
    differences.  :meth:`sampled` returns the node points as a
    :class:`SampledCurve`.
    """

    dim = 4
    max_order = 6
    _SHIFT_ORDER = 14

    def __init__(self, s, frames, kappa_spline, tau_spline):
        self.s = np.asarray(s, dtype=float)
        self.frames = frames
        self.kappa_spline = kappa_spline
        self.tau_spline = tau_spline
        self.domain = (float(self.s[0]), float(self.s[-1]))
        self.periodic = False
        self.values = project_sphere(frames[:, :, 0])

    def sampled(self):
        return SampledCurve(self.values, self.domain, periodic=False)

    def _invariant_coefs(self, s):
        kc = np.stack([self.kappa_spline(s, nu) / factorial(nu) for nu in range(4)])
        tc = np.stack([self.tau_spline(s, nu) / factorial(nu) for nu in range(4)])
        return kc, tc

    def frame_at(self, s):
        s = np.asarray(s, dtype=float)
        h = self.s[1] - self.s[0]
        k = np.clip(np.rint((s - self.s[0]) / h).astype(int), 0, len(self.s) - 1)
        base = self.s[k]
        kc, tc = self._invariant_coefs(base)
        G = _frenet_taylor(self.frames[k], kc, tc, self._SHIFT_ORDER)
        delta = (s - base)[..., None, None]
        out = G[-1]
        for j in range(self._SHIFT_ORDER - 1, -1, -1):
            out = G[j] + out * delta
        return out

    def _jet(self, s, order):
        F = self.frame_at(s)
        kc, tc = self._invariant_coefs(s)
        G = _frenet_taylor(F, kc, tc, order)
        Z = Jet(s, G[..., 0])
        x0 = (Z[..., 0] + Z[..., 4]) / SQRT2
        x4 = (Z[..., 0] - Z[..., 4]) / SQRT2
        return Jet.stack([Z[..., 1] / x0, Z[..., 2] / x0, Z[..., 3] / x0, x4 / x0])


def _spline(s, values, periodic):
    if periodic:
        return CubicSpline(s, values, bc_type="periodic")
    return CubicSpline(s, values)


def frenet_reconstruct(invariants, initial, n_out=None, s_end=None, rtol=1e-10):
    """Integrate the conformal Frenet system from ``initial``.

    Args:
        invariants: sampled ``(s, kappa, tau)``; for periodic invariants the
            first sample is repeated at ``s0 + length`` for interpolation.
        initial: 5x5 frame (or :class:`ConformalFrame`) at ``s[0]``.
        n_out: number of uniform output samples (default: number of inputs).
        s_end: final arclength (default: last sample, or a full period).
        rtol: relative tolerance of the DOP853 integrator.

    Returns:
        :class:`ReconstructedCurve` parametrized by conformal arclength.

    Raises:
        ToleranceFailure: if the frame relations drift by more than ``1e-7``
            per unit arclength between re-orthonormalizations.
    """
    s = np.asarray(invariants.s, dtype=float)
    kappa = np.asarray(invariants.kappa, dtype=float)
    tau = np.asarray(invariants.tau, dtype=float)
    order = np.argsort(s)
    s, kappa, tau = s[order], kappa[order], tau[order]
    periodic = bool(getattr(invariants, "periodic", False)) and invariants.length is not None
    if periodic:
        s = np.append(s, s[0] + invariants.length)
        kappa = np.append(kappa, kappa[0])
        tau = np.append(tau, tau[0])
    ks, ts = _spline(s, kappa, periodic), _spline(s, tau, periodic)
    s_end = s[-1] if s_end is None else s_end
    n_out = len(order) if n_out is None else n_out
    grid = np.linspace(s[0], s_end, n_out)

    F0 = initial.matrix if isinstance(initial, ConformalFrame) else np.asarray(initial, float)
    if frame_residual(F0) > 1e-8:
        raise ToleranceFailure("initial frame violates the frame relations")

    def rhs(x, y):
        F = y.reshape(5, 5)
        return (F @ frenet_matrix(ks(x), ts(x))).ravel()

    frames = np.empty((n_out, 5, 5))
    frames[0] = F0
    for k in range(1, n_out):
        a, b = grid[k - 1], grid[k]
        sol = solve_ivp(rhs, (a, b), frames[k - 1].ravel(), method="DOP853",
                        rtol=rtol, atol=rtol * 1e-2)
        F = sol.y[:, -1].reshape(5, 5)
        drift = frame_residual(F)
        if drift > DRIFT_TOL * max(1.0, b - a):
            raise ToleranceFailure(f"frame drift {drift:.3g} over s in [{a:.6g}, {b:.6g}]")
        frames[k] = reorthonormalize(F)
    return ReconstructedCurve(grid, frames, ks, ts)


# -- group action and oracles -----------------------------------------------------------


def moebius_jet_map(g):
    """Map on vector jets: lift to the null cone, apply ``g``, return S^3 points."""
    m = g.matrix if hasattr(g, "matrix") else np.asarray(g, dtype=float)

    def fn(jet):
        Z = null_lift_jet(jet)
        Z = Jet(Z.t0, Z.coef @ m.T)
        x0 = (Z[..., 0] + Z[..., 4]) / SQRT2
        x4 = (Z[..., 0] - Z[..., 4]) / SQRT2
        return Jet.stack([Z[..., 1] / x0, Z[..., 2] / x0, Z[..., 3] / x0, x4 / x0])

    return fn


def moebius_image(c, g):
    """The S^3 curve ``g . c`` (``g`` a Moebius group element)."""
    return MappedCurve(c, moebius_jet_map(g), 4)


def planar_density_oracle(c, t):
    """Classical conformal density ``|d kappa_euc / d sigma|^(1/2) d sigma / dt`` of a plane curve."""
    g = c.jet(t, 4)
    d1 = g.derivative()
    d2 = d1.derivative()
    speed2 = (d1 * d1).sum()
    speed = jets.sqrt(speed2)
    curv = (d1[..., 0] * d2[..., 1] - d1[..., 1] * d2[..., 0]) / (speed * speed2)
    dk_dsigma = curv.derivative().value / speed.value
    return np.sqrt(np.abs(dk_dsigma)) * speed.value


def stereographic_image(c):
    """R^3 curve ``y = p[:3] / (1 - p4)`` of an S^3 curve, with jets."""

    def fn(p):
        denom = 1.0 - p[..., 3]
        return Jet.stack([p[..., 0] / denom, p[..., 1] / denom, p[..., 2] / denom])

    return MappedCurve(c, fn, 3)


def _ip_vec(a, b):
    return a @ GRAM @ b


def spiral_frame():
    """Frame whose zero-invariant Frenet orbit fixes the origin and infinity.

    With ``kappa = tau = 0`` the Frenet matrix has eigenvalues ``+-1, +-i, 0``;
    the returned frame maps its two null eigenvectors (the limit points of the
    orbit as ``s -> -+inf``) to the null lines of the poles of S^3, so the
    stereographic image of the orbit is a planar logarithmic spiral centred at
    the origin.
    """
    w, V = np.linalg.eig(frenet_matrix(0.0, 0.0))
    wp = V[:, np.argmin(np.abs(w - 1.0))].real
    wm = V[:, np.argmin(np.abs(w + 1.0))].real
    wm = wm / -_ip_vec(wp, wm)
    basis = []
    for e in np.eye(5):
        x = e + _ip_vec(e, wm) * wp + _ip_vec(e, wp) * wm
        for b in basis:
            x = x - _ip_vec(x, b) * b
        n2 = _ip_vec(x, x)
        if n2 > 1e-8:
            basis.append(x / np.sqrt(n2))
        if len(basis) == 3:
            break
    G = np.column_stack([wp, *basis, wm])
    if np.linalg.det(G) < 0:
        G[:, 3] *= -1.0
    return reorthonormalize(np.linalg.inv(G))
