"""
Congruence tests from invariant signatures.

Two generic curves are congruent under a group exactly when their
invariants, as functions of invariant arclength, agree up to a shift
``kappa_1(s + c) = kappa_2(s)``.  A signature samples the invariants at
uniform steps of ``s``; :func:`match` searches the shift.
"""

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import minimize_scalar

from . import affine, conformal_curves, euclidean
from .curves import EUCLIDEAN_DENSITY, MappedCurve, ReparamTable
from .errors import (CircleDegeneracy, IncompatibleTags, InflectionPoint,
                     InsufficientOverlap)
from .groups import Geometry
from .jets import Jet

N_SAMPLES = 512
MATCH_REL_TOL = 1e-4


@dataclass(frozen=True)
class InvariantSignature:
    """Invariants sampled at uniform invariant arclength.

    ``values`` has shape ``(n, k)``: one column for Euclidean and
    equi-affine curvature, two (``kappa, tau``) for conformal curves.
    Periodic signatures sample the half-open window ``[0, length)``.
    """

    geometry: Geometry
    s: np.ndarray
    values: np.ndarray
    periodic: bool
    length: float

    @property
    def step(self):
        return self.length / (self.s.size if self.periodic else self.s.size - 1)

    @property
    def rms(self):
        return float(np.sqrt(np.mean(np.sum(self.values**2, axis=-1))))

    def rolled(self, k):
        """Periodic signature of the same curve started ``k`` samples later."""
        if not self.periodic:
            raise ValueError("only periodic signatures can be rolled")
        return InvariantSignature(self.geometry, self.s, np.roll(self.values, -k, axis=0),
                                  True, self.length)

    def spline(self):
        if self.periodic:
            s = np.append(self.s, self.length)
            v = np.vstack([self.values, self.values[:1]])
            return CubicSpline(s, v, bc_type="periodic")
        return CubicSpline(self.s, self.values)


@dataclass(frozen=True)
class MatchResult:
    congruent: bool
    shift: float
    residual: float
    threshold: float


_DENSITIES = {
    Geometry.EUCLIDEAN2: EUCLIDEAN_DENSITY,
    Geometry.EQUIAFFINE2: affine.AFFINE_DENSITY,
    Geometry.MOEBIUS3: conformal_curves.CONFORMAL_DENSITY,
}


def _invariants(c, geometry, t):
    if geometry is Geometry.EUCLIDEAN2:
        return euclidean.euclidean_curvature(c.jet(t, 2))[:, None]
    if geometry is Geometry.EQUIAFFINE2:
        return affine.affine_curvature(c, t)[:, None]
    fr = conformal_curves.conformal_adapted_frame(c, t)
    return np.stack([fr.kappa, fr.tau], axis=-1)


def build_signature(c, geometry, n=N_SAMPLES):
    """Sample the invariants of ``c`` at ``n`` uniform steps of invariant arclength.

    Args:
        c: curve provider.
        geometry: geometry tag (``"euclidean"``, ``"equiaffine"`` or ``"conformal"``).
        n: number of samples.

    Returns:
        :class:`InvariantSignature`.

    Raises:
        InflectionPoint: equi-affine signature of a curve with inflections.
        CircleDegeneracy: conformal signature of a curve with circle-degenerate arcs.
    """
    geometry = Geometry.parse(geometry)
    if geometry is Geometry.EQUIAFFINE2:
        bad = affine.detect_inflections(c)
        if bad:
            raise InflectionPoint("curve has inflectional arcs", bad)
    elif geometry is Geometry.MOEBIUS3:
        bad = conformal_curves.detect_circle_degeneracy(c)
        if bad:
            raise CircleDegeneracy("curve has circle-degenerate arcs", bad)
    table = ReparamTable(c, _DENSITIES[geometry])
    length = abs(table.total)
    s = length * np.arange(n) / n if c.periodic else np.linspace(0.0, length, n)
    t = table.t_of_s(table.sign * s)
    return InvariantSignature(geometry, s, _invariants(c, geometry, t), c.periodic, length)


def _residuals(outer, inner, shifts, flip_tau):
    """RMS of ``outer(s + c) - inner(s)`` for each shift ``c``."""
    spline = outer.spline()
    x = inner.s[None, :] + np.asarray(shifts, dtype=float)[:, None]
    if outer.periodic:
        x = np.mod(x, outer.length)
    diff = spline(x) - inner.values
    if flip_tau:
        diff[..., 1] = spline(x)[..., 1] + inner.values[:, 1]
    return np.sqrt(np.mean(np.sum(diff**2, axis=-1), axis=-1))


def _best_shift(outer, inner):
    """Grid search at sample resolution followed by bounded scalar refinement."""
    step = min(outer.step, inner.step)
    if outer.periodic:
        lo, hi = 0.0, outer.length
        grid = np.arange(0.0, outer.length, step)
    else:
        hi = outer.length - inner.length
        if hi < -1e-9 * max(outer.length, 1.0):
            raise InsufficientOverlap("signature does not fit inside the other window")
        lo, hi = 0.0, max(hi, 0.0)
        grid = np.append(np.arange(0.0, hi, step), hi)
    flips = (False, True) if outer.geometry is Geometry.MOEBIUS3 else (False,)
    best = None
    for flip in flips:
        r = _residuals(outer, inner, grid, flip)
        k = int(np.argmin(r))
        cand = (float(r[k]), float(grid[k]), flip)
        a, b = grid[k] - step, grid[k] + step
        if not outer.periodic:
            a, b = max(a, lo), min(b, hi)
        if b > a:
            res = minimize_scalar(lambda x: _residuals(outer, inner, [x], flip)[0],
                                  bounds=(a, b), method="bounded",
                                  options={"xatol": 1e-10 * max(step, 1e-300)})
            if res.fun < cand[0]:
                cand = (float(res.fun), float(res.x), flip)
        if best is None or cand[0] < best[0]:
            best = cand
    residual, shift, _ = best
    if outer.periodic:
        shift = float(np.mod(shift, outer.length))
    return shift, residual


def _swap_needed(sig1, sig2):
    if sig1.periodic != sig2.periodic:
        return not sig1.periodic
    return not sig1.periodic and sig1.length < sig2.length


def match(sig1, sig2):
    """Decide whether two signatures agree up to a shift.

    The shift ``c`` satisfies ``sig1(s + c) = sig2(s)`` (modulo the length for
    periodic signatures).  The curves are congruent when the RMS residual is
    at most ``1e-4 * (1 + rms(sig2))``.  Conformal ``tau`` is compared up to a
    global sign.

    Raises:
        IncompatibleTags: if the geometries differ.
        InsufficientOverlap: if the signatures have too few samples.
    """
    if sig1.geometry is not sig2.geometry:
        raise IncompatibleTags(f"cannot match {sig1.geometry.value} against {sig2.geometry.value}")
    if min(sig1.s.size, sig2.s.size) < 4:
        raise InsufficientOverlap("signatures need at least 4 samples")
    if _swap_needed(sig1, sig2):
        shift, residual = _best_shift(sig2, sig1)
        shift = -shift
        if sig2.periodic:
            shift = float(np.mod(shift, sig2.length))
    else:
        shift, residual = _best_shift(sig1, sig2)
    threshold = MATCH_REL_TOL * (1.0 + sig2.rms)
    return MatchResult(residual <= threshold, shift, residual, threshold)


def transform_curve(c, g):
    """Image of ``c`` under a group element.

    Planar geometries act affinely on jets; Moebius elements produce an S^3 curve.
    """
    if g.geometry is Geometry.MOEBIUS3:
        return conformal_curves.moebius_image(c, g)
    A, b = g.matrix[1:, 1:], g.matrix[1:, 0]

    def fn(jet):
        coef = jet.coef @ A.T
        coef[0] = coef[0] + b
        return Jet(jet.t0, coef)

    return MappedCurve(c, fn, 2)
