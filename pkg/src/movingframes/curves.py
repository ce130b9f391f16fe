"""
Jet providers for parametrized curves and reparametrization by an invariant
arclength density.

A provider answers one question: the jet of the curve at a batch of
parameter values.  Jets of a curve have coefficient shape
``(order + 1, *t.shape, dim)``.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator

from . import jets
from .errors import DensityVanishes, OrderUnavailable, OutOfDomain
from .expr import eval_jet, evaluate, parse
from .jets import Jet

SAMPLED_MAX_ORDER = 5
STENCIL_HALF = 3
_DOMAIN_SLACK = 1e-12


class CurveProvider:
    """Base class; subclasses implement :meth:`_jet`."""

    dim = 2
    domain = (0.0, 1.0)
    periodic = False
    max_order = jets.MAX_ORDER

    @property
    def period(self):
        return self.domain[1] - self.domain[0]

    def usable_domain(self):
        return self.domain

    def jet(self, t, order):
        """Jet of the curve at ``t`` (scalar or array) up to ``order``."""
        if order > self.max_order:
            raise OrderUnavailable(f"order {order} requested, provider supplies {self.max_order}")
        t = np.asarray(t, dtype=float)
        if not self.periodic:
            lo, hi = self.usable_domain()
            slack = _DOMAIN_SLACK * max(1.0, abs(hi - lo))
            if np.any(t < lo - slack) or np.any(t > hi + slack):
                raise OutOfDomain(f"parameter outside [{lo}, {hi}]")
        return self._jet(t, order)

    def points(self, t):
        return self.jet(t, 0).coef[0]

    def sample_parameters(self, n, margin=0.0):
        """``n`` parameters covering the usable domain (half-open if periodic)."""
        lo, hi = self.usable_domain()
        if self.periodic:
            return lo + (hi - lo) * np.arange(n) / n
        return np.linspace(lo + margin, hi - margin, n)

    def map(self, fn, dim=None):
        """Curve ``fn(gamma)``; ``fn`` acts on vector jets."""
        return MappedCurve(self, fn, dim)

    def _jet(self, t, order):
        raise NotImplementedError


def jet(provider, t, order):
    return provider.jet(t, order)


class AnalyticCurve(CurveProvider):
    """Curve given by one expression per component."""

    def __init__(self, components, variable="t", domain=(0.0, 1.0), periodic=False, name=None):
        self.variable = variable
        self.sources = [c if isinstance(c, str) else str(c) for c in components]
        self.asts = [parse(c, [variable]) if isinstance(c, str) else c for c in components]
        self.dim = len(self.asts)
        self.domain = (float(domain[0]), float(domain[1]))
        self.periodic = bool(periodic)
        self.name = name

    def __repr__(self):
        return f"AnalyticCurve({self.sources}, domain={self.domain}, periodic={self.periodic})"

    def _jet(self, t, order):
        comps = [eval_jet(a, {self.variable: t}, order) for a in self.asts]
        return Jet.stack(comps)

    def points(self, t):
        t = np.asarray(t, dtype=float)
        return np.stack([evaluate(a, {self.variable: t}) for a in self.asts], axis=-1)


def _stencil_weights(half=STENCIL_HALF):
    """Rows give derivatives 0..2*half at the center node from 2*half+1 samples.

    Computed in exact rational arithmetic so the symmetric/antisymmetric
    structure of the stencils is preserved to the last bit.
    """
    offsets = range(-half, half + 1)
    n = 2 * half + 1
    # Taylor matrix: value at offset k = sum_j D_j k^j / j!
    V = [[Fraction(k) ** j / factorial(j) for j in range(n)] for k in offsets]
    inv = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if V[r][col] != 0)
        V[col], V[piv] = V[piv], V[col]
        inv[col], inv[piv] = inv[piv], inv[col]
        p = V[col][col]
        V[col] = [x / p for x in V[col]]
        inv[col] = [x / p for x in inv[col]]
        for r in range(n):
            if r != col and V[r][col] != 0:
                f = V[r][col]
                V[r] = [a - f * b for a, b in zip(V[r], V[col])]
                inv[r] = [a - f * b for a, b in zip(inv[r], inv[col])]
    return np.array([[float(x) for x in row] for row in inv])


_WEIGHTS = _stencil_weights()


class SampledCurve(CurveProvider):
    """Curve known on a uniform grid; derivatives by 7-point centered stencils.

    The k-th derivative carries an O(h^(7-k)) truncation error (O(h^(6-k))
    or better at the nodes, by symmetry).  Non-periodic curves lose the three
    outermost samples at each end from the usable domain; periodic curves wrap.
    """

    max_order = SAMPLED_MAX_ORDER

    def __init__(self, points, domain, periodic=False):
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2:
            raise ValueError("points must be an (N, dim) array")
        if pts.shape[0] < 2 * STENCIL_HALF + 5:
            raise ValueError("sampled curves need at least 11 grid points")
        self.values = pts
        self.dim = pts.shape[1]
        self.domain = (float(domain[0]), float(domain[1]))
        self.periodic = bool(periodic)
        n = pts.shape[0]
        self.h = (self.domain[1] - self.domain[0]) / (n if self.periodic else n - 1)

    def usable_domain(self):
        if self.periodic:
            return self.domain
        pad = STENCIL_HALF * self.h
        return self.domain[0] + pad, self.domain[1] - pad

    def grid(self):
        n = self.values.shape[0]
        return self.domain[0] + self.h * np.arange(n)

    def _jet(self, t, order):
        n = self.values.shape[0]
        x = (t - self.domain[0]) / self.h
        i = np.rint(x).astype(int)
        if self.periodic:
            delta = (x - i) * self.h
            idx = (i[..., None] + np.arange(-STENCIL_HALF, STENCIL_HALF + 1)) % n
        else:
            i = np.clip(i, STENCIL_HALF, n - 1 - STENCIL_HALF)
            delta = (x - i) * self.h
            idx = i[..., None] + np.arange(-STENCIL_HALF, STENCIL_HALF + 1)
        window = self.values[idx]  # (..., 7, dim)
        m = _WEIGHTS.shape[0]
        scale = self.h ** -np.arange(m, dtype=float)
        D = np.einsum("jk,...kd->j...d", _WEIGHTS, window)
        D *= scale.reshape((m,) + (1,) * (D.ndim - 1))
        # shift the node expansion to the requested parameter
        d = np.zeros((order + 1,) + D.shape[1:])
        dl = delta[..., None]
        for k in range(order + 1):
            term = np.zeros(D.shape[1:])
            powk = np.ones_like(dl)
            for j in range(k, m):
                term = term + D[j] * powk / _fact(j - k)
                powk = powk * dl
            d[k] = term
        return Jet.from_derivatives(t, d)


def _fact(n):
    return float(np.prod(np.arange(1, n + 1, dtype=float))) if n > 1 else 1.0


def sample_curve(provider, n, periodic=None):
    """Sample ``provider`` on a uniform grid and return a :class:`SampledCurve`."""
    periodic = provider.periodic if periodic is None else periodic
    lo, hi = provider.domain
    if periodic:
        t = lo + (hi - lo) * np.arange(n) / n
    else:
        t = np.linspace(lo, hi, n)
    return SampledCurve(provider.points(t), provider.domain, periodic)


class MappedCurve(CurveProvider):
    """Image of a curve under a map acting on vector jets (e.g. a group action)."""

    def __init__(self, base, fn, dim=None):
        self.base = base
        self.fn = fn
        self.domain = base.domain
        self.periodic = base.periodic
        self.max_order = base.max_order
        probe = fn(base.jet(np.asarray(base.sample_parameters(1)[0]), 0))
        self.dim = dim or probe.coef.shape[-1]

    def usable_domain(self):
        return self.base.usable_domain()

    def _jet(self, t, order):
        return self.fn(self.base.jet(t, order))


# -- reparametrization ------------------------------------------------------------


@dataclass(frozen=True)
class Density:
    """An arclength density computed from a curve jet.

    ``func`` maps the curve jet (order ``m + consumes``) to the scalar jet of
    ``ds/dt`` (order ``m``).
    """

    func: object
    consumes: int
    name: str = "density"

    def __call__(self, curve_jet):
        return self.func(curve_jet)

    def values(self, provider, t):
        return self.func(provider.jet(t, self.consumes)).coef[0]


def _euclidean_density(g):
    v = g.derivative()
    return jets.sqrt((v * v).sum())


EUCLIDEAN_DENSITY = Density(_euclidean_density, 1, "euclidean")


_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)


class ReparamTable:
    """Monotone table of (t, s) with ``s = int density dt``.

    Built by 8-point Gauss-Legendre quadrature on each table interval;
    inversion uses a monotone cubic (PCHIP) guess followed by Newton steps.
    """

    def __init__(self, provider, density, n_intervals=512, vanish_tol=1e-10):
        self.provider = provider
        self.density = density
        lo, hi = provider.usable_domain()
        self.t = np.linspace(lo, hi, n_intervals + 1)
        probe = provider.sample_parameters(max(4 * n_intervals, 64)) if provider.periodic \
            else np.linspace(lo, hi, max(4 * n_intervals, 64))
        rho = density.values(provider, probe)
        bad = np.abs(rho) < vanish_tol
        sign = np.sign(np.median(rho))
        if np.any(bad) or np.any(np.sign(rho) != sign):
            where = probe[bad | (np.sign(rho) != sign)]
            interval = (float(where.min()), float(where.max()))
            raise DensityVanishes(f"density vanishes or changes sign on t in {interval}", interval)
        self.sign = sign
        a, b = self.t[:-1], self.t[1:]
        self.s = np.concatenate([[0.0], np.cumsum(self._integrate(a, b))])
        self._inverse = PchipInterpolator(self.s * sign, self.t)

    def _integrate(self, a, b):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        nodes = mid[..., None] + half[..., None] * _GL_X
        vals = self.density.values(self.provider, nodes)
        return half * (vals @ _GL_W)

    @property
    def total(self):
        return float(self.s[-1])

    def s_of_t(self, t):
        t = np.asarray(t, dtype=float)
        i = np.clip(np.searchsorted(self.t, t, side="right") - 1, 0, self.t.size - 2)
        return self.s[i] + self._integrate(self.t[i], t)

    def t_of_s(self, s, iterations=4):
        s = np.asarray(s, dtype=float)
        t = self._inverse(s * self.sign)
        lo, hi = self.t[0], self.t[-1]
        for _ in range(iterations):
            rho = self.density.values(self.provider, t)
            t = np.clip(t - (self.s_of_t(t) - s) / rho, lo, hi)
        return t

    def check_total(self, tol=1e-10):
        """Total length recomputed by adaptive quadrature (independent of the table)."""
        f = lambda x: float(self.density.values(self.provider, np.asarray(x)))  # noqa: E731
        return quad(f, self.t[0], self.t[-1], epsabs=tol, epsrel=tol, limit=500)[0]


class ReparametrizedCurve(CurveProvider):
    """``P_hat(s(t)) = P(t)``, jets by series reversion of ``s(t)``."""

    def __init__(self, table):
        self.table = table
        base = table.provider
        self.base = base
        self.dim = base.dim
        self.periodic = base.periodic
        lo, hi = 0.0, table.total
        self.domain = (min(lo, hi), max(lo, hi))
        self.max_order = min(base.max_order, jets.MAX_ORDER - table.density.consumes + 1)

    def _jet(self, s, order):
        if self.periodic:
            lo, hi = self.domain
            s = lo + np.mod(s - lo, hi - lo)
        t = self.table.t_of_s(s * self.table.sign if self.table.sign < 0 else s)
        return self.jet_at_t(t, order)

    def jet_at_t(self, t, order):
        """Jets with respect to ``s`` at the points with base parameter ``t``."""
        density = self.table.density
        g = self.base.jet(t, max(order, order - 1 + density.consumes))
        return jets_in_arclength(g, density, order, self.table.s_of_t(t))


def jets_in_arclength(g, density, order, s0=0.0):
    """Re-expand a curve jet in the arclength of ``density``.

    Args:
        g: curve jet in the original parameter, of order at least
            ``max(order, order - 1 + density.consumes)``.
        density: arclength density.
        order: order of the returned jet.
        s0: arclength value assigned to the base point.

    Returns:
        Jet of the curve with respect to ``s``, based at ``s0``.
    """
    if order == 0:
        return Jet(np.broadcast_to(s0, g.coef.shape[1:-1]), g.coef[:1])
    rho = density(g.truncate(order - 1 + density.consumes))
    s_t = rho.integral(s0)
    return jets.compose(g.truncate(order), jets.reversion(s_t))


def reparametrize(provider, density, n_intervals=512):
    """Reparametrize ``provider`` by the arclength of ``density``.

    Returns:
        (ReparamTable, ReparametrizedCurve)
    """
    table = ReparamTable(provider, density, n_intervals)
    return table, ReparametrizedCurve(table)
