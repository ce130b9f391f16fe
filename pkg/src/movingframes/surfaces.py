"""
Jet providers for parametrized surfaces.

A surface answers directional jets: the jet in ``h`` of
``S(u + h du, v + h dv)``.  Mixed partials up to total order three follow
from the four directions ``(1, 0)``, ``(0, 1)``, ``(1, 1)``, ``(1, -1)``, and
any map acting on vector jets (null lift, group action) can be applied to
the directional jets before recovering partials.
"""

from math import comb

import numpy as np

from .curves import _WEIGHTS, STENCIL_HALF
from .errors import OrderUnavailable, OutOfDomain
from .expr import eval_directional, evaluate, parse
from .jets import Jet

MAX_SURFACE_ORDER = 3
_DIRECTIONS = ((1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, -1.0))


def _recover_partials(jets_by_direction, order):
    """Partials ``{(i, j): d^(i+j) S / du^i dv^j}`` from directional jets."""
    ju, jv = jets_by_direction[0].d, jets_by_direction[1].d
    out = {(0, 0): ju[0]}
    for k in range(1, order + 1):
        out[(k, 0)] = ju[k]
        out[(0, k)] = jv[k]
    if order >= 2:
        dp = jets_by_direction[2].d
        out[(1, 1)] = 0.5 * (dp[2] - ju[2] - jv[2])
    if order >= 3:
        dp, dm = jets_by_direction[2].d, jets_by_direction[3].d
        plus, minus = dp[3] + dm[3], dp[3] - dm[3]
        out[(1, 2)] = (plus - 2.0 * ju[3]) / 6.0
        out[(2, 1)] = (0.5 * minus - jv[3]) / 3.0
    return out


class SurfaceProvider:
    """Base class; subclasses implement :meth:`_directional`."""

    dim = 3
    domain = ((0.0, 1.0), (0.0, 1.0))
    periodic = (False, False)
    max_order = MAX_SURFACE_ORDER

    def usable_domain(self):
        return self.domain

    def _check(self, u, v, order):
        if order > self.max_order:
            raise OrderUnavailable(f"order {order} requested, surface supplies {self.max_order}")
        for x, (lo, hi), per in zip((u, v), self.usable_domain(), self.periodic):
            if per:
                continue
            slack = 1e-12 * max(1.0, hi - lo)
            if np.any(x < lo - slack) or np.any(x > hi + slack):
                raise OutOfDomain(f"parameter outside [{lo}, {hi}]")

    def directional_jet(self, u, v, direction, order):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        self._check(u, v, order)
        return self._directional(u, v, direction, order)

    def partials(self, u, v, order=2, fn=None):
        """Mixed partials up to total ``order`` of ``S`` (or of ``fn(S)``).

        Args:
            u, v: parameters (broadcast together).
            order: total order, at most 3.
            fn: optional map on vector jets applied before differentiating.

        Returns:
            dict mapping ``(i, j)`` to arrays of shape ``(*u.shape, dim)``.
        """
        if order > MAX_SURFACE_ORDER:
            raise OrderUnavailable(f"mixed partials are available to total order {MAX_SURFACE_ORDER}")
        dirs = _DIRECTIONS[: 2 if order < 2 else 3 if order == 2 else 4]
        js = [self.directional_jet(u, v, d, order) for d in dirs]
        if fn is not None:
            js = [fn(j) for j in js]
        return _recover_partials(js, order)

    def points(self, u, v):
        return self.directional_jet(u, v, (1.0, 0.0), 0).coef[0]

    def grid(self, n, m=None):
        """Parameter grid ``(U, V)`` of shape ``(n, m)`` (half-open along periodic axes)."""
        m = n if m is None else m
        axes = []
        for k, ((lo, hi), per) in zip((n, m), zip(self.usable_domain(), self.periodic)):
            axes.append(lo + (hi - lo) * np.arange(k) / k if per else np.linspace(lo, hi, k))
        return np.meshgrid(axes[0], axes[1], indexing="ij")

    def map(self, fn, dim=None):
        return MappedSurface(self, fn, dim)

    def _directional(self, u, v, direction, order):
        raise NotImplementedError


class AnalyticSurface(SurfaceProvider):
    """Surface given by one expression in ``u, v`` per component."""

    max_order = 8

    def __init__(self, components, variables=("u", "v"), domain=((0.0, 1.0), (0.0, 1.0)),
                 periodic=(False, False), name=None):
        self.variables = tuple(variables)
        self.sources = list(components)
        self.asts = [parse(c, self.variables) for c in components]
        self.dim = len(self.asts)
        self.domain = tuple((float(a), float(b)) for a, b in domain)
        self.periodic = tuple(bool(p) for p in periodic)
        self.name = name

    def _directional(self, u, v, direction, order):
        a, b = self.variables
        point = {a: u, b: v}
        dirn = {a: float(direction[0]), b: float(direction[1])}
        return Jet.stack([eval_directional(ast, point, dirn, order) for ast in self.asts])

    def points(self, u, v):
        a, b = self.variables
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        return np.stack([evaluate(ast, {a: u, b: v}) for ast in self.asts], axis=-1)


class SampledSurface(SurfaceProvider):
    """Surface known on a uniform grid; tensor-product 7-point stencils.

    Non-periodic axes lose three grid lines at each end from the usable domain.
    """

    def __init__(self, values, domain, periodic=(False, False)):
        vals = np.asarray(values, dtype=float)
        if vals.ndim != 3:
            raise ValueError("values must be an (N, M, dim) array")
        if min(vals.shape[:2]) < 2 * STENCIL_HALF + 5:
            raise ValueError("sampled surfaces need at least 11 grid lines per axis")
        self.values = vals
        self.dim = vals.shape[2]
        self.domain = tuple((float(a), float(b)) for a, b in domain)
        self.periodic = tuple(bool(p) for p in periodic)
        self.h = tuple((hi - lo) / (n if per else n - 1)
                       for (lo, hi), n, per in zip(self.domain, vals.shape[:2], self.periodic))

    def usable_domain(self):
        out = []
        for (lo, hi), h, per in zip(self.domain, self.h, self.periodic):
            pad = 0.0 if per else STENCIL_HALF * h
            out.append((lo + pad, hi - pad))
        return tuple(out)

    def _locate(self, x, axis):
        lo = self.domain[axis][0]
        h = self.h[axis]
        n = self.values.shape[axis]
        y = (x - lo) / h
        i = np.rint(y).astype(int)
        if not self.periodic[axis]:
            i = np.clip(i, STENCIL_HALF, n - 1 - STENCIL_HALF)
        idx = i[..., None] + np.arange(-STENCIL_HALF, STENCIL_HALF + 1)
        if self.periodic[axis]:
            idx = idx % n
        return idx, (y - i) * h

    def taylor(self, u, v, order):
        """Partials ``{(a, b)}`` with ``a + b <= order`` at ``(u, v)`` by shifted stencils."""
        iu, du = self._locate(u, 0)
        iv, dv = self._locate(v, 1)
        window = self.values[iu[..., :, None], iv[..., None, :]]  # (..., 7, 7, dim)
        m = _WEIGHTS.shape[0]
        su = self.h[0] ** -np.arange(m, dtype=float)
        sv = self.h[1] ** -np.arange(m, dtype=float)
        Wu = _WEIGHTS * su[:, None]
        Wv = _WEIGHTS * sv[:, None]
        D = np.einsum("pk,ql,...kld->pq...d", Wu, Wv, window)
        fact = np.cumprod(np.concatenate([[1.0], np.arange(1, m, dtype=float)]))
        out = {}
        for a in range(order + 1):
            pu = np.stack([du ** (p - a) / fact[p - a] if p >= a else np.zeros_like(du)
                           for p in range(m)])
            for b in range(order + 1 - a):
                pv = np.stack([dv ** (q - b) / fact[q - b] if q >= b else np.zeros_like(dv)
                               for q in range(m)])
                out[(a, b)] = np.einsum("pq...d,p...,q...->...d", D, pu, pv)
        return out

    def _directional(self, u, v, direction, order):
        T = self.taylor(u, v, order)
        du, dv = float(direction[0]), float(direction[1])
        d = [sum(comb(k, i) * du**i * dv ** (k - i) * T[(i, k - i)] for i in range(k + 1))
             for k in range(order + 1)]
        return Jet.from_derivatives(u, np.stack(d))


class MappedSurface(SurfaceProvider):
    """Image of a surface under a map acting on vector jets."""

    def __init__(self, base, fn, dim=None):
        self.base = base
        self.fn = fn
        self.domain = base.domain
        self.periodic = base.periodic
        self.max_order = base.max_order
        lo = [d[0] for d in base.usable_domain()]
        self.dim = dim or fn(base.directional_jet(lo[0], lo[1], (1.0, 0.0), 0)).coef.shape[-1]

    def usable_domain(self):
        return self.base.usable_domain()

    def _directional(self, u, v, direction, order):
        return self.fn(self.base.directional_jet(u, v, direction, order))


def sample_surface(surface, n, m=None):
    """Sample ``surface`` on its parameter grid and return a :class:`SampledSurface`."""
    U, V = surface.grid(n, m)
    return SampledSurface(surface.points(U, V), surface.domain, surface.periodic)
