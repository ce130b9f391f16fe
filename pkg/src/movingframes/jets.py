"""
Truncated Taylor (jet) arithmetic.

A :class:`Jet` stores normalized Taylor coefficients ``coef[k] = f^(k)(t0) / k!``
along axis 0.  Trailing axes are free: they may hold a batch of base points,
vector components, or both.  All operations broadcast over trailing axes the
way numpy does, so a whole grid of samples can be pushed through a formula at
once.

Normalized coefficients make products plain Cauchy convolutions; the
derivative values are available through :attr:`Jet.d`.
"""

from math import factorial

import numpy as np

from .errors import DomainError

MAX_ORDER = 8

_FACT = np.array([factorial(k) for k in range(MAX_ORDER + 2)], dtype=float)


def _fact_shape(n, ndim):
    return _FACT[:n].reshape((n,) + (1,) * (ndim - 1))


class Jet:
    """Truncated Taylor expansion of a (batched, possibly vector) function."""

    __slots__ = ("t0", "coef")
    __array_priority__ = 100

    def __init__(self, t0, coef):
        coef = np.asarray(coef, dtype=float)
        if coef.ndim == 0:
            coef = coef.reshape(1)
        if coef.shape[0] - 1 > MAX_ORDER:
            raise ValueError(f"jet order {coef.shape[0] - 1} exceeds cap {MAX_ORDER}")
        self.t0 = t0
        self.coef = coef

    @classmethod
    def from_derivatives(cls, t0, d):
        d = np.asarray(d, dtype=float)
        return cls(t0, d / _fact_shape(d.shape[0], d.ndim))

    @classmethod
    def variable(cls, t0, order, slope=1.0):
        """Jet of the identity map ``t -> t`` (times ``slope``) at ``t0``."""
        t0a = np.asarray(t0, dtype=float)
        coef = np.zeros((order + 1,) + t0a.shape)
        coef[0] = t0a
        if order >= 1:
            coef[1] = slope
        return cls(t0, coef)

    @classmethod
    def constant(cls, value, order, t0=0.0):
        value = np.asarray(value, dtype=float)
        coef = np.zeros((order + 1,) + value.shape)
        coef[0] = value
        return cls(t0, coef)

    @property
    def order(self):
        return self.coef.shape[0] - 1

    @property
    def shape(self):
        """Shape of the trailing (batch / component) axes."""
        return self.coef.shape[1:]

    @property
    def d(self):
        """Derivative values ``d[k] = f^(k)(t0)``."""
        return self.coef * _fact_shape(self.coef.shape[0], self.coef.ndim)

    @property
    def value(self):
        return self.coef[0]

    def __repr__(self):
        return f"Jet(order={self.order}, shape={self.shape}, d0={self.coef[0]!r})"

    # -- structural helpers -------------------------------------------------

    def truncate(self, order):
        if order > self.order:
            raise ValueError("cannot raise the order of a jet")
        return Jet(self.t0, self.coef[: order + 1])

    def __getitem__(self, idx):
        if not isinstance(idx, tuple):
            idx = (idx,)
        return Jet(self.t0, self.coef[(slice(None),) + idx])

    def derivative(self):
        """Jet of the derivative; the order drops by one."""
        if self.order == 0:
            raise ValueError("derivative of an order-0 jet is unavailable")
        k = np.arange(1, self.order + 1, dtype=float)
        k = k.reshape((-1,) + (1,) * (self.coef.ndim - 1))
        return Jet(self.t0, self.coef[1:] * k)

    def integral(self, constant=0.0):
        """Antiderivative jet; raises the order by one (capped at MAX_ORDER)."""
        n = self.coef.shape[0]
        k = np.arange(1, n + 1, dtype=float).reshape((-1,) + (1,) * (self.coef.ndim - 1))
        head = np.broadcast_to(np.asarray(constant, dtype=float), self.coef.shape[1:])
        coef = np.concatenate([head[None], self.coef / k])
        if coef.shape[0] - 1 > MAX_ORDER:
            coef = coef[: MAX_ORDER + 1]
        return Jet(self.t0, coef)

    def sum(self, axis=-1):
        ax = axis if axis < 0 else axis + 1
        return Jet(self.t0, self.coef.sum(axis=ax))

    @staticmethod
    def stack(jets, axis=-1):
        """Stack jets along a new trailing axis (order = min of the inputs)."""
        n = min(j.order for j in jets)
        ax = axis if axis < 0 else axis + 1
        return Jet(jets[0].t0, np.stack([j.coef[: n + 1] for j in jets], axis=ax))

    # -- arithmetic -----------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Jet):
            return other
        val = np.asarray(other, dtype=float)
        coef = np.zeros((self.coef.shape[0],) + np.broadcast_shapes(val.shape, self.coef.shape[1:]))
        coef[0] = val
        return Jet(self.t0, coef)

    @staticmethod
    def _align(a, b):
        n = min(a.coef.shape[0], b.coef.shape[0])
        return a.coef[:n], b.coef[:n]

    def __add__(self, other):
        other = self._coerce(other)
        a, b = self._align(self, other)
        return Jet(self.t0, a + b)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.t0, -self.coef)

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        a, b = self._align(self, other)
        return Jet(self.t0, a - b)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.t0, self.coef * np.asarray(other, dtype=float))
        a, b = self._align(self, other)
        n = a.shape[0]
        out = np.zeros((n,) + np.broadcast_shapes(a.shape[1:], b.shape[1:]))
        for k in range(n):
            for j in range(k + 1):
                out[k] += a[j] * b[k - j]
        return Jet(self.t0, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.t0, self.coef / np.asarray(other, dtype=float))
        a, b = self._align(self, other)
        b0 = b[0]
        if np.any(b0 == 0):
            raise DomainError("division by zero at the base point")
        n = a.shape[0]
        q = np.zeros((n,) + np.broadcast_shapes(a.shape[1:], b.shape[1:]))
        for k in range(n):
            acc = a[k]
            for j in range(1, k + 1):
                acc = acc - b[j] * q[k - j]
            q[k] = acc / b0
        return Jet(self.t0, q)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, p):
        return power(self, p)


# -- elementary functions ---------------------------------------------------------


def _as_jet(x):
    if not isinstance(x, Jet):
        raise TypeError("expected a Jet")
    return x


def _series(a, head, step):
    """Generic first-order recurrence: ``out[k] = step(k, out)`` with out[0] = head."""
    n = a.coef.shape[0]
    out = np.zeros((n,) + np.broadcast_shapes(a.coef.shape[1:], np.shape(head)))
    out[0] = head
    for k in range(1, n):
        out[k] = step(k, out)
    return Jet(a.t0, out)


def exp(a):
    a = _as_jet(a)
    c = a.coef
    return _series(a, np.exp(c[0]),
                   lambda k, e: sum(j * c[j] * e[k - j] for j in range(1, k + 1)) / k)


def log(a):
    a = _as_jet(a)
    c = a.coef
    if np.any(c[0] <= 0):
        raise DomainError("log of a non-positive number")
    a0 = c[0]

    def step(k, out):
        acc = c[k] - sum(j * out[j] * c[k - j] for j in range(1, k)) / k if k > 1 else c[k]
        return acc / a0

    return _series(a, np.log(a0), step)


def sin_cos(a):
    a = _as_jet(a)
    c = a.coef
    n = c.shape[0]
    s = np.zeros(c.shape)
    co = np.zeros(c.shape)
    s[0] = np.sin(c[0])
    co[0] = np.cos(c[0])
    for k in range(1, n):
        s[k] = sum(j * c[j] * co[k - j] for j in range(1, k + 1)) / k
        co[k] = -sum(j * c[j] * s[k - j] for j in range(1, k + 1)) / k
    return Jet(a.t0, s), Jet(a.t0, co)


def sin(a):
    return sin_cos(a)[0]


def cos(a):
    return sin_cos(a)[1]


def tan(a):
    s, c = sin_cos(a)
    if np.any(np.abs(c.coef[0]) < 1e-300):
        raise DomainError("tan evaluated at a pole")
    return s / c


def _is_integer(p):
    return float(p).is_integer()


def power(a, p):
    """``a ** p`` for a constant real exponent ``p``."""
    a = _as_jet(a)
    p = float(p)
    if _is_integer(p):
        n = int(p)
        if n == 0:
            return Jet.constant(np.ones(a.coef.shape[1:]), a.order, a.t0)
        if n < 0:
            return 1.0 / power(a, -n)
        result = None
        base = a
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        return result
    c = a.coef
    a0 = c[0]
    if np.any(a0 < 0):
        raise DomainError(f"fractional power {p} of a negative number")
    if np.any(a0 == 0):
        if a.order == 0:
            return Jet(a.t0, np.power(c, p))
        raise DomainError(f"fractional power {p} is not differentiable at zero")

    def step(k, y):
        return sum((p * j - (k - j)) * c[j] * y[k - j] for j in range(1, k + 1)) / (k * a0)

    return _series(a, np.power(a0, p), step)


def sqrt(a):
    return power(a, 0.5)


def cbrt(a):
    """Signed cube root, ``sign(a) |a|^(1/3)``; zero base is a DomainError above order 0."""
    a = _as_jet(a)
    sign = np.sign(a.coef[0])
    if np.any(sign == 0):
        if a.order == 0:
            return Jet(a.t0, np.cbrt(a.coef))
        raise DomainError("cube root is not differentiable at zero")
    return power(a * sign, 1.0 / 3.0) * sign


def absolute(a):
    a = _as_jet(a)
    sign = np.sign(a.coef[0])
    if np.any(sign == 0):
        if a.order == 0:
            return Jet(a.t0, np.abs(a.coef))
        raise DomainError("abs is not differentiable at zero")
    return a * sign


# -- series manipulation -------------------------------------------------------------


def compose(outer, inner):
    """Jet of ``outer(inner(t))`` where ``outer`` is expanded about ``inner.value``.

    If ``outer`` carries more trailing axes than ``inner`` (e.g. vector
    components), ``inner`` is broadcast over the extra axes on the right.
    """
    delta = inner - inner.coef[0]
    n = min(outer.order, inner.order)
    dc = delta.coef[: n + 1]
    extra = outer.coef.ndim - dc.ndim
    if extra > 0:
        dc = dc.reshape(dc.shape + (1,) * extra)
    delta = Jet(inner.t0, dc)
    out = Jet(inner.t0, np.zeros((n + 1,) + np.broadcast_shapes(outer.coef.shape[1:], dc.shape[1:])))
    out.coef[0] = outer.coef[0]
    powk = delta
    for k in range(1, n + 1):
        out = out + powk * outer.coef[k]
        if k < n:
            powk = powk * delta
    return Jet(inner.t0, out.coef)


def reversion(f):
    """Inverse series: given the jet of ``s(t)`` at ``t0`` (with ``s'(t0) != 0``),
    return the jet of ``t(s)`` at ``s0 = s(t0)``.
    """
    c = f.coef
    if c.shape[0] < 2 or np.any(c[1] == 0):
        raise DomainError("series reversion needs a nonvanishing first derivative")
    n = f.order
    sigma = Jet(c[0], np.zeros(c.shape))
    sigma.coef[1] = 1.0
    higher = Jet(0.0, c.copy())
    higher.coef[:2] = 0.0
    delta = sigma / c[1]
    # fixed point delta = (sigma - sum_{j>=2} c_j delta^j) / c_1; one order per pass
    for _ in range(n - 1):
        delta = (sigma - compose(higher, delta)) / c[1]
    out = delta.coef.copy()
    out[0] = np.broadcast_to(np.asarray(f.t0, dtype=float), out.shape[1:])
    return Jet(c[0], out)


def inner_product(a, b, gram=None):
    """Contract the last axis of two vector jets, optionally through ``gram``."""
    if gram is not None:
        b = Jet(b.t0, b.coef @ np.asarray(gram).T)
    return (a * b).sum(axis=-1)
