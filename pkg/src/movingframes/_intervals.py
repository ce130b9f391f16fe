"""Helpers turning flagged samples and isolated roots into parameter intervals."""

import numpy as np
from scipy.optimize import brentq


def sign_change_roots(f, t, values):
    """Roots of scalar ``f`` bracketed by sign changes of ``values = f(t)``."""
    roots = []
    for k in np.nonzero(np.signbit(values[:-1]) != np.signbit(values[1:]))[0]:
        a, b = t[k], t[k + 1]
        fa, fb = values[k], values[k + 1]
        if fa == 0.0:
            roots.append(a)
        elif fb == 0.0:
            roots.append(b)
        else:
            roots.append(brentq(f, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps))
    return roots


def merge_intervals(points, guard, domain, periodic):
    """Union of ``[p - guard, p + guard]`` over ``points``, merged and clipped.

    For periodic domains the first and last intervals merge across the seam;
    if the union covers the whole period the domain itself is returned.
    """
    lo, hi = domain
    if len(points) == 0:
        return []
    pts = np.sort(np.asarray(points, dtype=float))
    if periodic:
        period = hi - lo
        pts = np.sort(lo + np.mod(pts - lo, period))
    out = []
    a, b = pts[0] - guard, pts[0] + guard
    for p in pts[1:]:
        if p - guard <= b:
            b = p + guard
        else:
            out.append([a, b])
            a, b = p - guard, p + guard
    out.append([a, b])
    if periodic:
        if len(out) > 1 and out[-1][1] - period >= out[0][0]:
            first = out.pop(0)
            out[-1][1] = first[1] + period
        if len(out) == 1 and out[0][1] - out[0][0] >= period:
            return [(lo, hi)]
        return [(float(x), float(y)) for x, y in out]
    return [(float(max(x, lo)), float(min(y, hi))) for x, y in out]


def contains(intervals, t, period=None, lo=0.0):
    """Boolean mask: which parameters ``t`` fall inside any interval."""
    t = np.asarray(t, dtype=float)
    mask = np.zeros(t.shape, dtype=bool)
    for a, b in intervals:
        if period is None:
            mask |= (t >= a) & (t <= b)
        else:
            for shift in (-period, 0.0, period):
                mask |= (t + shift >= a) & (t + shift <= b)
    return mask
