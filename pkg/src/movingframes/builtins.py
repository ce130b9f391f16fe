"""
Catalog of named curves and surfaces.

Names may carry numeric arguments in call syntax, e.g. ``circle(2)``,
``ellipse(3, 1)`` or ``torus_of_revolution(2, 1)``; omitted arguments take
the defaults listed in :data:`CURVES` and :data:`SURFACES`.
"""

import re

import numpy as np

from .curves import AnalyticCurve
from .errors import DomainError
from .surfaces import AnalyticSurface

TWO_PI = 2.0 * np.pi


def _line():
    return AnalyticCurve(["t", "0.5*t"], domain=(-1.0, 1.0), name="line")


def _circle(r=1.0):
    return AnalyticCurve([f"{r!r}*cos(t)", f"{r!r}*sin(t)"], domain=(0.0, TWO_PI),
                         periodic=True, name=f"circle({r!r})")


def _ellipse(a=2.0, b=1.0):
    return AnalyticCurve([f"{a!r}*cos(t)", f"{b!r}*sin(t)"], domain=(0.0, TWO_PI),
                         periodic=True, name=f"ellipse({a!r}, {b!r})")


def _parabola():
    return AnalyticCurve(["t", "t^2/2"], domain=(-1.0, 1.0), name="parabola")


def _hyperbola():
    return AnalyticCurve(["(exp(t)+exp(-t))/2", "(exp(t)-exp(-t))/2"], domain=(-1.0, 1.0),
                         name="hyperbola")


def _log_spiral(a=0.2):
    return AnalyticCurve([f"exp({a!r}*t)*cos(t)", f"exp({a!r}*t)*sin(t)"],
                         domain=(0.0, TWO_PI), name=f"log_spiral({a!r})")


def _twisted_cubic():
    return AnalyticCurve(["t", "t^2", "t^3"], domain=(0.5, 1.5), name="twisted_cubic")


def _clifford_torus():
    r = "sqrt(2)"
    return AnalyticSurface([f"cos(u)/{r}", f"sin(u)/{r}", f"cos(v)/{r}", f"sin(v)/{r}"],
                           domain=((0.0, TWO_PI), (0.0, TWO_PI)), periodic=(True, True),
                           name="clifford_torus")


def _round_sphere(r=1.0):
    # the poles are excluded: the spherical parametrization degenerates there
    return AnalyticSurface([f"{r!r}*sin(v)*cos(u)", f"{r!r}*sin(v)*sin(u)", f"{r!r}*cos(v)"],
                           domain=((0.0, TWO_PI), (0.1, np.pi - 0.1)), periodic=(True, False),
                           name=f"round_sphere({r!r})")


def _torus_of_revolution(R=2.0, r=1.0):
    if not R > r > 0:
        raise DomainError("torus_of_revolution needs R > r > 0")
    return AnalyticSurface([f"({R!r}+{r!r}*cos(v))*cos(u)", f"({R!r}+{r!r}*cos(v))*sin(u)",
                            f"{r!r}*sin(v)"],
                           domain=((0.0, TWO_PI), (0.0, TWO_PI)), periodic=(True, True),
                           name=f"torus_of_revolution({R!r}, {r!r})")


CURVES = {
    "line": _line,
    "circle": _circle,
    "ellipse": _ellipse,
    "parabola": _parabola,
    "hyperbola": _hyperbola,
    "log_spiral": _log_spiral,
    "twisted_cubic": _twisted_cubic,
}

SURFACES = {
    "clifford_torus": _clifford_torus,
    "round_sphere": _round_sphere,
    "torus_of_revolution": _torus_of_revolution,
}

_CALL = re.compile(r"^\s*([A-Za-z_]\w*)\s*(?:\((.*)\))?\s*$")


def parse_name(spec):
    """Split ``"name(a, b)"`` into ``("name", (a, b))``."""
    m = _CALL.match(spec)
    if not m:
        raise DomainError(f"malformed builtin name {spec!r}")
    name, args = m.group(1), m.group(2)
    if args is None or not args.strip():
        return name, ()
    try:
        return name, tuple(float(a) for a in args.split(","))
    except ValueError:
        raise DomainError(f"builtin arguments must be numbers: {spec!r}") from None


def _build(table, spec, kind):
    name, args = parse_name(spec)
    if name not in table:
        raise DomainError(f"unknown builtin {kind} {name!r}; choose from {', '.join(table)}")
    try:
        return table[name](*args)
    except TypeError:
        raise DomainError(f"wrong number of arguments for {name!r}") from None


def curve(spec):
    """Builtin curve by name, e.g. ``curve("ellipse(3, 1)")``."""
    return _build(CURVES, spec, "curve")


def surface(spec):
    """Builtin surface by name, e.g. ``surface("torus_of_revolution(2, 1)")``."""
    return _build(SURFACES, spec, "surface")


def is_surface(spec):
    return parse_name(spec)[0] in SURFACES


def torus_willmore(R, r):
    """Closed-form Willmore energy ``pi^2 x^2 / sqrt(x^2 - 1)``, ``x = R / r``."""
    x = R / r
    return np.pi**2 * x**2 / np.sqrt(x * x - 1.0)
