import numpy as np
import pytest

from movingframes import builtins
from movingframes.curves import AnalyticCurve
from movingframes.surfaces import AnalyticSurface

TWO_PI = 2.0 * np.pi


@pytest.fixture
def ellipse():
    return AnalyticCurve(["2*cos(t)", "sin(t)"], domain=(0.0, TWO_PI), periodic=True)


@pytest.fixture
def twisted_cubic():
    return builtins.curve("twisted_cubic")


@pytest.fixture
def clifford():
    return builtins.surface("clifford_torus")


@pytest.fixture
def sphere():
    return builtins.surface("round_sphere(2)")


def spherical_curve():
    """An arc of Viviani's curve, which lies on the sphere of radius 2."""
    return AnalyticCurve(["1+cos(t)", "sin(t)", "2*sin(t/2)"], domain=(0.3, 2.5))


def ellipsoid():
    return AnalyticSurface(["3*sin(v)*cos(u)", "2*sin(v)*sin(u)", "cos(v)"],
                           domain=((0.0, TWO_PI), (0.05, np.pi - 0.05)), periodic=(True, False))


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
