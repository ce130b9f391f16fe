"""Moving-frame differential invariants of curves and surfaces."""

__version__ = "0.1.0"
