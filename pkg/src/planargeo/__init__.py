"""Planar graphs refined by geodesic distance: recursions, closed forms, oracles."""

__version__ = "0.1.0"
