"""Rational points near planar curves with curvature bounded away from 0 and infinity."""

__version__ = "0.1.0"
