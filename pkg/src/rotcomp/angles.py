"""Angle arithmetic on the circle.

Angles are degrees, canonically wrapped into [-180, 180). The angle domain
is circular: -180 and 180 denote the same rotation, and distances are
measured along the shorter arc.
"""

from __future__ import annotations

import numpy as np

__all__ = ["wrap_angle", "wrapped_distance"]


def wrap_angle(theta):
    """Wrap an angle (or array of angles) into [-180, 180)."""
    wrapped = np.mod(np.asarray(theta, dtype=float) + 180.0, 360.0) - 180.0
    if np.ndim(theta) == 0:
        return float(wrapped)
    return wrapped


def wrapped_distance(a, b):
    """Shortest angular distance between two angles, in [0, 180].

    Works elementwise on arrays with broadcasting.
    """
    d = np.mod(np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)), 360.0)
    d = np.minimum(d, 360.0 - d)
    if np.ndim(a) == 0 and np.ndim(b) == 0:
        return float(d)
    return d
