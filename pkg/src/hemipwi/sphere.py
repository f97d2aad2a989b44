"""Primitive geometry on the unit sphere.

Points are plain ``ndarray`` objects whose last axis has length 3 and holds
``(x, y, z)``. Every function broadcasts over leading axes. The model domain
is the lower hemisphere ``y <= 0``; its boundary circle ``y = 0`` is called
the equator throughout the package.

The equal-area projection used for rasters is the Lambert azimuthal
projection centred on the bottom pole ``(0, -1, 0)``. The projected disk has
its physical radius ``sqrt(2)``.
"""

import numpy as np

LAMBERT_RADIUS = np.sqrt(2.0)


def as_points(p):
    p = np.asarray(p, dtype=float)
    if p.shape[-1] != 3:
        raise ValueError(f"expected trailing axis of length 3, got shape {p.shape}")
    return p


def normalize(p):
    p = as_points(p)
    return p / np.linalg.norm(p, axis=-1, keepdims=True)


_QUARTER_TURNS = ((1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0))


def cos_sin(theta):
    """``(cos, sin)`` of a scalar angle, exact at multiples of a quarter turn.

    Library trig leaves ``cos(pi/2)`` at about 6e-17, which would keep
    quarter-turn protocols from ever landing exactly on the equator.
    """
    theta = float(theta)
    k = round(theta / (0.5 * np.pi))
    if abs(theta - k * 0.5 * np.pi) <= 4.0 * np.finfo(float).eps * max(1.0, abs(theta)):
        return _QUARTER_TURNS[k % 4]
    return float(np.cos(theta)), float(np.sin(theta))


def rotate_z(p, theta):
    """Right-handed rotation of ``p`` about +z by ``theta`` radians."""
    p = as_points(p)
    c, s = cos_sin(theta)
    x, y, z = p[..., 0], p[..., 1], p[..., 2]
    return np.stack([c * x - s * y, s * x + c * y, z], axis=-1)


def rotate_x(p, theta):
    """Right-handed rotation of ``p`` about +x by ``theta`` radians."""
    p = as_points(p)
    c, s = cos_sin(theta)
    x, y, z = p[..., 0], p[..., 1], p[..., 2]
    return np.stack([x, c * y - s * z, s * y + c * z], axis=-1)


def geodesic_distance(p, q):
    dot = np.sum(as_points(p) * as_points(q), axis=-1)
    return np.arccos(np.clip(dot, -1.0, 1.0))


def plane_distance(p, n):
    """Geodesic distance from ``p`` to the great circle with unit normal ``n``."""
    dot = np.sum(as_points(p) * as_points(n), axis=-1)
    return np.arcsin(np.clip(np.abs(dot), 0.0, 1.0))


def lambert_project(p):
    """Project hemisphere points to the equal-area disk.

    Returns an array with trailing axis ``(u, v)``; ``u`` follows x and ``v``
    follows z, so the image is the hemisphere seen from below.
    """
    p = as_points(p)
    y = p[..., 1]
    if np.any(y > 1e-12):
        raise ValueError("lambert_project expects points with y <= 0")
    k = np.sqrt(2.0 / (1.0 - np.minimum(y, 0.0)))
    return np.stack([k * p[..., 0], k * p[..., 2]], axis=-1)


def lambert_inverse(c):
    c = np.asarray(c, dtype=float)
    r2 = c[..., 0] ** 2 + c[..., 1] ** 2
    if np.any(r2 > 2.0 + 1e-12):
        raise ValueError("disk coordinates outside the radius sqrt(2) disk")
    r2 = np.minimum(r2, 2.0)
    k = np.sqrt(1.0 - r2 / 4.0)
    return np.stack([k * c[..., 0], r2 / 2.0 - 1.0, k * c[..., 1]], axis=-1)


def equator_angle(p):
    """Angle ``atan2(z, x)`` in ``[0, 2*pi)``; zero on the +x axis.

    Raises ``ValueError`` at the poles ``(0, +-1, 0)`` where the direction is
    undefined.
    """
    p = as_points(p)
    x, z = p[..., 0], p[..., 2]
    if np.any((x == 0.0) & (z == 0.0)):
        raise ValueError("equator_angle is undefined at the poles x = z = 0")
    a = np.mod(np.arctan2(z, x), 2.0 * np.pi)
    # mod can round a tiny negative angle up to exactly 2*pi
    return np.where(a >= 2.0 * np.pi, 0.0, a)


def cap_area(half_angle):
    """Area of a spherical cap of geodesic radius ``half_angle``."""
    return 2.0 * np.pi * (1.0 - np.cos(half_angle))
