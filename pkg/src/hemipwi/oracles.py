"""Closed-form references for single-axis protocols ``(phi, 0)``.

With ``beta = 0`` the map is a rigid rotation about z, folded back at the
equator, so every orbit stays on its circle of constant height ``z``. The
visible part of that circle has arc length ``pi * sqrt(1 - z**2)`` and an
orbit of an irrational rotation spends a fraction ``2 eps / l(z)`` of its time
within ``eps`` of the cutting line.
"""

from dataclasses import dataclass
from math import gcd

import numpy as np


@dataclass(frozen=True)
class SingleAxisProtocol:
    """Rotation by ``phi`` about z only.

    ``rational`` is ``None`` for an irrational ``phi / pi`` or the reduced pair
    ``(p, q)`` with ``phi / pi = p / q``. Rationality is declared, never
    inferred from the float.
    """

    phi: float
    rational: tuple | None = None

    def __post_init__(self):
        if self.rational is not None:
            p, q = self.rational
            if q < 1 or gcd(p, q) != 1:
                raise ValueError(f"rational pair {self.rational} must be reduced with q >= 1")

    @classmethod
    def irrational(cls, phi):
        return cls(float(phi), None)

    @classmethod
    def from_fraction(cls, p, q):
        g = gcd(p, q)
        p, q = p // g, q // g
        return cls(np.pi * p / q, (p, q))

    @property
    def is_rational(self):
        return self.rational is not None


def arc_length_l(z):
    z = np.asarray(z, dtype=float)
    if np.any(np.abs(z) >= 1.0):
        raise ValueError("arc_length_l needs |z| < 1")
    out = np.pi * np.sqrt(1.0 - z**2)
    return out if out.ndim else float(out)


def analytic_rho(z, eps):
    """Cutting-line density on the height-``z`` orbit, saturating at 1."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    l = np.asarray(arc_length_l(z))
    out = np.where(2.0 * eps < l, 2.0 * eps / l, 1.0)
    return out if out.ndim else float(out)


def analytic_phi(p):
    """Limiting coverage: 1 for an irrational rotation, 0 for a rational one."""
    return 0.0 if p.is_rational else 1.0


def cut_height(theta):
    """Height ``z`` of the seed with cut parameter ``theta`` when ``beta = 0``.

    D2 angles start on the +x axis (``z = sin theta``) and D1 angles on the
    +z axis (``z = cos(theta - 2 pi)``).
    """
    theta = np.asarray(theta, dtype=float)
    return np.where(theta < 2.0 * np.pi, np.sin(theta), np.cos(theta - 2.0 * np.pi))
