"""The bi-rotated hemisphere piecewise isometry.

One iteration rotates the lower hemisphere by ``alpha`` about z, folds any
point that crossed the equator back by an extra half turn, then does the
same about x with ``beta``. The four atoms are labelled by which of the two
stages needed the fold.

Cut-line coordinates
--------------------
A cut parameter ``theta`` in ``[0, 4*pi)`` addresses a sided point on the
cutting lines. ``[0, 2*pi)`` is the second-stage line D2, measured along the
equator of the *final* frame from the +x axis (the second rotation axis).
``[2*pi, 4*pi)`` is the first-stage line D1, measured along the equator of
the *intermediate* frame from the +z axis (the first rotation axis). The two
sides of each physical line are two distinct equator points, so every
parameter value names exactly one side.
"""

import enum
from dataclasses import dataclass

import numpy as np
from scipy.spatial.transform import Rotation

from .sphere import as_points, equator_angle, rotate_x, rotate_z

TWO_PI = 2.0 * np.pi
FOUR_PI = 4.0 * np.pi


class BoundaryPoint(ValueError):
    """A point landed exactly on the equator, where the map is multivalued."""


@dataclass(frozen=True)
class Protocol:
    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if not (0.0 <= v < np.pi):
                raise ValueError(f"{name}={v!r} outside [0, pi)")

    @classmethod
    def from_degrees(cls, alpha_deg, beta_deg):
        return cls(np.deg2rad(alpha_deg), np.deg2rad(beta_deg))

    @property
    def degrees(self):
        return float(np.rad2deg(self.alpha)), float(np.rad2deg(self.beta))

    @property
    def has_d1(self):
        # a zero first rotation never carries anything across the equator
        return self.alpha != 0.0


class Atom(enum.IntEnum):
    P1 = 1
    P2 = 2
    P3 = 3
    P4 = 4

    @property
    def flips(self):
        return {1: (False, False), 2: (True, False), 3: (False, True), 4: (True, True)}[self.value]


@dataclass
class StepTrace:
    intermediate: np.ndarray
    final: np.ndarray
    flip1: np.ndarray
    flip2: np.ndarray

    @property
    def atom(self):
        code = 1 + np.asarray(self.flip1, dtype=int) + 2 * np.asarray(self.flip2, dtype=int)
        if np.ndim(code) == 0:
            return Atom(int(code))
        return code


def _fold_z(q):
    # half turn about z: (x, y, z) -> (-x, -y, z)
    return q * np.array([-1.0, -1.0, 1.0])


def _fold_x(q):
    return q * np.array([1.0, -1.0, -1.0])


def forward(p, prot):
    """Apply one iteration of the map, keeping the intermediate frame.

    Raises BoundaryPoint if either stage lands exactly on ``y = 0``.
    """
    p = as_points(p)
    q = rotate_z(p, prot.alpha)
    flip1 = q[..., 1] > 0.0
    q = np.where(flip1[..., None], _fold_z(q), q)
    r = rotate_x(q, prot.beta)
    flip2 = r[..., 1] > 0.0
    r = np.where(flip2[..., None], _fold_x(r), r)
    if np.any(q[..., 1] == 0.0) or np.any(r[..., 1] == 0.0):
        raise BoundaryPoint("a stage of the map landed exactly on the equator")
    return StepTrace(q, r, flip1, flip2)


def _undo_x(p, beta):
    q = rotate_x(p, -beta)
    q = np.where((q[..., 1] > 0.0)[..., None], _fold_x(q), q)
    if np.any(q[..., 1] == 0.0):
        raise BoundaryPoint("inverse x stage landed exactly on the equator")
    return q


def _undo_z(p, alpha):
    q = rotate_z(p, -alpha)
    q = np.where((q[..., 1] > 0.0)[..., None], _fold_z(q), q)
    if np.any(q[..., 1] == 0.0):
        raise BoundaryPoint("inverse z stage landed exactly on the equator")
    return q


def inverse(p, prot):
    return _undo_z(_undo_x(as_points(p), prot.beta), prot.alpha)


def cutline_distances(p, prot):
    """Geodesic distances ``(d1, d2)`` from ``p`` to the two cutting lines.

    D1 is measured in the intermediate frame and D2 in the final frame; each
    stage is an isometry near ``p`` so the distances carry over. ``d1`` is
    ``inf`` when ``alpha == 0`` because D1 is then empty.
    """
    tr = forward(p, prot)
    d2 = np.arcsin(np.minimum(np.abs(tr.final[..., 1]), 1.0))
    if prot.has_d1:
        d1 = np.arcsin(np.minimum(np.abs(tr.intermediate[..., 1]), 1.0))
    else:
        d1 = np.full_like(d2, np.inf)
    return d1, d2


def equator_offset_point(phi, delta):
    """The point just inside the equator at angle ``phi``, offset by ``delta``."""
    phi = np.asarray(phi, dtype=float)
    e = np.stack([np.cos(phi), np.full_like(phi, -delta), np.sin(phi)], axis=-1)
    return e / np.linalg.norm(e, axis=-1, keepdims=True)


def cut_to_equator(theta):
    """Split a cut parameter into (line index, equator angle in its frame)."""
    theta = np.asarray(theta, dtype=float)
    if np.any((theta < 0.0) | (theta >= FOUR_PI)):
        raise ValueError("cut parameter outside [0, 4*pi)")
    on_d1 = theta >= TWO_PI
    phi = np.where(on_d1, theta - TWO_PI + 0.5 * np.pi, theta)
    return np.where(on_d1, 1, 2), np.mod(phi, TWO_PI)


def param_point(theta, delta, prot):
    """Seed point ``delta`` away from the cutting line addressed by ``theta``.

    The seed is built at the offset equator point of the relevant frame and
    pulled back through the inverse stages, which picks the side
    automatically.
    """
    line, phi = cut_to_equator(theta)
    e = equator_offset_point(phi, delta)
    out = np.empty_like(e)
    m2 = line == 2
    if np.any(m2):
        out[m2] = inverse(e[m2], prot)
    if np.any(~m2):
        out[~m2] = _undo_z(e[~m2], prot.alpha)
    return out


def d1_param(intermediate):
    """Cut parameter of an intermediate-frame point near the D1 equator."""
    psi = np.mod(equator_angle(intermediate) - 0.5 * np.pi, TWO_PI)
    psi = np.where(psi >= TWO_PI, 0.0, psi)
    return TWO_PI + psi


def return_bins(trace, eps, prot=None):
    """Sided cut parameters a near-line trace is charged to.

    Works on a single trace and returns a list with zero, one or two
    parameters: D1 first (``[2*pi, 4*pi)``) then D2 (``[0, 2*pi)``). When
    ``prot`` is given with ``alpha == 0`` no D1 return is emitted.
    """
    s = np.sin(eps)
    out = []
    if (prot is None or prot.has_d1) and abs(trace.intermediate[1]) <= s:
        out.append(float(d1_param(trace.intermediate)))
    if abs(trace.final[1]) <= s:
        out.append(float(equator_angle(trace.final)))
    return out


def stepwise_oracle_map(p, prot):
    """Reference map built from whole-sphere rotations and explicit folds.

    Independent of ``forward``: uses scipy rotation objects and folds by a
    separate half-turn rotation.
    """
    p = as_points(p)
    rz = Rotation.from_rotvec([0.0, 0.0, prot.alpha])
    half_z = Rotation.from_rotvec([0.0, 0.0, np.pi])
    rx = Rotation.from_rotvec([prot.beta, 0.0, 0.0])
    half_x = Rotation.from_rotvec([np.pi, 0.0, 0.0])

    flat = p.reshape(-1, 3)
    q = rz.apply(flat)
    up = q[:, 1] > 0.0
    q[up] = half_z.apply(q[up])
    r = rx.apply(q)
    up = r[:, 1] > 0.0
    r[up] = half_x.apply(r[up])
    if np.any(q[:, 1] == 0.0) or np.any(r[:, 1] == 0.0):
        raise BoundaryPoint("a stage of the map landed exactly on the equator")
    return r.reshape(p.shape)
