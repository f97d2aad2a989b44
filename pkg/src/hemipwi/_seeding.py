"""Sided seeds on the cutting lines, with bounded re-jitter of bad seeds."""

import numpy as np

from .pwi import FOUR_PI, BoundaryPoint, param_point

GOLDEN = 0.5 * (np.sqrt(5.0) - 1.0)
MAX_RETRIES = 8


def seed_points(theta, delta, prot):
    """``param_point`` over an array, returning ``(points, ok)`` instead of raising."""
    theta = np.asarray(theta, dtype=float)
    try:
        return param_point(theta, delta, prot), np.ones(theta.shape, dtype=bool)
    except BoundaryPoint:
        pass
    pts = np.full(theta.shape + (3,), np.nan)
    ok = np.zeros(theta.shape, dtype=bool)
    for k, t in enumerate(theta):
        try:
            pts[k] = param_point(t, delta, prot)
            ok[k] = True
        except BoundaryPoint:
            pass
    return pts, ok


def run_seeds(lo, width, frac, delta, prot, run):
    """Seed at ``lo + frac * width`` and call ``run(index, theta, points) -> status``.

    Seeds whose construction or orbit hits the equator are moved along
    their cell by a golden-ratio step and retried up to MAX_RETRIES times.
    Returns ``(substituted, dropped)``: seeds that needed at least one move,
    and seeds that still failed after the last retry.
    """
    lo = np.asarray(lo, dtype=float)
    frac = np.array(frac, dtype=float)
    idx = np.arange(lo.size)
    substituted = 0
    for attempt in range(MAX_RETRIES + 1):
        theta = np.minimum(lo[idx] + frac[idx] * width, np.nextafter(FOUR_PI, 0.0))
        pts, ok = seed_points(theta, delta, prot)
        status = np.ones(idx.size, dtype=np.int8)
        if np.any(ok):
            status[ok] = run(idx[ok], theta[ok], np.ascontiguousarray(pts[ok]))
        idx = idx[status != 0]
        if attempt == 0:
            substituted = idx.size
        if idx.size == 0:
            break
        frac[idx] = np.mod(frac[idx] + GOLDEN, 1.0)
    return substituted, int(idx.size)
