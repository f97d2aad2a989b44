"""Compiled inner loops.

All kernels release the GIL so that callers can fan work out over a thread
pool. Each kernel writes only to output slots indexed by its own work items;
status codes are 0 for success and 1 when an iterate landed exactly on the
equator.
"""

import math

import numpy as np
from numba import njit

TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi

OK = 0
BOUNDARY = 1


@njit(cache=True, nogil=True, inline="always")
def _step(x, y, z, ca, sa, cb, sb):
    x1 = ca * x - sa * y
    y1 = sa * x + ca * y
    z1 = z
    if y1 > 0.0:
        x1 = -x1
        y1 = -y1
    x2 = x1
    y2 = cb * y1 - sb * z1
    z2 = sb * y1 + cb * z1
    if y2 > 0.0:
        y2 = -y2
        z2 = -z2
    return x1, y1, z1, x2, y2, z2


@njit(cache=True, nogil=True, inline="always")
def _inv_step(x, y, z, ca, sa, cb, sb):
    y1 = cb * y + sb * z
    z1 = -sb * y + cb * z
    x1 = x
    if y1 > 0.0:
        y1 = -y1
        z1 = -z1
    x2 = ca * x1 + sa * y1
    y2 = -sa * x1 + ca * y1
    z2 = z1
    if y2 > 0.0:
        x2 = -x2
        y2 = -y2
    return x1, y1, z1, x2, y2, z2


@njit(cache=True, nogil=True, inline="always")
def _angle(x, z):
    a = math.atan2(z, x)
    if a < 0.0:
        a += TWO_PI
        if a >= TWO_PI:
            a = 0.0
    return a


@njit(cache=True, nogil=True, inline="always")
def _d1_angle(x, z):
    # measured from the +z axis, the first rotation axis
    a = _angle(x, z) - HALF_PI
    if a < 0.0:
        a += TWO_PI
        if a >= TWO_PI:
            a = 0.0
    return a


@njit(cache=True, nogil=True)
def accumulate(pts, ca, sa, cb, sb, has_d1, sin_eps, n_iter, n1, n2, status):
    """Count near-line traces 0..n_iter for every point.

    Traces are the iterates' passes through the map; trace 0 is the first
    application to the seed itself.
    """
    for k in range(pts.shape[0]):
        x = pts[k, 0]
        y = pts[k, 1]
        z = pts[k, 2]
        c1 = 0
        c2 = 0
        st = OK
        for _ in range(n_iter + 1):
            x1, y1, z1, x, y, z = _step(x, y, z, ca, sa, cb, sb)
            if y1 == 0.0 or y == 0.0:
                st = BOUNDARY
                break
            if has_d1 and abs(y1) <= sin_eps:
                c1 += 1
            if abs(y) <= sin_eps:
                c2 += 1
        n1[k] = c1
        n2[k] = c2
        status[k] = st


@njit(cache=True, nogil=True)
def first_hit(pts, ca, sa, cb, sb, has_d1, sin_eps, n_iter, hit, status):
    """Index of the first near-line trace, or -1 if none within n_iter + 1."""
    for k in range(pts.shape[0]):
        x = pts[k, 0]
        y = pts[k, 1]
        z = pts[k, 2]
        h = -1
        st = OK
        for i in range(n_iter + 1):
            x1, y1, z1, x, y, z = _step(x, y, z, ca, sa, cb, sb)
            if y1 == 0.0 or y == 0.0:
                st = BOUNDARY
                break
            if (has_d1 and abs(y1) <= sin_eps) or abs(y) <= sin_eps:
                h = i
                break
        hit[k] = h
        status[k] = st


@njit(cache=True, nogil=True)
def return_rows(pts, rows, ca, sa, cb, sb, has_d1, sin_eps, n_iter, n_bins, dtheta, hist, status):
    """Accumulate sided return counts of each seed into ``hist[rows[k]]``.

    A seed's returns are buffered and committed only if its orbit never hit
    the equator exactly, so a failed seed leaves ``hist`` untouched.
    """
    buf = np.zeros(n_bins, dtype=np.int64)
    half = n_bins // 2
    for k in range(pts.shape[0]):
        x = pts[k, 0]
        y = pts[k, 1]
        z = pts[k, 2]
        buf[:] = 0
        st = OK
        for _ in range(n_iter + 1):
            x1, y1, z1, x, y, z = _step(x, y, z, ca, sa, cb, sb)
            if y1 == 0.0 or y == 0.0:
                st = BOUNDARY
                break
            if has_d1 and abs(y1) <= sin_eps:
                j = int((TWO_PI + _d1_angle(x1, z1)) / dtheta)
                if j >= n_bins:
                    j = n_bins - 1
                if j < half:
                    j = half
                buf[j] += 1
            if abs(y) <= sin_eps:
                j = int(_angle(x, z) / dtheta)
                if j >= half:
                    j = half - 1
                buf[j] += 1
        status[k] = st
        if st == OK:
            r = rows[k]
            for j in range(n_bins):
                hist[r, j] += buf[j]


@njit(cache=True, nogil=True)
def pull_back(pts, ca, sa, cb, sb, n_iter, out, status):
    """Apply the inverse map ``n_iter`` times to each point."""
    for k in range(pts.shape[0]):
        x = pts[k, 0]
        y = pts[k, 1]
        z = pts[k, 2]
        st = OK
        for _ in range(n_iter):
            x1, y1, z1, x, y, z = _inv_step(x, y, z, ca, sa, cb, sb)
            if y1 == 0.0 or y == 0.0:
                st = BOUNDARY
                break
        out[k, 0] = x
        out[k, 1] = y
        out[k, 2] = z
        status[k] = st


@njit(cache=True, nogil=True)
def push_forward(pts, ca, sa, cb, sb, n_iter, out, status):
    """Apply the forward map ``n_iter`` times to each point."""
    for k in range(pts.shape[0]):
        x = pts[k, 0]
        y = pts[k, 1]
        z = pts[k, 2]
        st = OK
        for _ in range(n_iter):
            x1, y1, z1, x, y, z = _step(x, y, z, ca, sa, cb, sb)
            if y1 == 0.0 or y == 0.0:
                st = BOUNDARY
                break
        out[k, 0] = x
        out[k, 1] = y
        out[k, 2] = z
        status[k] = st
