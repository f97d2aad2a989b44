"""Cutting-line density over the equal-area raster.

Every pixel centre of the Lambert disk is iterated forward and the number of
traces that pass within ``eps`` of each cutting line is recorded. Those two
integer counters are all the later colouring and coverage steps need.
"""

import ast
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from ._parallel import run_chunks
from .pwi import BoundaryPoint
from .sphere import LAMBERT_RADIUS, as_points, cos_sin, lambert_inverse

WHITE = np.array([255, 255, 255], dtype=np.uint8)


def pixel_centers(resolution):
    """Hemisphere points at the pixel centres of a ``resolution``-square raster.

    Row 0 is the top of the image (largest ``v``). Returns ``(points, inside)``
    with ``points`` of shape ``(R, R, 3)``; pixels outside the disk get NaN.
    """
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    h = 2.0 * LAMBERT_RADIUS / resolution
    c = -LAMBERT_RADIUS + (np.arange(resolution) + 0.5) * h
    u, v = np.meshgrid(c, c[::-1])
    inside = u**2 + v**2 < 2.0
    pts = np.full((resolution, resolution, 3), np.nan)
    pts[inside] = lambert_inverse(np.stack([u[inside], v[inside]], axis=-1))
    return pts, inside


def kernel_args(prot):
    return cos_sin(prot.alpha) + cos_sin(prot.beta)


def count_returns(pts, prot, eps, n_iter, workers=1):
    """Raw near-line counters for an ``(n, 3)`` array of points.

    Returns ``(n1, n2, status)``; ``status`` is nonzero where the orbit hit
    the equator exactly.
    """
    pts = np.ascontiguousarray(as_points(pts).reshape(-1, 3))
    n = pts.shape[0]
    n1 = np.zeros(n, dtype=np.int64)
    n2 = np.zeros(n, dtype=np.int64)
    status = np.zeros(n, dtype=np.int8)
    ca, sa, cb, sb = kernel_args(prot)
    sin_eps = np.sin(eps)

    def work(a, b):
        _kernels.accumulate(pts[a:b], ca, sa, cb, sb, prot.has_d1, sin_eps, int(n_iter),
                            n1[a:b], n2[a:b], status[a:b])

    run_chunks(work, n, workers)
    return n1, n2, status


def accumulate(p, prot, eps, n_iter):
    """Near-line counts ``(n1, n2)`` over traces ``0..n_iter`` of the orbit of ``p``.

    Accepts one point or an array of points. Raises BoundaryPoint if any
    orbit lands exactly on the equator.
    """
    p = as_points(p)
    n1, n2, status = count_returns(p, prot, eps, n_iter)
    if np.any(status):
        raise BoundaryPoint("orbit landed exactly on the equator")
    shape = p.shape[:-1]
    if shape == ():
        return int(n1[0]), int(n2[0])
    return n1.reshape(shape), n2.reshape(shape)


def hue(n1, n2):
    """Fraction of near-line passes that were near D1; NaN where undefined."""
    n1 = np.asarray(n1, dtype=float)
    n2 = np.asarray(n2, dtype=float)
    tot = n1 + n2
    with np.errstate(invalid="ignore", divide="ignore"):
        h = np.where(tot > 0, n1 / tot, np.nan)
    return h if h.ndim else float(h)


def lightness(n1, n2, n_iter, eps):
    """Total cutting-line density normalised by ``eps``."""
    out = (np.asarray(n1, dtype=float) + np.asarray(n2, dtype=float)) / ((n_iter + 1) * eps)
    return out if out.ndim else float(out)


@dataclass
class DensityGrid:
    resolution: int
    n1: np.ndarray
    n2: np.ndarray
    valid: np.ndarray
    params: dict = field(default_factory=dict)

    @property
    def defined(self):
        return self.valid & (self.n1 + self.n2 > 0)

    @property
    def n_invalid_in_disk(self):
        _, inside = pixel_centers(self.resolution)
        return int(np.count_nonzero(inside & ~self.valid))

    def hue(self):
        return np.where(self.valid, hue(self.n1, self.n2), np.nan)

    def lightness(self):
        return lightness(self.n1, self.n2, self.params["n_iter"], self.params["eps"])

    def scatter(self):
        """``(H, L/eps)`` pairs of all defined pixels, for hue-density plots."""
        m = self.defined
        return self.hue()[m], self.lightness()[m]


def density_grid(prot, eps, n_iter, resolution, workers=1):
    pts, inside = pixel_centers(resolution)
    n1 = np.zeros((resolution, resolution), dtype=np.int64)
    n2 = np.zeros_like(n1)
    c1, c2, status = count_returns(pts[inside], prot, eps, n_iter, workers)
    n1[inside] = c1
    n2[inside] = c2
    valid = inside.copy()
    valid[inside] = status == 0
    n1[~valid] = 0
    n2[~valid] = 0
    params = {"alpha": prot.alpha, "beta": prot.beta, "eps": eps, "n_iter": int(n_iter)}
    return DensityGrid(resolution, n1, n2, valid, params)


def hsl_to_rgb(h, s, l):
    """Vectorised HSL to RGB, all channels in ``[0, 1]`` and ``h`` in turns."""
    h = np.asarray(h, dtype=float)
    c = (1.0 - np.abs(2.0 * l - 1.0)) * s
    hp = np.mod(h, 1.0) * 6.0
    x = c * (1.0 - np.abs(np.mod(hp, 2.0) - 1.0))
    zero = np.zeros_like(hp)
    sector = np.floor(hp).astype(int) % 6
    r = np.choose(sector, [c, x, zero, zero, x, c])
    g = np.choose(sector, [x, c, c, x, zero, zero])
    b = np.choose(sector, [zero, zero, x, c, c, x])
    m = l - c / 2.0
    return np.stack([r + m, g + m, b + m], axis=-1)


def colorize(grid, saturation=1.0, percentile=99.0):
    """RGB image of a density grid: hue from blue (D2) to red (D1) via magenta.

    Lightness runs from white at zero density to the fully saturated colour
    at the ``percentile``-th density over defined pixels.
    """
    m = grid.defined
    img = np.empty((grid.resolution, grid.resolution, 3), dtype=np.uint8)
    img[:] = WHITE
    if not np.any(m):
        return img
    lum = grid.lightness()[m]
    top = np.percentile(lum, percentile)
    frac = np.clip(lum / top, 0.0, 1.0) if top > 0 else np.ones_like(lum)
    # 240 deg is blue, 300 deg magenta, 360 deg red
    turns = (240.0 + 120.0 * grid.hue()[m]) / 360.0
    rgb = hsl_to_rgb(turns, saturation, 1.0 - 0.5 * frac)
    img[m] = np.round(255.0 * np.clip(rgb, 0.0, 1.0)).astype(np.uint8)
    return img


def render_exceptional_set(prot, eps, n_iter, resolution, workers=1):
    """Colour the ``n_iter``-step approximation of the exceptional set.

    Returns ``(image, grid)``; the image is ``(R, R, 3)`` uint8 and invalid
    pixels are white (their count is ``grid.n_invalid_in_disk``).
    """
    grid = density_grid(prot, eps, n_iter, resolution, workers)
    return colorize(grid), grid


def ergodicity_screen(grid, hue_spread=0.1, lightness_cv=0.5):
    """Flag a protocol as non-ergodic from its hue/lightness population.

    Only ever proves non-ergodicity; an unflagged protocol is merely not
    ruled out.
    """
    h, lum = grid.scatter()
    hs = float(np.std(h)) if h.size else 0.0
    cv = float(np.std(lum) / np.mean(lum)) if lum.size else 0.0
    return {"hue_std": hs, "lightness_cv": cv, "nonergodic": hs > hue_spread or cv > lightness_cv}


def default_pattern(p):
    """Grey level ``(1 + cos phi)/2`` of the equator angle, inverted on alternate z bands."""
    p = as_points(p)
    g = 0.5 * (1.0 + np.cos(np.arctan2(p[..., 2], p[..., 0])))
    band = np.floor(3.0 * (p[..., 2] + 1.0)).astype(int) % 2
    return np.where(band == 1, 1.0 - g, g)


PATTERN_NAMES = {"np", "x", "y", "z", "phi"}


def pattern_from_expression(expr):
    """Build a pattern from an expression in ``x, y, z, phi`` and numpy as ``np``.

    Only those names and public attributes of ``np`` may appear.
    """
    tree = ast.parse(expr, mode="eval")
    for node in ast.walk(tree):
        if isinstance(node, ast.Name) and node.id not in PATTERN_NAMES:
            raise ValueError(f"name {node.id!r} not allowed in a pattern expression")
        if isinstance(node, ast.Attribute):
            if not (isinstance(node.value, ast.Name) and node.value.id == "np") \
                    or node.attr.startswith("_"):
                raise ValueError(f"attribute {node.attr!r} not allowed in a pattern expression")
    code = compile(tree, "<pattern>", "eval")

    def pattern(p):
        p = as_points(p)
        env = {"np": np, "x": p[..., 0], "y": p[..., 1], "z": p[..., 2],
               "phi": np.arctan2(p[..., 2], p[..., 0])}
        v = eval(code, {"__builtins__": {}}, env)
        return np.clip(np.broadcast_to(np.asarray(v, dtype=float), p.shape[:-1]), 0.0, 1.0)

    return pattern


def pull_back(pts, prot, n_iter, workers=1):
    """``M^-n_iter`` of each point, with a status flag per point."""
    pts = np.ascontiguousarray(as_points(pts).reshape(-1, 3))
    out = np.empty_like(pts)
    status = np.zeros(pts.shape[0], dtype=np.int8)
    ca, sa, cb, sb = kernel_args(prot)

    def work(a, b):
        _kernels.pull_back(pts[a:b], ca, sa, cb, sb, int(n_iter), out[a:b], status[a:b])

    run_chunks(work, pts.shape[0], workers)
    return out, status


def push_forward(pts, prot, n_iter, workers=1):
    pts = np.ascontiguousarray(as_points(pts).reshape(-1, 3))
    out = np.empty_like(pts)
    status = np.zeros(pts.shape[0], dtype=np.int8)
    ca, sa, cb, sb = kernel_args(prot)

    def work(a, b):
        _kernels.push_forward(pts[a:b], ca, sa, cb, sb, int(n_iter), out[a:b], status[a:b])

    run_chunks(work, pts.shape[0], workers)
    return out, status


def advect_values(prot, n_iter, pattern, resolution, workers=1):
    """Scalar field advected ``n_iter`` steps, sampled at pixel centres.

    Each pixel takes the pattern value at its ``n_iter``-fold pre-image, so
    the advection is exact. Returns ``(values, valid)`` where ``values`` is
    NaN outside the disk and at boundary-hitting pixels.
    """
    pts, inside = pixel_centers(resolution)
    back, status = pull_back(pts[inside], prot, n_iter, workers)
    vals = np.full((resolution, resolution), np.nan)
    v = np.asarray(pattern(back), dtype=float)
    v[status != 0] = np.nan
    vals[inside] = v
    valid = inside.copy()
    valid[inside] = status == 0
    return vals, valid


def advect_pattern(prot, n_iter, pattern=None, resolution=256, workers=1):
    """Greyscale image of ``pattern`` after ``n_iter`` iterations of the map."""
    vals, valid = advect_values(prot, n_iter, pattern or default_pattern, resolution, workers)
    img = np.empty((resolution, resolution, 3), dtype=np.uint8)
    img[:] = WHITE
    g = np.round(255.0 * np.clip(vals[valid], 0.0, 1.0)).astype(np.uint8)
    img[valid] = g[:, None]
    return img, valid

