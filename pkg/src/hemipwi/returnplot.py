"""Binned return histogram over the sided cut parameter.

Seeds are started a distance ``delta`` off each bin of the cutting lines and
every later pass within ``eps`` of a line is charged to the bin of the cut
parameter it lands on. Row ``i`` of ``counts`` holds the returns of the
seeds started in bin ``i``. Empty cells are pairs of line pieces that never
exchange orbits, which is how disconnected invariant sets show up.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from ._parallel import run_chunks
from ._seeding import run_seeds
from .density import kernel_args
from .pwi import FOUR_PI


@dataclass
class ReturnHistogram:
    T: int
    counts: np.ndarray
    seeds_per_bin: int
    params: dict = field(default_factory=dict)
    substituted: int = 0
    dropped: int = 0

    @property
    def delta_theta(self):
        return FOUR_PI / self.T

    def normalized(self):
        """Counts per unit fattened area per seed-trace."""
        p = self.params
        return self.counts / (p["eps"] * self.delta_theta * self.seeds_per_bin * (p["n_iter"] + 1))


def build(prot, eps, delta, T, seeds_per_bin, n_iter, workers=1, jitter_seed=None, rows=None):
    """Return histogram of ``seeds_per_bin`` sided seeds in each of ``T`` bins.

    ``rows`` restricts seeding to a subset of bins; the other rows stay
    zero. When ``alpha == 0`` there is no D1 line and its rows are never
    seeded.
    """
    if T < 2 or T % 2:
        raise ValueError("T must be even and at least 2")
    if not 0.0 < delta < eps:
        raise ValueError("need 0 < delta < eps")
    if seeds_per_bin < 1:
        raise ValueError("seeds_per_bin must be positive")
    dtheta = FOUR_PI / T
    bins = np.arange(T) if rows is None else np.unique(np.asarray(rows, dtype=np.int64))
    if np.any((bins < 0) | (bins >= T)):
        raise ValueError("row index out of range")
    if not prot.has_d1:
        bins = bins[bins < T // 2]
    seed_rows = np.repeat(bins, seeds_per_bin)
    if jitter_seed is None:
        frac = np.tile((np.arange(seeds_per_bin) + 0.5) / seeds_per_bin, bins.size)
    else:
        frac = np.random.default_rng(jitter_seed).random(seed_rows.size)
    counts = np.zeros((T, T), dtype=np.int64)
    ca, sa, cb, sb = kernel_args(prot)
    sin_eps = np.sin(eps)

    def run(idx, theta, pts):
        status = np.zeros(idx.size, dtype=np.int8)
        r = seed_rows[idx]

        def work(a, b):
            # private histogram covering only this chunk's rows
            r0 = r[a:b].min()
            local = np.zeros((r[a:b].max() - r0 + 1, T), dtype=np.int64)
            _kernels.return_rows(pts[a:b], r[a:b] - r0, ca, sa, cb, sb, prot.has_d1, sin_eps,
                                 int(n_iter), T, dtheta, local, status[a:b])
            return r0, local

        for r0, local in run_chunks(work, idx.size, workers):
            counts[r0:r0 + local.shape[0]] += local
        return status

    substituted, dropped = run_seeds(seed_rows * dtheta, dtheta, frac, delta, prot, run)
    params = {"alpha": prot.alpha, "beta": prot.beta, "eps": eps, "delta": delta,
              "n_iter": int(n_iter), "jitter_seed": jitter_seed}
    return ReturnHistogram(T, counts, seeds_per_bin, params, substituted, dropped)


def log_values(h):
    return np.log10(h.normalized() + 1.0)


def log_render(h):
    """Greyscale ``(T, T, 3)`` image, darker for more returns and white for none.

    The start bin runs left to right and the return bin bottom to top.
    """
    v = log_values(h)
    top = v.max()
    g = np.ones_like(v) if top == 0 else 1.0 - v / top
    img = np.round(255.0 * g).astype(np.uint8)
    img[h.counts == 0] = 255
    # counts[i, j] -> column i, row T-1-j
    img = img.T[::-1]
    return np.repeat(img[..., None], 3, axis=-1)


def empty_fraction(h):
    return float(np.mean(h.counts == 0))


def row_density(h, i):
    """Near-line density of the orbits seeded in bin ``i``."""
    return float(h.counts[i].sum() / (h.seeds_per_bin * (h.params["n_iter"] + 1)))


def off_diagonal_cells(counts, spacing, tol=1):
    """Number of nonzero cells farther than ``tol`` bins from every line ``j = i + k*spacing``."""
    ii, jj = np.nonzero(counts)
    r = np.mod(jj - ii, spacing)
    return int(np.count_nonzero(np.minimum(r, spacing - r) > tol))
