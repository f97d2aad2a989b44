"""Area fraction of the exceptional set, estimated two independent ways.

``phi_direct`` rasterises the hemisphere and marks every pixel whose orbit
comes within ``eps`` of a cutting line. ``phi_density`` never leaves the
cutting lines: it seeds points along them and averages ``2 eps / rho``, the
area each seed's orbit sweeps out per unit length of line it crosses.
"""

import csv
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from ._parallel import run_chunks
from ._seeding import run_seeds
from .density import count_returns, kernel_args, pixel_centers
from .pwi import FOUR_PI, Protocol

SWEEP_COLUMNS = ["alpha_deg", "beta_deg", "phi_direct", "phi_density", "abs_diff",
                 "substituted_seeds", "wall_ms"]


@dataclass
class CoverageEstimate:
    phi: float
    method: str
    params: dict = field(default_factory=dict)
    substituted: int = 0
    dropped: int = 0
    integrand: np.ndarray | None = None


def seed_densities(prot, eps, delta, n_iter, seeds, workers=1, jitter_seed=None):
    """Near-line density of orbits seeded at ``seeds`` evenly spaced cut parameters.

    The seeds cover ``[0, 4 pi)``, or only the D2 half ``[0, 2 pi)`` when
    ``alpha == 0`` and D1 does not exist. Returns ``(theta, rho,
    substituted, dropped)``. ``rho`` counts trace 0, so it is at least
    ``1 / (n_iter + 1)``; seeds dropped after every retry carry NaN.
    """
    span = FOUR_PI if prot.has_d1 else 0.5 * FOUR_PI
    width = span / seeds
    lo = np.arange(seeds) * width
    if jitter_seed is None:
        frac = np.full(seeds, 0.5)
    else:
        frac = np.random.default_rng(jitter_seed).random(seeds)
    theta = lo + frac * width
    rho = np.full(seeds, np.nan)

    def run(idx, th, pts):
        n1, n2, status = count_returns(pts, prot, eps, n_iter, workers)
        ok = status == 0
        rho[idx[ok]] = (n1[ok] + n2[ok]) / (n_iter + 1)
        theta[idx] = th
        return status

    substituted, dropped = run_seeds(lo, width, frac, delta, prot, run)
    return theta, rho, substituted, dropped


def phi_density(prot, eps, delta, n_iter, seeds=2000, workers=1, jitter_seed=None):
    """Coverage as the mean of ``2 eps / rho`` over seeds spread along the lines.

    Each unit of sided line length carries ``eps / rho`` of area and the
    sided length of both lines is ``4 pi`` against a hemisphere of ``2 pi``.
    With D1 absent the sided length halves, and so does the factor.
    Values above 1 are possible near degenerate protocols and are returned
    as is, with a warning.
    """
    if seeds < 100:
        raise ValueError("phi_density needs at least 100 seeds")
    if not 0.0 < delta < eps:
        raise ValueError("need 0 < delta < eps")
    theta, rho, substituted, dropped = seed_densities(prot, eps, delta, n_iter, seeds,
                                                      workers, jitter_seed)
    integrand = (2.0 if prot.has_d1 else 1.0) * eps / rho
    phi = float(np.nanmean(integrand))
    if phi > 1.0:
        warnings.warn(f"density coverage {phi:.3f} exceeds 1 for {prot.degrees}", stacklevel=2)
    params = {"alpha": prot.alpha, "beta": prot.beta, "eps": eps, "delta": delta,
              "n_iter": int(n_iter), "seeds": int(seeds), "jitter_seed": jitter_seed}
    return CoverageEstimate(phi, "density_integral", params, substituted, dropped, integrand)


def first_hits(prot, eps, n_iter, resolution, workers=1):
    """First near-line trace of every in-disk pixel (``-1`` for none) and the pixel status."""
    pts, inside = pixel_centers(resolution)
    p = np.ascontiguousarray(pts[inside])
    hit = np.full(p.shape[0], -1, dtype=np.int64)
    status = np.zeros(p.shape[0], dtype=np.int8)
    ca, sa, cb, sb = kernel_args(prot)
    sin_eps = np.sin(eps)

    def work(a, b):
        _kernels.first_hit(p[a:b], ca, sa, cb, sb, prot.has_d1, sin_eps, int(n_iter),
                           hit[a:b], status[a:b])

    run_chunks(work, p.shape[0], workers)
    return hit, status


def phi_direct(prot, eps, n_iter, resolution=1024, workers=1):
    """Fraction of equal-area pixels whose orbit passes within ``eps`` of a cutting line.

    Pixels whose orbit lands exactly on the equator are left out of both
    numerator and denominator; their number is reported as ``dropped``.
    """
    if resolution < 64:
        raise ValueError("resolution must be at least 64")
    hit, status = first_hits(prot, eps, n_iter, resolution, workers)
    ok = status == 0
    phi = float(np.count_nonzero(hit[ok] >= 0) / max(1, np.count_nonzero(ok)))
    params = {"alpha": prot.alpha, "beta": prot.beta, "eps": eps, "n_iter": int(n_iter),
              "resolution": int(resolution)}
    return CoverageEstimate(phi, "direct_grid", params, 0, int(np.count_nonzero(~ok)))


def sweep(alpha_deg, beta_deg, eps=1e-3, n_iter=20000, delta=1e-6, seeds=2000, resolution=256,
          workers=1, progress=None):
    """Both coverage estimates over a grid of protocols, one row per protocol.

    A protocol that raises is recorded with an ``error`` entry and NaN
    estimates; the sweep carries on.
    """
    rows = []
    for a in alpha_deg:
        for b in beta_deg:
            t0 = time.perf_counter()
            row = {"alpha_deg": float(a), "beta_deg": float(b)}
            try:
                prot = Protocol.from_degrees(a, b)
                d = phi_direct(prot, eps, n_iter, resolution, workers)
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    s = phi_density(prot, eps, delta, n_iter, seeds, workers)
                row.update(phi_direct=d.phi, phi_density=s.phi, abs_diff=abs(d.phi - s.phi),
                           substituted_seeds=s.substituted)
            except Exception as exc:  # noqa: BLE001 - the sweep reports and continues
                row.update(phi_direct=np.nan, phi_density=np.nan, abs_diff=np.nan,
                           substituted_seeds=0, error=f"{type(exc).__name__}: {exc}")
            row["wall_ms"] = round(1000.0 * (time.perf_counter() - t0), 1)
            rows.append(row)
            if progress:
                progress(row)
    return rows


def coarse_grid(n, lo=30.0, hi=150.0):
    return np.linspace(lo, hi, n)


def write_sweep_csv(path, rows):
    with open(path, "w", newline="") as f:
        w = csv.DictWriter(f, fieldnames=SWEEP_COLUMNS, extrasaction="ignore")
        w.writeheader()
        for r in rows:
            w.writerow(r)


def read_sweep_csv(path):
    with open(path, newline="") as f:
        return [{k: float(v) for k, v in r.items()} for r in csv.DictReader(f)]


def orbit_area(theta, prot, eps, delta, n_iter, T=1000):
    """Area of the closure of the orbit seeded at cut parameter ``theta``.

    The length of cutting line the closure meets is estimated as the number
    of distinct ``T``-bins the orbit returns to, times the bin width; each
    unit of that sided length stands for ``eps / rho`` of area.
    """
    h = single_seed_returns(theta, prot, eps, delta, n_iter, T)
    rho = h.sum() / (n_iter + 1)
    return float(np.count_nonzero(h) * (FOUR_PI / T) * eps / rho)


def single_seed_returns(theta, prot, eps, delta, n_iter, T=1000):
    """Return counts per bin of one seed, as a length-``T`` array."""
    if T < 2 or T % 2:
        raise ValueError("T must be even and at least 2")
    out = np.zeros(T, dtype=np.int64)

    def run(idx, th, pts):
        hist = np.zeros((1, T), dtype=np.int64)
        status = np.zeros(1, dtype=np.int8)
        ca, sa, cb, sb = kernel_args(prot)
        _kernels.return_rows(pts, np.zeros(1, dtype=np.int64), ca, sa, cb, sb, prot.has_d1,
                             np.sin(eps), int(n_iter), T, FOUR_PI / T, hist, status)
        out[:] = hist[0]
        return status

    width = FOUR_PI / T
    lo = np.floor(theta / width) * width
    _, dropped = run_seeds(np.array([lo]), width, np.array([(theta - lo) / width]), delta, prot, run)
    if dropped:
        raise RuntimeError(f"seed at theta={theta} kept hitting the equator")
    return out


def orbit_partition_area(prot, eps, delta, n_iter, T=100):
    """Total area of the invariant sets met by one seed per bin.

    Seeds are linked whenever one returns to the other's bin; each linked
    group is treated as one invariant set whose line length is the union of
    the bins its seeds visit and whose density is the group's mean ``rho``.
    The total approximates ``2 pi`` times the coverage.
    """
    width = FOUR_PI / T
    parent = np.arange(T)

    def find(k):
        while parent[k] != k:
            parent[k] = parent[parent[k]]
            k = parent[k]
        return k

    hists = np.array([single_seed_returns((k + 0.5) * width, prot, eps, delta, n_iter, T)
                      for k in range(T)])
    for k in range(T):
        for j in np.nonzero(hists[k])[0]:
            parent[find(j)] = find(k)
    roots = np.array([find(k) for k in range(T)])
    rho = hists.sum(axis=1) / (n_iter + 1)
    total = 0.0
    for r in np.unique(roots):
        members = roots == r
        length = np.count_nonzero(hists[members].any(axis=0)) * width
        total += length * eps / rho[members].mean()
    return float(total)


def overlap_area(prot, eps):
    """Asymptotic area counted twice where the two fattened lines cross.

    Infinite when either angle sits on a pole of ``csc x sec x``.
    """
    total = 0.0
    for ang in (prot.alpha, prot.beta):
        s, c = np.sin(ang), np.cos(ang)
        if abs(s) < 1e-15 or abs(c) < 1e-15:
            return float("inf")
        # obtuse angles cross at the supplementary angle
        total += 1.0 / abs(s * c)
    return float(2.0 * eps**2 * total)
