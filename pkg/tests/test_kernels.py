"""Compiled loops against a plain-numpy walk of the same orbits."""

import numpy as np
import pytest

from conftest import random_hemisphere
from hemipwi import _kernels, density, pwi, sphere as sp
from hemipwi.pwi import Protocol

PROTOCOLS = [Protocol.from_degrees(57, 32.75), Protocol.from_degrees(45, 45),
             Protocol.from_degrees(90, 60), Protocol(1.0, 0.0), Protocol(0.0, 0.7)]


def reference_counts(p, prot, eps, n_iter):
    s = np.sin(eps)
    n1 = np.zeros(len(p), dtype=np.int64)
    n2 = np.zeros(len(p), dtype=np.int64)
    q = p.copy()
    for _ in range(n_iter + 1):
        tr = pwi.forward(q, prot)
        if prot.has_d1:
            n1 += np.abs(tr.intermediate[:, 1]) <= s
        n2 += np.abs(tr.final[:, 1]) <= s
        q = tr.final
    return n1, n2


@pytest.mark.parametrize("prot", PROTOCOLS, ids=lambda p: f"{p.degrees[0]:.1f}-{p.degrees[1]:.1f}")
def test_counts_match_numpy_walk(prot):
    p = random_hemisphere(300, seed=4)
    n1, n2, status = density.count_returns(p, prot, 0.05, 400)
    r1, r2 = reference_counts(p, prot, 0.05, 400)
    assert not status.any()
    assert np.array_equal(n1, r1) and np.array_equal(n2, r2)


@pytest.mark.parametrize("prot", PROTOCOLS[:3])
def test_push_and_pull_match_numpy(prot):
    p = random_hemisphere(500, seed=8)
    fwd, st = density.push_forward(p, prot, 50)
    q = p.copy()
    for _ in range(50):
        q = pwi.forward(q, prot).final
    assert not st.any()
    np.testing.assert_allclose(fwd, q, atol=1e-12)
    back, st = density.pull_back(fwd, prot, 50)
    assert not st.any()
    np.testing.assert_allclose(back, p, atol=1e-10)


def test_first_hit_is_first_nonzero_trace():
    prot = Protocol.from_degrees(57, 57)
    p = np.ascontiguousarray(random_hemisphere(200, seed=1))
    eps, n = 0.01, 300
    hit = np.zeros(len(p), dtype=np.int64)
    st = np.zeros(len(p), dtype=np.int8)
    ca, sa, cb, sb = density.kernel_args(prot)
    _kernels.first_hit(p, ca, sa, cb, sb, True, np.sin(eps), n, hit, st)
    for k in range(0, 200, 17):
        for m in range(n + 1):
            n1, n2 = density.accumulate(p[k], prot, eps, m)
            if n1 + n2:
                assert hit[k] == m
                break
        else:
            assert hit[k] == -1


def test_boundary_status_is_reported():
    pts = np.array([[0.0, -1.0, 0.0], [0.48, -0.6, 0.64]])
    n1, n2, st = density.count_returns(pts, Protocol(np.pi / 2, np.pi / 2), 1e-3, 10)
    assert list(st) == [1, 0]
    with pytest.raises(pwi.BoundaryPoint):
        density.accumulate(pts, Protocol(np.pi / 2, np.pi / 2), 1e-3, 10)


def test_return_rows_bins_like_return_bins():
    prot = Protocol.from_degrees(57, 32.75)
    eps, n, T = 0.02, 200, 40
    theta = np.array([0.3, 2.0, 7.0, 10.5])
    pts = np.ascontiguousarray(pwi.param_point(theta, 1e-6, prot))
    hist = np.zeros((len(theta), T), dtype=np.int64)
    st = np.zeros(len(theta), dtype=np.int8)
    ca, sa, cb, sb = density.kernel_args(prot)
    _kernels.return_rows(pts, np.arange(len(theta)), ca, sa, cb, sb, True, np.sin(eps), n, T,
                         4 * np.pi / T, hist, st)
    for k in range(len(theta)):
        want = np.zeros(T, dtype=np.int64)
        q = pts[k]
        for _ in range(n + 1):
            tr = pwi.forward(q, prot)
            for t in pwi.return_bins(tr, eps, prot):
                want[int(t / (4 * np.pi / T))] += 1
            q = tr.final
        assert np.array_equal(hist[k], want)


def test_quarter_turn_trig_is_exact():
    assert sp.cos_sin(np.pi / 2) == (0.0, 1.0)
    assert sp.cos_sin(-np.pi / 2) == (0.0, -1.0)
    assert sp.cos_sin(np.pi) == (-1.0, 0.0)
    assert sp.cos_sin(1.0) == (np.cos(1.0), np.sin(1.0))
