import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stablab.catalog import stable_unstable_frame
from stablab.expansive import (cat_separation_bound, dense_expansiveness_probe, heteroclinic_separated_set,
                               homoclinic_point, lattice_offsets, orbit_stack, recheck_certificate,
                               ring_directions, sensitivity_probe, separation_time, shrinking_ball_certificate,
                               time_order)
from stablab.geometry import UniformGrid, distances, sample

SQ5 = math.sqrt(5)


def test_time_order():
    assert time_order(2) == [0, 1, -1, 2, -2]


def test_orbit_stack(cat):
    S = orbit_stack(cat, [(0.5, 0.5)], 2)
    assert S.shape == (5, 1, 2)
    np.testing.assert_allclose(S[3, 0], [0.5, 0.0], atol=1e-15)
    np.testing.assert_allclose(S[1, 0], cat.backward(np.array([[0.5, 0.5]]))[0], atol=1e-15)


def test_separation_time_examples(cat, ns):
    r = separation_time(cat, (0.0, 0.0), (0.001, 0.0), 0.2, 20)
    assert r.n == 6
    # |A^n e1| grows like lam_u^n; first n with 0.001 * |A^n e1| > 0.2
    norms = [np.linalg.norm(np.linalg.matrix_power(cat.matrix, n) @ [0.001, 0.0]) for n in range(10)]
    assert r.n == next(n for n, v in enumerate(norms) if v > 0.2)
    # forward the pair stays together; backward 0.49 runs away from 0.5
    assert separation_time(ns, (0.49,), (0.5,), 0.2, 50).n == -4
    assert separation_time(ns, (0.49,), (0.5,), 0.1, 50).n == -3
    with pytest.raises(ValueError, match="degenerate"):
        separation_time(cat, (0.1, 0.1), (0.1, 0.1), 0.2, 5)


def test_separation_time_not_found(ns):
    r = separation_time(ns, (0.49,), (0.5,), 0.1, 2)
    assert r.n is None and r.separation < 0.1


def test_dense_probe_cat_grid(cat):
    D = sample(cat.space, UniformGrid(16))
    r = dense_expansiveness_probe(cat, D, 0.2, cat_separation_bound(0.2, 16, (3 + SQ5) / 2), max_pairs=None)
    assert r.n_pairs_tested == r.n_pairs_total == 256 * 255 // 2
    assert r.fraction == 1.0 and not r.failing


def test_dense_probe_subsampling_is_seeded(cat):
    D = sample(cat.space, UniformGrid(16))
    a = dense_expansiveness_probe(cat, D, 0.2, 15, max_pairs=500, seed=3)
    b = dense_expansiveness_probe(cat, D, 0.2, 15, max_pairs=500, seed=3)
    assert a.n_pairs_tested == 500 and a.to_json() == b.to_json()


def test_dense_probe_rejects_duplicates(cat):
    with pytest.raises(ValueError, match="pairwise distinct"):
        dense_expansiveness_probe(cat, np.array([[0.1, 0.1], [0.1, 0.1]]), 0.2, 5)


def test_dense_probe_northsouth_fails(ns):
    r = dense_expansiveness_probe(ns, sample(ns.space, UniformGrid(64)), 0.1, 200)
    assert r.fraction < 1.0 and r.failing_rows()


def test_dense_probe_da_heteroclinic(da):
    H = heteroclinic_separated_set(da, 60)
    r = dense_expansiveness_probe(da, H, da.meta.eps0 / 2, 60, max_pairs=None)
    assert r.fraction == 1.0


def test_ring_directions():
    R = ring_directions(2)
    assert R.shape == (8, 2)
    np.testing.assert_allclose(np.linalg.norm(R, axis=1), 1.0)


def test_sensitivity(ns, cat):
    assert sensitivity_probe(cat, UniformGrid(8), 1e-3, 0.2, 30).fraction == 1.0
    assert sensitivity_probe(ns, UniformGrid(200), 1e-3, 0.2, 200).fraction < 1.0
    with pytest.raises(ValueError):
        sensitivity_probe(cat, UniformGrid(4), 0.0, 0.2, 5)


@pytest.mark.parametrize("eps", [0.2, 0.1, 0.02])
def test_shrinking_ball_certificate_sound(ns, eps):
    cert = shrinking_ball_certificate(ns, eps)
    assert cert.max_diameter < eps
    full = recheck_certificate(ns, cert, factor=3)
    assert max(full.values()) <= cert.max_diameter
    assert all(v < cert.max_diameter for n, v in full.items() if n != cert.argmax_n)


def test_shrinking_ball_certificate_errors(ns, cat):
    with pytest.raises(ValueError, match="no certificate needed"):
        shrinking_ball_certificate(ns, 0.5)
    with pytest.raises(TypeError):
        shrinking_ball_certificate(cat, 0.1)


def test_lattice_offsets_order():
    it = lattice_offsets()
    first = [next(it) for _ in range(5)]
    assert first == [(0, 0), (-1, 0), (0, -1), (0, 1), (1, 0)]


def test_homoclinic_point_closed_form():
    fr = stable_unstable_frame([[2, 1], [1, 1]])
    p = homoclinic_point(fr, (1, 0))
    # a e_s - b e_u = (1, 0) with e_s ~ (1, -phi), e_u ~ (1, 1/phi) gives a = 1/(1 + phi^2)
    np.testing.assert_allclose(p, [(5 - SQ5) / 10, 1 - 1 / SQ5], atol=1e-14)


def test_homoclinic_points_converge_to_fixed_point(cat):
    H = heteroclinic_separated_set(cat, 20)
    zero = np.zeros_like(H)
    # on the stable line through 0: forward iterates shrink by lam_s
    d0 = distances(H, zero)
    d5 = distances(cat.forward(cat.forward(cat.forward(cat.forward(cat.forward(H))))), zero)
    mask = d0 > 0
    assert np.all(d5[mask] < d0[mask])


def test_heteroclinic_count(cat, da):
    np.testing.assert_array_equal(heteroclinic_separated_set(cat, 1), [[0.0, 0.0]])
    H = heteroclinic_separated_set(da, 50)
    assert len(H) == 50
    assert np.all(distances(H, np.broadcast_to(da.center, H.shape)) >= da.radius)
    with pytest.raises(ValueError):
        heteroclinic_separated_set(cat, 0)


@given(r=st.integers(2, 256))
def test_cat_separation_bound_monotone(r):
    lam = (3 + SQ5) / 2
    assert cat_separation_bound(0.2, r + 1, lam) >= cat_separation_bound(0.2, r, lam)


pair = st.tuples(st.floats(0, 1, exclude_max=True), st.floats(0, 1, exclude_max=True))


@given(x=pair, y=pair)
def test_separation_symmetric(cat, x, y):
    if distances(np.array([x]), np.array([y]))[0] <= 1e-9:
        return
    a = separation_time(cat, x, y, 0.2, 12)
    b = separation_time(cat, y, x, 0.2, 12)
    assert a.n == b.n and abs(a.separation - b.separation) < 1e-12


@given(x=st.floats(0.01, 0.49), d=st.floats(1e-4, 1e-2))
def test_horizon_monotone(ns, x, d):
    found = None
    for N in (2, 5, 20, 80):
        r = separation_time(ns, (x,), (x + d,), 0.1, N)
        if found is not None:
            assert r.n is not None
        found = r.n if r.n is not None else found


def test_cat_expansive_at_scale(cat):
    # every pair of the 64 grid is at distance >= 1/64
    N = cat_separation_bound(0.2, 64, (3 + SQ5) / 2)
    assert N == 5
    r = dense_expansiveness_probe(cat, sample(cat.space, UniformGrid(64)), 0.2, N, max_pairs=None, keep_failing=10)
    assert r.n_pairs_tested == 4096 * 4095 // 2 and r.fraction == 1.0
