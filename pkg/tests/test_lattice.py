import itertools

import numpy as np
import pytest

from gradperc.lattice import (DualEdge, Region, box, box_boundary,
                              canonical_pair, dist, neighbors, rot60,
                              x_of_edge)


def test_neighbors_of_origin():
    assert set(neighbors((0, 0))) == {(1, 0), (-1, 0), (0, 1), (0, -1),
                                      (1, -1), (-1, 1)}


def test_neighbors_translation_invariance():
    base = set(neighbors((0, 0)))
    shifted = {(i + 5, j - 2) for i, j in base}
    assert set(neighbors((5, -2))) == shifted


def test_neighbors_have_six_elements_at_distance_one():
    rng = np.random.default_rng(0)
    for _ in range(50):
        z = tuple(rng.integers(-100, 100, size=2).tolist())
        ns = neighbors(z)
        assert len(set(ns)) == 6
        assert all(dist(z, w) == 1 for w in ns)


def test_neighbor_symmetry():
    rng = np.random.default_rng(1)
    for _ in range(100):
        z = tuple(rng.integers(-50, 50, size=2).tolist())
        for w in neighbors(z):
            assert z in neighbors(w)


def test_dist_metric_axioms():
    rng = np.random.default_rng(2)
    pts = [tuple(rng.integers(-30, 30, size=2).tolist()) for _ in range(30)]
    for a, b, c in itertools.islice(itertools.product(pts, pts, pts), 3000):
        assert dist(a, b) == dist(b, a)
        assert (dist(a, b) == 0) == (a == b)
        assert dist(a, c) <= dist(a, b) + dist(b, c)


def test_rot60_is_order_six():
    z = (3, -1)
    w = z
    for _ in range(6):
        w = rot60(w)
    assert w == z
    assert rot60((1, 0)) == (0, 1)


def test_box_degenerate_and_counts():
    b0 = box((0, 0), 0)
    assert list(b0.sites()) == [(0, 0)]
    for n in (1, 2, 5):
        b = box((2, -3), n)
        assert b.nsites == (2 * n + 1) ** 2
        assert len(box_boundary((2, -3), n)) == 8 * n


def test_box_distance_consistency_and_nesting():
    z = (1, 1)
    for n in range(4):
        b = box(z, n)
        for w in box(z, 4).sites():
            assert b.contains(w) == (dist(z, w) <= n)
    assert set(box_boundary(z, 2)) & set(box_boundary(z, 3)) == set()


def test_region_interior_boundary_partition():
    r = Region(0, 4, -2, 3)
    inner = set(r.interior_sites())
    bound = set(r.boundary_sites())
    assert inner | bound == set(r.sites())
    assert inner & bound == set()
    assert all(dist(z, w) >= 1 for z in inner for w in [(-1, 0)])


def test_region_validation():
    with pytest.raises(ValueError):
        Region(2, 1, 0, 0)


def test_region_site_index_row_major():
    r = Region(0, 2, 0, 1)
    order = [r.site_index(z) for z in r.sites()]
    assert order == list(range(r.nsites))


def test_dual_edge_canonical_order():
    e = DualEdge.of((0, 1), (0, 0))
    assert (e.lo, e.hi) == ((0, 0), (0, 1))
    assert x_of_edge(e) == (0, 0)
    # (j, i) order puts (4, 1) before (3, 2)
    e2 = DualEdge.of((3, 2), (4, 1))
    assert e2.lo == (4, 1)
    assert x_of_edge(e2) == (4, 1)
    assert canonical_pair((3, 2), (4, 1)) == ((4, 1), (3, 2))


def test_dual_edge_requires_adjacency():
    with pytest.raises(ValueError):
        DualEdge.of((0, 0), (1, 1))


def test_x_of_edge_deterministic():
    pairs = [((0, 0), (1, 0)), ((5, 2), (5, 3)), ((-1, 4), (0, 3))]
    first = [x_of_edge(DualEdge.of(*p)) for p in pairs]
    again = [x_of_edge(DualEdge.of(*reversed(p))) for p in pairs]
    assert first == again
