import numpy as np
import pytest

from gradperc import oracle
from gradperc.connectivity import label_grid
from gradperc.front import (check_uniqueness, extract_front, front_stats,
                            highest_occupied_crossing, loop_erase,
                            lowest_vacant_crossing, outer_boundary)
from gradperc.lattice import Region
from gradperc.sampling import Configuration, StripSpec, sample_strip


def strip_config(N, ell, rule):
    """Build a strip configuration from a per-site boolean rule."""
    spec = StripSpec(N=N, ell=ell)
    occ = np.zeros((spec.region.nrows, spec.region.ncols), dtype=bool)
    for j in range(-N, N + 1):
        for i in range(ell + 1):
            occ[j + N, i] = rule(i, j)
    return Configuration(region=spec.region, occupied=occ)


def flat_config(N=4, ell=6):
    return strip_config(N, ell, lambda i, j: j <= 0)


def layered_config(N=5, ell=6):
    return strip_config(N, ell, lambda i, j: j <= 0 or j == 2)


def walk_edge_set(walk):
    return {tuple(sorted(e, key=lambda z: (z[1], z[0]))) for e in walk}


def spanning_cluster_count(c, color):
    mask = c.occupied if color == "occupied" else ~c.occupied
    labels, _ = label_grid(mask)
    left = set(labels[:, 0][labels[:, 0] > 0].tolist())
    right = set(labels[:, -1][labels[:, -1] > 0].tolist())
    return len(left & right)


def test_flat_interface_front_edges():
    ell = 6
    c = flat_config(ell=ell)
    f = extract_front(c)
    # hand enumeration: cross-row pairs ((i,0),(i,1)) and ((i,0),(i-1,1))
    expected = {((i, 0), (i, 1)) for i in range(ell + 1)}
    expected |= {((i - 1 + 1, 0), (i - 1, 1)) for i in range(1, ell + 1)}
    expected = {tuple(sorted(e, key=lambda z: (z[1], z[0]))) for e in expected}
    assert f.edge_set() == expected
    assert f.length == 2 * ell + 1
    assert f.unique
    assert f.rho_upper == f.rho_lower
    assert walk_edge_set(f.rho_upper) == f.edge_set()


def test_flat_interface_stats():
    c = flat_config()
    f = extract_front(c)
    st = front_stats(f, StripSpec(N=4, ell=6))
    assert st.std_height == 0.0
    assert st.mean_height == 0.5
    assert f.fraction_outside(4) == 0.0


def test_all_occupied_interior_front_hugs_top():
    N, ell = 4, 5
    c = strip_config(N, ell, lambda i, j: j < N)
    f = extract_front(c)
    rows = set(f.edges[:, 1].tolist()) | set(f.edges[:, 3].tolist())
    assert rows == {N - 1, N}
    assert f.unique
    seq = highest_occupied_crossing(c)
    assert all(max(e[0][1], e[1][1]) == N for e in seq)


def test_all_vacant_interior_front_hugs_bottom():
    N, ell = 4, 5
    c = strip_config(N, ell, lambda i, j: j == -N)
    f = extract_front(c)
    rows = set(f.edges[:, 1].tolist()) | set(f.edges[:, 3].tolist())
    assert rows == {-N, -N + 1}
    assert f.unique


def test_layered_config_not_unique():
    c = layered_config()
    assert not check_uniqueness(c)
    f = extract_front(c)
    assert f.length == 0  # bottom cluster and top cluster are not adjacent
    hu = highest_occupied_crossing(c)
    lv = lowest_vacant_crossing(c)
    assert {j for e in hu for _, j in e} == {2, 3}
    assert {j for e in lv for _, j in e} == {0, 1}
    with pytest.raises(ValueError):
        front_stats(f, StripSpec(N=5, ell=6))


def test_rho_star_weakly_below_rho():
    for seed in range(25):
        c = sample_strip(StripSpec(N=24, ell=24), seed=seed)
        hu = highest_occupied_crossing(c)
        lv = lowest_vacant_crossing(c)

        def col_heights(walk):
            cols = {}
            for (u, v) in walk:
                col = min(u[0], v[0])
                cols.setdefault(col, []).append((u[1] + v[1]) / 2)
            return cols

        chu, clv = col_heights(hu), col_heights(lv)
        for col in set(chu) & set(clv):
            assert max(clv[col]) <= max(chu[col]) + 1e-9
            assert min(clv[col]) <= min(chu[col]) + 1e-9


def test_cluster_walk_agreement_when_unique():
    hits = 0
    for seed in range(40):
        c = sample_strip(StripSpec(N=32, ell=32), seed=1000 + seed)
        f = extract_front(c)
        assert f.length >= f.spec.ell  # interface visits every column
        if f.unique:
            hits += 1
            assert walk_edge_set(f.rho_upper) == f.edge_set()
            assert f.rho_upper == f.rho_lower
    assert hits > 30  # uniqueness is the typical case at ell = N


def test_uniqueness_flag_matches_spanning_cluster_criterion():
    # independent cluster formulation: the front is unique iff exactly one
    # vacant cluster (and one occupied cluster) spans left-right
    specs = [StripSpec(N=32, ell=32)] * 20 + [StripSpec(N=32, ell=4)] * 40
    seen_nonunique = 0
    for k, spec in enumerate(specs):
        c = sample_strip(spec, seed=7000 + k)
        uniq = check_uniqueness(c)
        expect = (spanning_cluster_count(c, "vacant") == 1
                  and spanning_cluster_count(c, "occupied") == 1)
        assert uniq == expect
        seen_nonunique += not uniq
    assert seen_nonunique > 0  # short strips do produce extra interfaces


def test_height_profile_and_fraction_outside_monotone():
    c = sample_strip(StripSpec(N=16, ell=20), seed=3)
    f = extract_front(c)
    prof = f.height_profile()
    assert len(prof) == 21
    assert sum(len(p) for p in prof) == f.length
    fracs = [f.fraction_outside(b) for b in (0.0, 1.0, 2.0, 4.0, 16.0)]
    assert all(a >= b for a, b in zip(fracs, fracs[1:]))
    assert fracs[-1] == 0.0  # confined to the strip


def test_loop_erase():
    seq = [(0, 0), (1, 0), (1, 1), (0, 1), (1, 0), (2, 0)]
    assert loop_erase(seq) == [(0, 0), (1, 0), (2, 0)]
    assert loop_erase([(5, 5)]) == [(5, 5)]


def test_outer_boundary_flat_interface():
    ell = 6
    c = flat_config(ell=ell)
    up = outer_boundary(c, "upper")
    assert up.length == ell + 1
    assert all(j == 1 for _, j in up.sites)
    lo = outer_boundary(c, "lower")
    assert lo.length == ell + 1
    assert all(j == 0 for _, j in lo.sites)


def test_outer_boundary_properties_on_samples():
    for seed in range(15):
        c = sample_strip(StripSpec(N=16, ell=16), seed=200 + seed)
        f = extract_front(c)
        if not f.unique:
            continue
        up = outer_boundary(c, "upper")
        lo = outer_boundary(c, "lower")
        # self-avoiding left-right crossings
        assert len(set(up.sites)) == up.length
        assert up.sites[0][0] == 0 and up.sites[-1][0] == 16
        assert len(set(lo.sites)) == lo.length
        # upper path weakly above lower path, column-wise
        ups = {}
        los = {}
        for i, j in up.sites:
            ups.setdefault(i, []).append(j)
        for i, j in lo.sites:
            los.setdefault(i, []).append(j)
        for col in set(ups) & set(los):
            assert max(ups[col]) >= max(los[col])
            assert min(ups[col]) >= min(los[col])
        # accessible perimeter is part of the perimeter
        vac_from_walk = {e[0] for e in f.rho_lower}
        assert set(up.sites) <= vac_from_walk
        assert up.length <= len(vac_from_walk)


def test_outer_boundary_three_arm_oracle_small_strips():
    rng = np.random.default_rng(17)
    for trial in range(12):
        N = int(rng.integers(2, 5))
        ell = int(rng.integers(4, 8))
        spec = StripSpec(N=N, ell=ell)
        c = sample_strip(spec, seed=4000 + trial)
        if not check_uniqueness(c):
            continue
        region = spec.region

        def occ_at(z, c=c):
            return c.occupied_at(z)

        for side in ("upper", "lower"):
            path = outer_boundary(c, side)
            for v in path.sites:
                assert oracle.three_arm_membership(occ_at, region, v, side), \
                    (side, v, c.occupied.astype(int))


def test_extract_front_rejects_bad_strips():
    spec = StripSpec(N=3, ell=3)
    occ = np.zeros((spec.region.nrows, spec.region.ncols), dtype=bool)
    c = Configuration(region=spec.region, occupied=occ)
    with pytest.raises(ValueError):
        extract_front(c)  # bottom row not occupied
    r = Region(1, 4, -3, 3)
    occ2 = np.ones((r.nrows, r.ncols), dtype=bool)
    with pytest.raises(ValueError):
        extract_front(Configuration(region=r, occupied=occ2))
