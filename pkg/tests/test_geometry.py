import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from multicone import model
from multicone.geometry import (
    DimensionMismatch,
    HRep,
    RegionSpec,
    VRep,
    canonicalize,
    cone_generators,
    contains,
    h_to_v,
    included_in,
    minkowski_sum,
    minkowski_sum_all,
    rank,
    read_matrix_csv,
    region_from_json,
    region_to_json,
    regions_equal,
    to_hrep,
    v_to_h,
    write_matrix_csv,
)
from oracles import brute_force_rays, fourier_motzkin, satisfies


def cone(rows):
    return HRep(len(rows[0]), tuple((r, 0) for r in rows))


def rays_of(h):
    return set(h_to_v(h).rays)


# --- h_to_v ---------------------------------------------------------------


def test_bc2_cone_rays():
    assert rays_of(cone([(1, 0, 1), (0, 1, 1), (1, 1, 1)])) == {(1, 0, -1), (0, 1, -1), (-1, -1, 1)}


def test_halfline():
    v = h_to_v(cone([(1,)]))
    assert v.rays == ((-1,),)


def test_corrected_mac2_cone_matches_brute_force():
    g = [(1, 0, 0), (0, 1, 0), (1, 1, 1)]
    assert rays_of(cone(g)) == brute_force_rays(g, 3) == {(-1, 0, 1), (0, -1, 1), (0, 0, -1)}


@pytest.mark.parametrize("channel,l", [("bc", 2), ("bc", 3), ("mac", 2), ("mac", 3)])
def test_rays_match_brute_force_oracle(channel, l):
    g = model.g_columns(channel, l)
    assert set(model.cone_rays(channel, l)) == brute_force_rays(g, len(g[0]))


def test_infeasible_gives_empty():
    h = HRep(1, (((1,), -1), ((-1,), 0)))
    assert h_to_v(h).is_empty


def test_empty_inequalities_is_whole_space():
    v = h_to_v(HRep(2, ()))
    assert contains(v, (5, -7)) and contains(HRep(2, ()), (5, -7))


# --- v_to_h and canonical forms -------------------------------------------


def test_v_to_h_bc2():
    h = v_to_h(VRep(3, rays=((1, 0, -1), (0, 1, -1), (-1, -1, 1))))
    normals = {tuple(int(x) for x in a) for a, b in h.inequalities}
    assert normals == {(1, 0, 1), (0, 1, 1), (1, 1, 1)}
    assert all(b == 0 for _, b in h.inequalities)


def test_point_and_square():
    h = v_to_h(VRep(2, vertices=((0, 0),)))
    assert contains(h, (0, 0)) and not contains(h, (0, Fraction(1, 100)))
    sq = v_to_h(VRep(2, vertices=((0, 0), (1, 0), (0, 1), (1, 1))))
    assert len(sq.inequalities) == 4


def test_canonicalize_duplicate_rays_and_scaling():
    v = canonicalize(VRep(3, rays=((2, 0, -2), (1, 0, -1))))
    assert v.rep.rays == ((1, 0, -1),)
    h = canonicalize(HRep(2, (((2, 2), 0),)))
    assert [tuple(a) for a, _ in h.rep.inequalities] == [(1, 1)]


def test_canonicalize_order_insensitive():
    cols = [tuple(c) for c in zip(*model.PRINTED.h_bc_3)]
    shuffled = cols[:]
    random.Random(4).shuffle(shuffled)
    a = canonicalize(VRep(7, rays=tuple(cols)))
    b = canonicalize(VRep(7, rays=tuple(shuffled)))
    assert a == b and len(a.rep.rays) == 16
    assert canonicalize(a) == a


# --- membership -----------------------------------------------------------


def test_contains_examples():
    r = model.bc_region((1, 1, 1))
    assert contains(r, (1, 1, 1))
    assert contains(r, (2, 1, 0))
    assert not contains(r, (2, 1, Fraction(1, 1000)))
    assert contains(model.bc_region(model.ones()), (0,) * 7)
    with pytest.raises(DimensionMismatch):
        contains(r, (1, 1))


# --- Minkowski sums and equality ------------------------------------------


def test_minkowski_examples():
    assert minkowski_sum(VRep(2, vertices=((0, 0),)), VRep(2, vertices=((1, 1),))).vertices == ((1, 1),)
    s = minkowski_sum(VRep(2, vertices=((0, 0), (1, 0))), VRep(2, vertices=((0, 0), (0, 1))))
    assert regions_equal(s, VRep(2, vertices=((0, 0), (1, 0), (0, 1), (1, 1))))
    with pytest.raises(DimensionMismatch):
        minkowski_sum(VRep(2, vertices=((0, 0),)), VRep(3, vertices=((0, 0, 0),)))


def test_region_equivalence_all_ones_and_deleted_column():
    r = model.ones()
    assert regions_equal(model.bc_region(r), model.operations_region("bc", r))
    dirs = model.achievability_directions("bc", 3)[:-1]
    assert not regions_equal(model.bc_region(r), model.operations_region("bc", r, dirs))
    assert regions_equal(model.bc_region(r), model.bc_region(r))


def test_l2_operations_region_matches_fourier_motzkin():
    # {R : R >= 0, R - H d <= R*, d >= 0} projected onto R
    r_star = (1, 2, 1)
    h = model.achievability_directions("bc", 2)
    ineqs = []
    for i in range(3):
        row = [0] * 6
        row[i] = 1
        for j, d in enumerate(h):
            row[3 + j] = -d[i]
        ineqs.append((row, r_star[i]))
    for i in range(6):
        row = [0] * 6
        row[i] = -1
        ineqs.append((row, 0))
    proj = fourier_motzkin(ineqs, [3, 4, 5])
    region = model.bc_region(r_star)
    rng = random.Random(0)
    for _ in range(300):
        x = tuple(Fraction(rng.randint(-2, 16), 4) for _ in range(3))
        assert satisfies(proj, x) == contains(region, x)


# --- matrix and region files ----------------------------------------------


def test_matrix_csv_round_trip():
    m = [(1, 0, Fraction(1, 2)), (-3, 2, 0)]
    assert read_matrix_csv(write_matrix_csv(m)) == [tuple(Fraction(x) for x in row) for row in m]


def test_region_json_round_trip():
    r = RegionSpec(model.bc_region((1, 1, 1)))
    assert regions_equal(region_from_json(region_to_json(r)), r)
    v = RegionSpec(h_to_v(model.bc_region((1, 1, 1))))
    assert regions_equal(region_from_json(region_to_json(v)), v)


# --- properties -----------------------------------------------------------

rat = st.fractions(min_value=0, max_value=3, max_denominator=4)


@pytest.mark.parametrize("channel,l", [("bc", 2), ("bc", 3), ("mac", 2), ("mac", 3)])
def test_every_ray_satisfies_every_facet(channel, l):
    for g in model.g_columns(channel, l):
        for r in model.cone_rays(channel, l):
            assert sum(a * b for a, b in zip(g, r)) <= 0


@pytest.mark.parametrize("channel,l", [("bc", 2), ("bc", 3), ("mac", 2), ("mac", 3)])
def test_extremality_rank(channel, l):
    g = model.g_columns(channel, l)
    d = len(g[0])
    for r in model.cone_rays(channel, l):
        tight = [row for row in g if sum(a * b for a, b in zip(row, r)) == 0]
        assert rank(tight, d) == d - 1


@given(st.lists(rat, min_size=3, max_size=3))
def test_round_trip_h_v_h(r_star):
    h = model.bc_region(r_star)
    assert canonicalize(v_to_h(h_to_v(h))) == canonicalize(h)


polys = st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3)), min_size=1, max_size=4).map(
    lambda pts: VRep(2, vertices=tuple(pts))
)


@given(polys, polys, polys)
def test_minkowski_commutative_associative(a, b, c):
    assert canonicalize(minkowski_sum(a, b)) == canonicalize(minkowski_sum(b, a))
    left = minkowski_sum(minkowski_sum(a, b), c)
    right = minkowski_sum(a, minkowski_sum(b, c))
    assert canonicalize(left) == canonicalize(right)
    assert canonicalize(minkowski_sum_all([a, b, c])) == canonicalize(left)


def test_contains_agrees_between_h_and_v_forms():
    rng = random.Random(11)
    r_star = (1, Fraction(1, 2), 2, 1, 0, Fraction(3, 2), 1)
    h = model.bc_region(r_star)
    v = h_to_v(h)
    hits = 0
    for _ in range(1000):
        x = tuple(Fraction(rng.randint(-1, 12), 4) for _ in range(7))
        a = contains(h, x)
        assert a == contains(v, x)
        hits += a
    assert 0 < hits < 1000


@given(st.lists(rat, min_size=3, max_size=3), st.lists(rat, min_size=3, max_size=3))
def test_included_in_is_monotone_in_r_star(a, b):
    hi = [max(x, y) for x, y in zip(a, b)]
    assert included_in(model.bc_region(a), model.bc_region(hi))


def test_cone_generators_splits_lineality():
    rays, lineality = cone_generators([(1, 0, 0)], 3)
    assert rays == [(-1, 0, 0)]
    assert rank(lineality, 3) == 2
    assert all(v[0] == 0 for v in lineality)
