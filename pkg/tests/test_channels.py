from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multicone import channels as chs
from multicone import codec as cd
from multicone import model

ONES = model.ones()


def b(s):
    return np.array([int(c) for c in s], dtype=np.uint8)


# --- broadcast channel ----------------------------------------------------


def test_bc_transmit_selects_links():
    ch = chs.DeterministicBC(ONES, 4)
    x = [b(s) for s in ("0001", "0010", "0011", "0100", "0101", "0110", "0111")]
    a, bb, c, d, f, g, h = x  # canonical order 1,2,3,12,13,23,123
    y1, y2, y3 = chs.bc_transmit(ch, x)
    assert [v.tolist() for v in y1] == [v.tolist() for v in (a, d, f, h)]
    assert [v.tolist() for v in y2] == [v.tolist() for v in (bb, d, g, h)]
    assert [v.tolist() for v in y3] == [v.tolist() for v in (c, f, g, h)]


def test_bc_all_zero():
    ch = chs.DeterministicBC(ONES, 3)
    ys = chs.bc_transmit(ch, [np.zeros(3, np.uint8)] * 7)
    assert all(not v.any() for y in ys for v in y)


def test_bc_alphabet_violation():
    ch = chs.DeterministicBC(ONES, 4)
    with pytest.raises(chs.AlphabetViolation):
        chs.bc_transmit(ch, [b("0101")] * 6)
    with pytest.raises(chs.AlphabetViolation):
        chs.bc_transmit(ch, [b("010")] + [b("0101")] * 6)
    with pytest.raises(chs.AlphabetViolation):
        chs.bc_transmit(ch, [np.array([0, 2, 0, 1])] + [b("0101")] * 6)


def test_bc_block_must_be_integral():
    with pytest.raises(cd.NonIntegralSegment):
        chs.DeterministicBC((Fraction(1, 3),) + (1,) * 6, 4)


# --- coordination MAC -----------------------------------------------------


def mac_inputs(shared12, other12):
    ch = chs.CoordinationMAC(1, (1, 1, 1, 4, 1, 1, 1))
    x1 = {1: b("1"), 3: b(shared12), 5: b("0"), 7: b("1")}
    x2 = {2: b("0"), 3: b(other12), 6: b("1"), 7: b("1")}
    x3 = {4: b("1"), 5: b("0"), 6: b("1"), 7: b("1")}
    return ch, x1, x2, x3


def test_mac_match_passes():
    ch, *xs = mac_inputs("0110", "0110")
    y = chs.mac_transmit(ch, *xs)
    assert y[3].tolist() == [0, 1, 1, 0]
    assert y[7].tolist() == [1]
    assert y[1].tolist() == [1] and y[4].tolist() == [1]


def test_mac_mismatch_erases():
    ch, *xs = mac_inputs("0110", "0111")
    y = chs.mac_transmit(ch, *xs)
    assert y[3] is chs.ERASURE
    assert y[5].tolist() == [0]


def test_mac_triple_needs_all_three():
    ch, x1, x2, x3 = mac_inputs("0110", "0110")
    x3 = {**x3, 7: b("0")}
    assert chs.mac_transmit(ch, x1, x2, x3)[7] is chs.ERASURE


def test_mac_alphabet_violation():
    ch, x1, x2, x3 = mac_inputs("0110", "0110")
    with pytest.raises(chs.AlphabetViolation):
        chs.mac_transmit(ch, x1, x2)
    with pytest.raises(chs.AlphabetViolation):
        chs.mac_transmit(ch, {**x1, 2: b("1")}, x2, x3)
    with pytest.raises(chs.AlphabetViolation):
        chs.mac_transmit(ch, {**x1, 3: b("011")}, x2, x3)


def test_mac_block_matches_single_uses():
    rng = np.random.default_rng(5)
    ch = chs.CoordinationMAC(2, (1, 0, 1, 1, 1, 1, 1))
    w = ch.widths()
    uses = 6
    xs = []
    for t in (1, 2, 3):
        xs.append({m: rng.integers(0, 2, w[m] * uses, dtype=np.uint8) for m in w if m >> (t - 1) & 1})
    # force agreement on link 12 for half of the uses
    xs[1][3][: w[3] * 3] = xs[0][3][: w[3] * 3]
    out, erased = chs.mac_transmit_block(ch, uses, *xs)
    for u in range(uses):
        single = [{m: v[w[m] * u : w[m] * (u + 1)] for m, v in x.items()} for x in xs]
        y = chs.mac_transmit(ch, *single)
        for m in w:
            assert (y[m] is chs.ERASURE) == bool(erased[m][u])
    assert not erased[3][:3].any()


# --- end to end -----------------------------------------------------------


def test_xor_reaches_butterfly_point():
    rep = chs.run_end_to_end("bc", ONES, cd.get_op("bc3.xor"), 1024, 0, delta=1)
    assert rep.total_errors == 0 and rep.ok
    assert rep.achieved == model.rate_vector((1, 1, 1, 0, 0, 0, 3))


def test_identity_codec():
    r = (Fraction(1, 2), 1, Fraction(3, 4), 0, 1, Fraction(1, 4), 2)
    rep = chs.run_end_to_end("bc", r, None, 64, 3)
    assert rep.ok and rep.achieved == model.rate_vector(r)


def test_mac_common_message_on_pair_link():
    r = (0, 0, 0, 1, 0, 0, 0)
    rep = chs.run_end_to_end("mac", r, None, 64, 1)
    assert rep.ok and rep.erasures == 0
    assert rep.achieved == model.rate_vector(r)


def test_mac_op_end_to_end():
    op = cd.get_op("mac3.drop-123")
    rep = chs.run_end_to_end("mac", ONES, op, 64, 0, delta=1, k=2)
    assert rep.ok and rep.uses == 32
    assert rep.achieved == cd.Applied(op, 1).rates(ONES)


def test_infeasible_rates():
    with pytest.raises(chs.InfeasibleRates):
        chs.run_end_to_end("bc", ONES, cd.get_op("bc3.xor"), 1024, 0, delta=2)
    with pytest.raises(chs.InfeasibleRates):
        chs.run_end_to_end("bc", (-1,) + (1,) * 6, None, 8, 0)


def test_determinism():
    args = ("bc", ONES, cd.get_op("bc3.merge-12-via-1+2"), 256, 11)
    assert chs.run_end_to_end(*args, delta=Fraction(1, 2)).to_dict() == chs.run_end_to_end(*args, delta=Fraction(1, 2)).to_dict()


@settings(max_examples=25)
@given(
    st.sampled_from(cd.list_ops("bc", 3)),
    st.lists(st.fractions(min_value=0, max_value=2, max_denominator=4), min_size=7, max_size=7),
    st.integers(0, 1000),
)
def test_zero_errors_for_any_bc_op(op, r_star, seed):
    cap = cd.max_delta(op, r_star)
    delta = cap if cap is not None else 0
    n = 4 * cd.min_block_length(cd.Applied(op, delta), r_star)
    rep = chs.run_end_to_end("bc", r_star, op, n, seed, delta=delta)
    assert rep.ok
    assert rep.achieved == cd.Applied(op, delta).rates(r_star)


# --- leakage --------------------------------------------------------------


@pytest.mark.parametrize("k,n12", [(1, 1), (8, 1), (2, 4)])
def test_coordination_probability(k, n12):
    s = chs.coordination_stats(k, n12, trials=100_000, seed=0)
    assert s.expected == Fraction(1, 2 ** (k * n12))
    assert s.within(3.0)


def test_coordinated_inputs_always_pass():
    s = chs.coordination_stats(4, 1, trials=1000, seed=0, coordinated=True)
    assert s.probability == 1


def test_coordination_stats_trials_positive():
    with pytest.raises(ValueError):
        chs.coordination_stats(1, trials=0)


def test_leakage_trend_decreasing_and_bounded():
    stats = chs.leakage_trend((1, 2, 4, 8), trials=100_000)
    tp = [s.throughput for s in stats]
    assert all(a > b for a, b in zip(tp, tp[1:]))
    assert all(s.k * s.throughput <= 3 for s in stats)


def _sweep(r_star):
    from multicone.geometry import h_to_v

    for v in h_to_v(model.bc_region(r_star)).vertices:
        chain = cd.plan_chain("bc", r_star, v)
        assert chain is not None, v
        n = cd.min_block_length(chain, r_star)
        n *= -(-64 // n)
        rep = chs.run_end_to_end("bc", r_star, chain, n, 0)
        assert rep.ok and rep.achieved == tuple(v), v


def test_vertex_sweep_all_ones():
    _sweep(ONES)


@pytest.mark.parametrize("seed", range(5))
def test_vertex_sweep_random(seed):
    import random

    rng = random.Random(seed)
    _sweep(tuple(Fraction(rng.randint(0, 8), rng.randint(1, 4)) for _ in range(7)))
