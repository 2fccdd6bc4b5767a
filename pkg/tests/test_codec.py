import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from multicone import codec as cd
from multicone import model
from multicone.geometry import contains

ONES = model.ones()


def bits(s):
    return np.array([int(ch) for ch in s], dtype=np.uint8)


def messages_for(layout, n, seed=0):
    return cd.random_messages(layout.message_lengths, n, cd.rng_for(seed))


# --- registry -------------------------------------------------------------


@pytest.mark.parametrize("channel,l,count", [("bc", 3, 16), ("bc", 2, 3), ("mac", 3, 10), ("mac", 2, 3)])
def test_op_counts_and_directions(channel, l, count):
    ops = cd.list_ops(channel, l)
    assert len(ops) == count
    assert sorted(op.direction for op in ops) == sorted(model.cone_rays(channel, l))


def test_named_directions():
    dirs = {op.direction for op in cd.list_ops("bc", 3)}
    assert (0, 0, 0, -1, -1, -1, 2) in dirs
    assert {op.direction for op in cd.list_ops("bc", 2)} == {(1, 0, -1), (0, 1, -1), (-1, -1, 1)}
    assert {op.direction for op in cd.list_ops("mac", 2)} == {(-1, 0, 1), (0, -1, 1), (0, 0, -1)}


def test_directions_in_recession_cone():
    for ch in ("bc", "mac"):
        for l in (2, 3):
            for op in cd.list_ops(ch, l):
                for g in model.g_columns(ch, l):
                    assert sum(a * b for a, b in zip(g, op.direction)) <= 0


def test_registry_json():
    reg = json.loads(cd.registry_json())
    assert len(reg) == 32
    assert {"id", "channel", "l", "direction"} <= set(reg[0])


def test_get_op_unknown():
    with pytest.raises(cd.UnknownOp):
        cd.get_op("bc3.nope")


# --- max_delta ------------------------------------------------------------


def test_max_delta_examples():
    op = next(o for o in cd.list_ops("bc", 3) if o.direction == (-1, -1, 0, 1, 0, 0, 0))
    assert cd.max_delta(op, ONES) == 1
    r = (Fraction(1, 3), Fraction(1, 2), 1, 1, 1, 1, 1)
    assert cd.max_delta(op, r) == Fraction(1, 3)
    xor = cd.get_op("bc3.xor")
    r = (1, 1, 1, Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), 1)
    assert cd.max_delta(xor, r) == Fraction(1, 4)
    for op in cd.all_ops():
        assert cd.max_delta(op, (0,) * len(op.direction)) in (0, None)


def test_max_delta_unbounded_is_none():
    op = cd.get_op("mac3.drop-123")
    assert cd.max_delta(op, ONES) == 1
    assert all(cd.max_delta(o, ONES) is not None for o in cd.list_ops("bc", 3))


# --- encode / decode ------------------------------------------------------


def test_xor_encode_example():
    xor = cd.get_op("bc3.xor")
    a, b, c = bits("1010"), bits("0110"), bits("0001")
    streams = {1: bits("1111"), 2: bits("0000"), 4: bits("1001"), 3: bits(""), 5: bits(""), 6: bits(""), 7: np.concatenate([a, b, c])}
    w = cd.encode(xor, ONES, 1, cd.MessageVector(4, streams))
    assert w.streams[6].tolist() == [1, 1, 0, 0]
    assert w.rates() == dict(zip(model.indices(3), ONES))
    # receiver 2 sees W12 = A and W23 = A^B and recovers B
    view2 = {m: w.streams[m] for m in (2, 3, 6, 7)}
    dec2 = cd.decode(xor, ONES, 1, 2, cd.MessageVector(4, view2))
    assert dec2[7].tolist() == np.concatenate([a, b, c]).tolist()
    # receiver 3 gets A from W13 (= B) and W23
    view3 = {m: w.streams[m] for m in (4, 5, 6, 7)}
    dec3 = cd.decode(xor, ONES, 1, 3, cd.MessageVector(4, view3))
    assert dec3[7].tolist() == dec2[7].tolist()


def test_merge_12_replicates_first_half():
    op = cd.get_op("bc3.merge-12-via-1+2")
    lay = cd.op_layout(op, ONES, 1, 8)
    m = messages_for(lay, 8)
    assert m.rates() == dict(zip(model.indices(3), (0, 0, 1, 2, 1, 1, 1)))
    w = cd.encode(op, ONES, 1, m)
    m12 = m.streams[3]
    assert w.streams[1].tolist() == m12[:8].tolist() == w.streams[2].tolist()
    assert w.streams[3].tolist() == m12[8:].tolist()


def test_delta_zero_is_identity():
    for op in cd.list_ops("bc", 3):
        lay = cd.op_layout(op, ONES, 0, 16)
        m = messages_for(lay, 16, 3)
        assert cd.encode(op, ONES, 0, m).same_as(m)


def test_errors():
    op = cd.get_op("bc3.xor")
    with pytest.raises(cd.NonIntegralSegment):
        cd.op_layout(op, ONES, Fraction(1, 3), 4)
    with pytest.raises(cd.DeltaOutOfRange):
        cd.op_layout(op, ONES, 2, 4)
    lay = cd.op_layout(op, ONES, 1, 4)
    bad = cd.MessageVector(4, {m: np.zeros(3, np.uint8) for m in model.indices(3)})
    with pytest.raises(cd.RateMismatch):
        cd.encode(op, ONES, 1, bad)
    w = cd.encode(op, ONES, 1, messages_for(lay, 4))
    short = {m: w.streams[m][:2] for m in (1, 3, 5, 7)}
    with pytest.raises(cd.LengthMismatch):
        cd.decode(op, ONES, 1, 1, cd.MessageVector(4, short))


rates = st.lists(st.fractions(min_value=0, max_value=2, max_denominator=4), min_size=7, max_size=7)


@given(st.sampled_from(cd.list_ops("bc", 3)), rates, st.sampled_from([0, Fraction(1, 2), 1]), st.integers(0, 5))
def test_round_trip_and_receiver_agreement(op, r_star, frac, seed):
    cap = cd.max_delta(op, r_star)
    delta = frac * (cap if cap is not None else 1)
    n = 4 * cd.min_block_length(cd.Applied(op, delta), r_star)
    lay = cd.op_layout(op, r_star, delta, n)
    m = messages_for(lay, n, seed)
    w = cd.encode(op, r_star, delta, m)
    assert w.lengths() == {k: int(n * Fraction(r)) for k, r in zip(model.indices(3), r_star)}
    decoded = {}
    for i in (1, 2, 3):
        links, _ = cd.receiver_view("bc", 3, i)
        est = cd.decode(op, r_star, delta, i, cd.MessageVector(n, {k: w.streams[k] for k in links}))
        for k, v in est.items():
            assert v.tolist() == m.streams[k].tolist()
            if k in decoded:
                assert decoded[k].tolist() == v.tolist()
            decoded[k] = v


@given(st.sampled_from(cd.list_ops("mac", 3)), rates, st.sampled_from([0, Fraction(1, 2), 1]))
def test_mac_round_trip_and_transmitter_knowledge(op, r_star, frac):
    cap = cd.max_delta(op, r_star)
    delta = frac * (cap if cap is not None else 1)
    n = 2 * cd.min_block_length(cd.Applied(op, delta), r_star)
    lay = cd.op_layout(op, r_star, delta, n)
    m = messages_for(lay, n, 1)
    wires = {}
    for t in (1, 2, 3):
        known = {k: s for k, s in m.streams.items() if k >> (t - 1) & 1}
        for link, bits_ in cd.transmitter_encode(lay, t, known).items():
            if link in wires:
                assert wires[link].tolist() == bits_.tolist()
            wires[link] = bits_
    est = cd.decode(op, r_star, delta, 0, cd.MessageVector(n, wires))
    for k, v in est.items():
        assert v.tolist() == m.streams[k].tolist()


def test_transmitter_cannot_use_unknown_messages():
    lay = cd.op_layout(cd.get_op("mac3.carry-12-on-1"), ONES, 1, 4)
    m = messages_for(lay, 4)
    with pytest.raises(PermissionError):
        cd.transmitter_encode(lay, 1, {1: m.streams[1]})


# --- time sharing and chains ----------------------------------------------


def test_timeshare_examples():
    ops = {op.direction: op for op in cd.list_ops("bc", 2)}
    sched = cd.Schedule.of([(ops[(1, 0, -1)], 1, Fraction(1, 2)), (ops[(0, 1, -1)], 1, Fraction(1, 2))])
    r, _ = cd.timeshare(sched, (1, 1, 1))
    assert r == (Fraction(3, 2), Fraction(3, 2), 0)
    assert contains(model.bc_region((1, 1, 1)), r)
    single = cd.Schedule.of([(ops[(1, 0, -1)], 1, 1)])
    assert cd.timeshare(single, (1, 1, 1))[0] == cd.Applied(ops[(1, 0, -1)], 1).rates((1, 1, 1))
    assert cd.timeshare(cd.Schedule(), (1, 1, 1))[0] == (1, 1, 1)


def test_timeshare_negative_rejected():
    op = cd.get_op("bc2.carry-1-on-12")
    sched = cd.Schedule.of([(op, 2, Fraction(1, 2))])
    with pytest.raises(cd.NegativeCompositeRate):
        cd.timeshare(sched, (1, 1, 1))


def test_schedule_layout_round_trip():
    ops = cd.list_ops("bc", 3)
    sched = cd.Schedule.of([(ops[0], 1, Fraction(1, 4)), (cd.get_op("bc3.xor"), 1, Fraction(1, 2))])
    n = 4 * cd.min_block_length(sched, ONES)
    lay = sched.layout(ONES, n)
    m = messages_for(lay, n, 2)
    assert {k: Fraction(v, n) for k, v in lay.message_lengths.items()} == dict(zip(model.indices(3), sched.rates(ONES)))
    w = cd.encode_with(lay, m)
    for i in (1, 2, 3):
        links, _ = cd.receiver_view("bc", 3, i)
        est = cd.decode_with(lay, "bc", 3, i, cd.MessageVector(n, {k: w.streams[k] for k in links}))
        assert all(v.tolist() == m.streams[k].tolist() for k, v in est.items())


def test_plan_chain_reaches_vertex():
    target = (0, 0, 1, 2, 1, 1, 1)
    chain = cd.plan_chain("bc", ONES, target)
    assert chain is not None and chain.rates(ONES) == model.rate_vector(target)


def test_compose_and_concat_lengths():
    a = cd.op_layout(cd.get_op("bc3.xor"), ONES, 1, 4)
    b = cd.identity_layout(a.wire_lengths)
    assert cd.compose(b, a).wire_lengths == b.wire_lengths
    joined = cd.concat([a, a])
    assert joined.wire_lengths == {k: 2 * v for k, v in a.wire_lengths.items()}


# --- fixtures -------------------------------------------------------------


def test_fixture_round_trip(tmp_path):
    lay = cd.op_layout(cd.get_op("bc3.xor"), ONES, 1, 12)
    m = messages_for(lay, 12, 9)
    path = tmp_path / "m.bin"
    cd.write_fixture(path, m)
    side = json.loads((tmp_path / "m.bin.json").read_text())
    assert side["n"] == 12
    assert cd.read_fixture(path).same_as(m)
