"""Universal encoding/decoding operations over bit streams.

Every codec here is described by a *layout*: each wire stream ``W_I`` is a
concatenation of pieces, and each piece is the XOR of equal-length slices of
message streams (an empty XOR is a run of zeros).  Encoding evaluates the
layout; decoding solves it from the wires a receiver sees.  Sequential
composition substitutes one layout into another and time sharing
concatenates layouts over sub-blocks, so one encoder and one solver serve
single operations, chains and schedules alike.

Rates are exact rationals.  With block length ``n`` a stream of rate ``R``
has ``n*R`` bits, which must be an integer (no rounding is ever done).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from . import model
from .rational import as_fraction, fmt


class RateMismatch(ValueError):
    pass


class NonIntegralSegment(ValueError):
    pass


class LengthMismatch(ValueError):
    pass


class DeltaOutOfRange(ValueError):
    pass


class NegativeCompositeRate(ValueError):
    pass


class DecodeFailure(RuntimeError):
    pass


class UnknownOp(KeyError):
    pass


# ---------------------------------------------------------------------------
# operations


@dataclass(frozen=True)
class CodecOp:
    """One extremal operation.

    kind ``carry``: bits of message ``gain`` ride on link ``links[0]``.
    kind ``merge``: the first bits of ``gain`` are replicated on both links.
    kind ``xor``: two substreams of message 123 go over the three pairwise
    links as A, B and A xor B.
    kind ``drop``: link ``links[0]`` is padded with zeros.
    """

    id: str
    channel: str
    l: int
    kind: str
    direction: tuple[int, ...]
    gain: int | None
    links: tuple[int, ...]

    @property
    def printed_column(self) -> int | None:
        """1-based column of the printed H matrix holding this direction.

        For the three-user MAC the printed columns carry the opposite sign, so
        the match is against the negated column.  The printed two-user MAC
        matrix does not describe the MAC at all, so there is no column.
        """
        if self.channel == "mac" and self.l == 2:
            return None
        cols = model.columns(model.PRINTED.h(self.channel, self.l))
        target = self.direction
        if self.channel == "mac":
            target = tuple(-x for x in target)
        return cols.index(target) + 1 if target in cols else None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "channel": self.channel,
            "l": self.l,
            "kind": self.kind,
            "direction": list(self.direction),
            "printed_column": self.printed_column,
        }


def _direction(l: int, gain: int | None, gain_coeff: int, links: Iterable[int]) -> tuple[int, ...]:
    v = [0] * len(model.indices(l))
    if gain is not None:
        v[model.position(gain, l)] += gain_coeff
    for link in links:
        v[model.position(link, l)] -= 1
    return tuple(v)


def _build_ops(channel: str, l: int) -> list[CodecOp]:
    order = model.indices(l)
    pre = f"{channel}{l}"
    lab = model.label
    ops = []
    for small in order:
        for big in order:
            if small & big != small or bin(big).count("1") != bin(small).count("1") + 1:
                continue
            if channel == "bc":
                gain, link = small, big
            else:
                gain, link = big, small
            ops.append(
                CodecOp(
                    f"{pre}.carry-{lab(gain)}-on-{lab(link)}",
                    channel, l, "carry", _direction(l, gain, 1, [link]), gain, (link,),
                )
            )
    if channel == "bc":
        for k in order:
            parts = [(a, k ^ a) for a in order if a & k == a and a != k and a < (k ^ a)]
            for a, b in parts:
                ops.append(
                    CodecOp(
                        f"{pre}.merge-{lab(k)}-via-{lab(a)}+{lab(b)}",
                        channel, l, "merge", _direction(l, k, 1, [a, b]), k, (a, b),
                    )
                )
        if l == 3:
            pairs = (0b011, 0b101, 0b110)
            ops.append(CodecOp(f"{pre}.xor", channel, l, "xor", _direction(l, 0b111, 2, pairs), 0b111, pairs))
    else:
        top = order[-1]
        ops.append(CodecOp(f"{pre}.drop-{lab(top)}", channel, l, "drop", _direction(l, None, 0, [top]), None, (top,)))
    return ops


_REGISTRY = {(c, l): tuple(_build_ops(c, l)) for c in model.CHANNELS for l in (2, 3)}


def list_ops(channel: str, l: int) -> list[CodecOp]:
    return list(_REGISTRY[(channel.lower(), l)])


def all_ops() -> list[CodecOp]:
    return [op for ops in _REGISTRY.values() for op in ops]


def get_op(key: str, channel: str | None = None, l: int | None = None) -> CodecOp:
    """Look up by id, or by printed H column (``"H16"``) when channel and l are given."""
    for op in all_ops():
        if op.id == key:
            return op
    if channel is not None and l is not None and key.upper().startswith("H"):
        for op in list_ops(channel, l):
            if str(op.printed_column) == key[1:]:
                return op
    raise UnknownOp(key)


def registry_json() -> str:
    return json.dumps([op.to_dict() for op in all_ops()], indent=2)


def max_delta(op: CodecOp, r_star: Sequence) -> Fraction | None:
    """Largest delta keeping ``R* + direction*delta >= 0``; None when unbounded."""
    r_star = model.rate_vector(r_star, op.l)
    vals = [r / -d for r, d in zip(r_star, op.direction) if d < 0]
    return min(vals) if vals else None


def shifted(r: Sequence, direction: Sequence, delta) -> tuple[Fraction, ...]:
    delta = as_fraction(delta)
    return tuple(as_fraction(x) + d * delta for x, d in zip(r, direction))


# ---------------------------------------------------------------------------
# layouts


@dataclass(frozen=True)
class Piece:
    """XOR of ``(message, start)`` slices, each ``length`` bits long."""

    length: int
    terms: tuple[tuple[int, int], ...] = ()


Wire = tuple[Piece, ...]


@dataclass(frozen=True)
class Layout:
    message_lengths: Mapping[int, int]
    wire_lengths: Mapping[int, int]
    wires: Mapping[int, Wire]


def _bits(n: int, rate) -> int:
    total = n * as_fraction(rate)
    if total.denominator != 1:
        raise NonIntegralSegment(f"n*R = {total} is not an integer (n={n}, R={rate})")
    return int(total)


def identity_layout(lengths: Mapping[int, int]) -> Layout:
    wires = {m: ((Piece(k, ((m, 0),)),) if k else ()) for m, k in lengths.items()}
    return Layout(dict(lengths), dict(lengths), wires)


def _wire(*pieces: Piece) -> Wire:
    return tuple(p for p in pieces if p.length)


def op_layout(op: CodecOp, r_star: Sequence, delta, n: int) -> Layout:
    r_star = model.rate_vector(r_star, op.l)
    delta = as_fraction(delta)
    if delta < 0:
        raise DeltaOutOfRange("delta must be nonnegative")
    cap = max_delta(op, r_star)
    if cap is not None and delta > cap:
        raise DeltaOutOfRange(f"delta {delta} exceeds max_delta {cap} for {op.id}")
    order = model.indices(op.l)
    rates = shifted(r_star, op.direction, delta)
    wl = {m: _bits(n, r) for m, r in zip(order, r_star)}
    ml = {m: _bits(n, r) for m, r in zip(order, rates)}
    d = _bits(n, delta)
    wires = dict(identity_layout(ml).wires)

    def own(m: int, start: int = 0) -> Piece:
        return Piece(ml[m] - start, ((m, start),))

    if op.kind == "carry":
        g, (link,) = op.gain, op.links
        wires[g] = _wire(Piece(wl[g], ((g, 0),)))
        wires[link] = _wire(Piece(d, ((g, wl[g]),)), own(link))
    elif op.kind == "merge":
        k, (a, b) = op.gain, op.links
        shared = Piece(d, ((k, 0),))
        wires[k] = _wire(own(k, d))
        wires[a] = _wire(shared, own(a))
        wires[b] = _wire(shared, own(b))
    elif op.kind == "xor":
        k = op.gain
        p12, p13, p23 = op.links
        first, second = Piece(d, ((k, 0),)), Piece(d, ((k, d),))
        wires[p12] = _wire(first, own(p12))
        wires[p13] = _wire(second, own(p13))
        wires[p23] = _wire(Piece(d, ((k, 0), (k, d))), own(p23))
        wires[k] = _wire(own(k, 2 * d))
    elif op.kind == "drop":
        (link,) = op.links
        wires[link] = _wire(own(link), Piece(d))
    else:  # pragma: no cover
        raise ValueError(op.kind)
    return Layout(ml, wl, wires)


def _slice(wire: Wire, start: int, length: int) -> list[Piece]:
    out = []
    pos = 0
    end = start + length
    for p in wire:
        lo, hi = max(start, pos), min(end, pos + p.length)
        if lo < hi:
            off = lo - pos
            out.append(Piece(hi - lo, tuple((m, s + off) for m, s in p.terms)))
        pos += p.length
        if pos >= end:
            break
    if sum(p.length for p in out) != length:
        raise LengthMismatch("slice runs past the end of a stream")
    return out


def _cut(pieces: list[Piece], points: list[int]) -> list[Piece]:
    out = []
    pos = 0
    for p in pieces:
        inner = [x - pos for x in points if pos < x < pos + p.length]
        prev = 0
        for x in inner + [p.length]:
            out.append(Piece(x - prev, tuple((m, s + prev) for m, s in p.terms)))
            prev = x
        pos += p.length
    return out


def _xor_terms(parts: list[tuple[tuple[int, int], ...]]) -> tuple[tuple[int, int], ...]:
    parity: dict[tuple[int, int], int] = {}
    for terms in parts:
        for t in terms:
            parity[t] = parity.get(t, 0) ^ 1
    return tuple(sorted(t for t, v in parity.items() if v))


def _merge_runs(pieces: list[Piece]) -> Wire:
    out: list[Piece] = []
    for p in pieces:
        if out:
            q = out[-1]
            if len(q.terms) == len(p.terms) and all(
                mq == mp and sq + q.length == sp for (mq, sq), (mp, sp) in zip(q.terms, p.terms)
            ):
                out[-1] = Piece(q.length + p.length, q.terms)
                continue
        out.append(p)
    return tuple(out)


def compose(outer: Layout, inner: Layout) -> Layout:
    """Apply ``inner`` first: its wires are the messages ``outer`` encodes."""
    if dict(outer.message_lengths) != dict(inner.wire_lengths):
        raise RateMismatch("layouts do not chain: intermediate stream lengths differ")
    wires = {}
    for link, wire in outer.wires.items():
        pieces: list[Piece] = []
        for p in wire:
            expansions = [_slice(inner.wires[m], s, p.length) for m, s in p.terms]
            if not expansions:
                pieces.append(p)
                continue
            points = sorted({x for e in expansions for x in np.cumsum([q.length for q in e])[:-1].tolist()})
            cut = [_cut(e, points) for e in expansions]
            for segs in zip(*cut):
                pieces.append(Piece(segs[0].length, _xor_terms([q.terms for q in segs])))
        wires[link] = _merge_runs(pieces)
    return Layout(dict(inner.message_lengths), dict(outer.wire_lengths), wires)


def concat(layouts: Sequence[Layout]) -> Layout:
    """Time sharing: sub-block k uses ``layouts[k]``; streams are concatenated in order."""
    keys = list(layouts[0].wire_lengths)
    moff = {m: 0 for m in keys}
    wires: dict[int, list[Piece]] = {m: [] for m in keys}
    wl = {m: 0 for m in keys}
    for lay in layouts:
        for link in keys:
            for p in lay.wires[link]:
                wires[link].append(Piece(p.length, tuple((m, s + moff[m]) for m, s in p.terms)))
            wl[link] += lay.wire_lengths[link]
        for m in keys:
            moff[m] += lay.message_lengths[m]
    return Layout(moff, wl, {k: _merge_runs(v) for k, v in wires.items()})


# ---------------------------------------------------------------------------
# message vectors


@dataclass(frozen=True, eq=False)
class MessageVector:
    """Bit streams keyed by message index (0/1 ``uint8`` arrays) for block length ``n``."""

    n: int
    streams: Mapping[int, np.ndarray]

    def lengths(self) -> dict[int, int]:
        return {m: len(s) for m, s in self.streams.items()}

    def rates(self) -> dict[int, Fraction]:
        return {m: Fraction(len(s), self.n) for m, s in self.streams.items()}

    def same_as(self, other: "MessageVector") -> bool:
        if self.n != other.n or set(self.streams) != set(other.streams):
            return False
        return all(np.array_equal(self.streams[m], other.streams[m]) for m in self.streams)


def random_messages(lengths: Mapping[int, int], n: int, rng: np.random.Generator) -> MessageVector:
    return MessageVector(n, {m: rng.integers(0, 2, size=k, dtype=np.uint8) for m, k in lengths.items()})


def rng_for(seed: int, trial: int = 0) -> np.random.Generator:
    """Counter-based Philox stream keyed by (seed, trial)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, trial])))


def _check_lengths(expected: Mapping[int, int], streams: Mapping[int, np.ndarray], what: str, exc=RateMismatch):
    if set(expected) != set(streams):
        raise exc(f"{what}: expected streams {sorted(expected)}, got {sorted(streams)}")
    for m, k in expected.items():
        if len(streams[m]) != k:
            raise exc(f"{what}: stream {model.label(m)} has {len(streams[m])} bits, expected {k}")


def evaluate(layout: Layout, messages: Mapping[int, np.ndarray], links: Iterable[int] | None = None) -> dict[int, np.ndarray]:
    """Compute the wire streams (all of them, or only ``links``)."""
    links = layout.wires if links is None else links
    out = {}
    for link in links:
        chunks = []
        for p in layout.wires[link]:
            acc = np.zeros(p.length, dtype=np.uint8)
            for m, s in p.terms:
                acc ^= messages[m][s : s + p.length]
            chunks.append(acc)
        out[link] = np.concatenate(chunks) if chunks else np.zeros(0, dtype=np.uint8)
    return out


def solve(layout: Layout, observed: Mapping[int, np.ndarray], wanted: Iterable[int]) -> dict[int, np.ndarray]:
    """Recover ``wanted`` messages from the observed wires by peeling XOR pieces."""
    for link, w in observed.items():
        if len(w) != layout.wire_lengths[link]:
            raise LengthMismatch(f"wire {model.label(link)} has {len(w)} bits, expected {layout.wire_lengths[link]}")
    val = {m: np.zeros(k, dtype=np.uint8) for m, k in layout.message_lengths.items()}
    known = {m: np.zeros(k, dtype=bool) for m, k in layout.message_lengths.items()}
    pending = []
    for link, w in observed.items():
        pos = 0
        for p in layout.wires[link]:
            if p.terms:
                pending.append((p, w[pos : pos + p.length]))
            pos += p.length
    progress = True
    while pending and progress:
        progress = False
        rest = []
        for p, bits in pending:
            unknown = [t for t in p.terms if not known[t[0]][t[1] : t[1] + p.length].all()]
            if len(unknown) > 1:
                rest.append((p, bits))
                continue
            if unknown:
                m, s = unknown[0]
                acc = bits.copy()
                for t in p.terms:
                    if t != unknown[0]:
                        acc ^= val[t[0]][t[1] : t[1] + p.length]
                val[m][s : s + p.length] = acc
                known[m][s : s + p.length] = True
                progress = True
        pending = rest
    out = {}
    for m in wanted:
        if not known[m].all():
            raise DecodeFailure(f"message {model.label(m)} is not determined by the observed wires")
        out[m] = val[m]
    return out


def links_known_to(layout: Layout, link: int, knows: Iterable[int]) -> bool:
    knows = set(knows)
    return all(m in knows for p in layout.wires[link] for m, _ in p.terms)


# ---------------------------------------------------------------------------
# transforms: a single op, a chain of ops, a time-sharing schedule


@dataclass(frozen=True)
class Applied:
    op: CodecOp
    delta: Fraction

    def __post_init__(self):
        object.__setattr__(self, "delta", as_fraction(self.delta))

    @property
    def l(self) -> int:
        return self.op.l

    @property
    def channel(self) -> str:
        return self.op.channel

    def rates(self, r_star: Sequence) -> tuple[Fraction, ...]:
        return shifted(r_star, self.op.direction, self.delta)

    def layout(self, r_star: Sequence, n: int) -> Layout:
        return op_layout(self.op, r_star, self.delta, n)

    def to_dict(self) -> dict:
        return {"op": self.op.id, "delta": fmt(self.delta)}


@dataclass(frozen=True)
class Pad:
    """Lower message rates by ``amounts``: each wire is its message followed by zeros."""

    amounts: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "amounts", tuple(as_fraction(x) for x in self.amounts))
        if any(x < 0 for x in self.amounts):
            raise ValueError("pad amounts must be nonnegative")

    def rates(self, r_star: Sequence) -> tuple[Fraction, ...]:
        return tuple(as_fraction(x) - a for x, a in zip(r_star, self.amounts))

    def layout(self, r_star: Sequence, n: int) -> Layout:
        r_star = tuple(as_fraction(x) for x in r_star)
        order = model.indices(model.dimension_to_l(len(r_star)))
        rates = self.rates(r_star)
        if any(x < 0 for x in rates):
            raise DeltaOutOfRange("padding exceeds the available rate")
        wl = {m: _bits(n, r) for m, r in zip(order, r_star)}
        ml = {m: _bits(n, r) for m, r in zip(order, rates)}
        wires = {m: _wire(Piece(ml[m], ((m, 0),)), Piece(wl[m] - ml[m])) for m in order}
        return Layout(ml, wl, wires)

    def to_dict(self) -> dict:
        return {"pad": [fmt(x) for x in self.amounts]}


@dataclass(frozen=True)
class Chain:
    """Stages applied one after another, each taking the previous output rates as its R*."""

    steps: tuple[Union[Applied, Pad], ...]

    def rates(self, r_star: Sequence) -> tuple[Fraction, ...]:
        r = tuple(as_fraction(x) for x in r_star)
        for step in self.steps:
            r = step.rates(r)
        return r

    def layout(self, r_star: Sequence, n: int) -> Layout:
        r = tuple(as_fraction(x) for x in r_star)
        if not self.steps:
            order = model.indices(model.dimension_to_l(len(r)))
            return identity_layout({m: _bits(n, x) for m, x in zip(order, r)})
        lay = None
        for step in self.steps:
            nxt = step.layout(r, n)
            lay = nxt if lay is None else compose(lay, nxt)
            r = step.rates(r)
        return lay

    def to_dict(self) -> dict:
        return {"chain": [s.to_dict() for s in self.steps]}


Transform = Union[Applied, Pad, Chain]


@dataclass(frozen=True)
class SchedulePart:
    transform: Transform
    weight: Fraction

    def __post_init__(self):
        object.__setattr__(self, "weight", as_fraction(self.weight))


@dataclass(frozen=True)
class Schedule:
    parts: tuple[SchedulePart, ...] = ()

    @classmethod
    def of(cls, items: Iterable[tuple]) -> "Schedule":
        """Build from ``(op, delta, weight)`` or ``(transform, weight)`` tuples."""
        parts = []
        for item in items:
            if len(item) == 3:
                op, delta, weight = item
                parts.append(SchedulePart(Applied(op, delta), weight))
            else:
                tr, weight = item
                parts.append(SchedulePart(tr, weight))
        return cls(tuple(parts))

    def validate(self) -> None:
        if any(p.weight < 0 for p in self.parts):
            raise ValueError("schedule weights must be nonnegative")
        if sum((p.weight for p in self.parts), Fraction(0)) > 1:
            raise ValueError("schedule weights must sum to at most 1")

    def rates(self, r_star: Sequence) -> tuple[Fraction, ...]:
        self.validate()
        r_star = tuple(as_fraction(x) for x in r_star)
        total = list(r_star)
        for p in self.parts:
            sub = p.transform.rates(r_star)
            total = [t + p.weight * (s - r) for t, s, r in zip(total, sub, r_star)]
        return tuple(total)

    def layout(self, r_star: Sequence, n: int) -> Layout:
        self.validate()
        r_star = tuple(as_fraction(x) for x in r_star)
        order = model.indices(model.dimension_to_l(len(r_star)))
        subs = []
        used = Fraction(0)
        for p in self.parts:
            if p.weight == 0:
                continue
            nk = n * p.weight
            if nk.denominator != 1:
                raise NonIntegralSegment(f"sub-block n*w = {nk} is not an integer")
            subs.append(p.transform.layout(r_star, int(nk)))
            used += p.weight
        rem = n * (1 - used)
        if rem.denominator != 1:
            raise NonIntegralSegment(f"remainder block {rem} is not an integer")
        subs.append(identity_layout({m: _bits(int(rem), r) for m, r in zip(order, r_star)}))
        return concat(subs)

    def to_dict(self) -> dict:
        return {"schedule": [{**p.transform.to_dict(), "weight": fmt(p.weight)} for p in self.parts]}


def timeshare(schedule: Schedule, r_star: Sequence) -> tuple[tuple[Fraction, ...], Schedule]:
    """Achieved rate vector of the schedule; the schedule itself is the composite codec."""
    rates = schedule.rates(r_star)
    if any(x < 0 for x in rates):
        raise NegativeCompositeRate(f"composite rate has a negative entry: {[fmt(x) for x in rates]}")
    for p in schedule.parts:
        if any(x < 0 for x in p.transform.rates(r_star)):
            raise NegativeCompositeRate(f"part {p.transform.to_dict()} drives a rate negative")
    return rates, schedule


def _fractions(codec, r_star) -> list[Fraction]:
    r_star = tuple(as_fraction(x) for x in r_star)
    if isinstance(codec, Applied):
        return [*r_star, codec.delta, *codec.rates(r_star)]
    if isinstance(codec, Pad):
        return [*r_star, *codec.rates(r_star)]
    if isinstance(codec, Chain):
        out = list(r_star)
        r = r_star
        for step in codec.steps:
            out += _fractions(step, r)
            r = step.rates(r)
        return out
    if isinstance(codec, Schedule):
        out = list(r_star)
        used = Fraction(0)
        for p in codec.parts:
            used += p.weight
            out += [p.weight * x for x in _fractions(p.transform, r_star)]
        out += [(1 - used) * x for x in r_star] + [used]
        return out
    raise TypeError(type(codec).__name__)


def min_block_length(codec, r_star: Sequence) -> int:
    """Smallest n making every segment boundary of the codec an integer."""
    from .rational import common_denominator

    return common_denominator(_fractions(codec, r_star))


# ---------------------------------------------------------------------------
# encode / decode entry points


Codec = Union[CodecOp, Applied, Pad, Chain, Schedule]


def layout_for(codec: Codec, r_star: Sequence, n: int, delta=None) -> Layout:
    if isinstance(codec, CodecOp):
        if delta is None:
            raise ValueError("a bare CodecOp needs a delta")
        codec = Applied(codec, delta)
    return codec.layout(r_star, n)


def encode(op: CodecOp, r_star: Sequence, delta, m: MessageVector) -> MessageVector:
    """Map messages at rates ``R* + direction*delta`` onto wires at rates ``R*``."""
    return encode_with(layout_for(op, r_star, m.n, delta), m)


def encode_with(layout: Layout, m: MessageVector) -> MessageVector:
    _check_lengths(layout.message_lengths, m.streams, "message vector")
    return MessageVector(m.n, evaluate(layout, m.streams))


def receiver_view(channel: str, l: int, receiver: int) -> tuple[list[int], list[int]]:
    """(links observed, messages wanted). The MAC's single receiver is numbered 0."""
    order = model.indices(l)
    if channel == "mac":
        if receiver != 0:
            raise ValueError("the MAC has one receiver, numbered 0")
        return list(order), list(order)
    if not 1 <= receiver <= l:
        raise ValueError(f"receiver must be in 1..{l}")
    bit = 1 << (receiver - 1)
    mine = [m for m in order if m & bit]
    return mine, mine


def decode(op: CodecOp, r_star: Sequence, delta, receiver: int, w_hat: MessageVector) -> dict[int, np.ndarray]:
    return decode_with(layout_for(op, r_star, w_hat.n, delta), op.channel, op.l, receiver, w_hat)


def decode_with(layout: Layout, channel: str, l: int, receiver: int, w_hat: MessageVector) -> dict[int, np.ndarray]:
    links, wanted = receiver_view(channel, l, receiver)
    expected = {k: layout.wire_lengths[k] for k in links}
    _check_lengths(expected, w_hat.streams, f"receiver {receiver} input", LengthMismatch)
    return solve(layout, w_hat.streams, wanted)


def transmitter_encode(layout: Layout, transmitter: int, known: Mapping[int, np.ndarray]) -> dict[int, np.ndarray]:
    """MAC encoder of one transmitter: only its own links, only its own messages."""
    bit = 1 << (transmitter - 1)
    mine = [k for k in layout.wires if k & bit]
    for link in mine:
        if not links_known_to(layout, link, known):
            raise PermissionError(f"transmitter {transmitter} cannot compute link {model.label(link)}")
    return evaluate(layout, known, mine)


# ---------------------------------------------------------------------------
# reaching a target rate vector


def plan_chain(channel: str, r_star: Sequence, target: Sequence) -> Chain | None:
    """A chain reaching exactly ``target``; None if no such chain is found.

    A minimal-total delta combination is found by exact LP, then ops are
    ordered greedily so that every intermediate rate vector stays
    nonnegative (an op that cannot be applied in full is applied up to its
    current max_delta and revisited).  Surplus rate is padded away at the end.
    """
    from .lp import minimize

    r_star = tuple(as_fraction(x) for x in r_star)
    target = tuple(as_fraction(x) for x in target)
    l = model.dimension_to_l(len(r_star))
    ops = list_ops(channel, l)
    dim = len(r_star)
    a_eq = [[Fraction(op.direction[j]) for op in ops] + [Fraction(-int(i == j)) for i in range(dim)] for j in range(dim)]
    b_eq = [t - r for t, r in zip(target, r_star)]
    x = minimize([1] * len(ops) + [0] * dim, a_eq, b_eq)
    if x is None:
        return None
    remaining = list(x[: len(ops)])
    current = r_star
    steps: list[Applied | Pad] = []
    for _ in range(64 * len(ops)):
        live = [k for k, v in enumerate(remaining) if v > 0]
        if not live:
            excess = tuple(c - t for c, t in zip(current, target))
            if any(excess):
                steps.append(Pad(excess))
            return Chain(tuple(steps))
        caps = {k: max_delta(ops[k], current) for k in live}
        full = [k for k in live if caps[k] is None or caps[k] >= remaining[k]]
        if full:
            k = full[0]
            d = remaining[k]
        else:
            k = max(live, key=lambda j: caps[j])
            d = caps[k]
            if d == 0:
                return None
        steps.append(Applied(ops[k], d))
        current = shifted(current, ops[k].direction, d)
        remaining[k] -= d
    return None


# ---------------------------------------------------------------------------
# fixtures


def write_fixture(path: str | Path, mv: MessageVector) -> None:
    """``path`` gets the packed bits (canonical order); ``path.json`` the stream lengths."""
    path = Path(path)
    l = 3 if len(mv.streams) == 7 else 2
    order = [m for m in model.indices(l) if m in mv.streams]
    bits = np.concatenate([mv.streams[m] for m in order]) if order else np.zeros(0, np.uint8)
    path.write_bytes(np.packbits(bits).tobytes())
    meta = {"n": mv.n, "streams": {model.label(m): int(len(mv.streams[m])) for m in order}}
    Path(str(path) + ".json").write_text(json.dumps(meta, indent=2))


def read_fixture(path: str | Path) -> MessageVector:
    path = Path(path)
    meta = json.loads(Path(str(path) + ".json").read_text())
    lengths = {model.mask_of(k): int(v) for k, v in meta["streams"].items()}
    total = sum(lengths.values())
    raw = np.frombuffer(path.read_bytes(), dtype=np.uint8)
    bits = np.unpackbits(raw)[:total]
    if len(bits) != total:
        raise LengthMismatch("fixture file is shorter than its sidecar says")
    out, pos = {}, 0
    for m, k in lengths.items():
        out[m] = bits[pos : pos + k].copy()
        pos += k
    return MessageVector(int(meta["n"]), out)
