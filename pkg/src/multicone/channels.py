"""Deterministic channels from the converse arguments, and an end-to-end harness.

The broadcast channel has seven noiseless links; receiver ``i`` sees the
four links whose index contains ``i``.  One simulated use carries a whole
block: link ``I`` takes ``n*R*_I`` bits.

The coordination MAC takes ``k*N_I`` bits per link per use, where
``R*_I = N_I / l`` with ``l`` the LCM of the denominators.  One use stands
for ``k*l`` time steps, so a block of ``n`` time steps is ``n / (k*l)``
uses and every rate in a report is in bits per time step.  A shared link
passes its input only when every transmitter on it sends the same bits,
otherwise it outputs ERASURE.

Message bits come from ``numpy.random.Philox`` keyed by
``SeedSequence([seed, trial])``, so a report depends only on its config.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from . import codec as cd
from . import model
from .rational import as_fraction, common_denominator, fmt


class AlphabetViolation(ValueError):
    pass


class InfeasibleRates(ValueError):
    pass


class _Erasure:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "e"


ERASURE = _Erasure()


def _as_bits(x, width: int, what: str) -> np.ndarray:
    arr = np.asarray(x)
    if arr.ndim != 1 or len(arr) != width:
        raise AlphabetViolation(f"{what}: expected {width} bits, got shape {arr.shape}")
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise AlphabetViolation(f"{what}: symbols must be bits")
    return arr.astype(np.uint8, copy=False)


# ---------------------------------------------------------------------------
# broadcast


@dataclass(frozen=True)
class DeterministicBC:
    r_star: tuple[Fraction, ...]
    n: int

    def __post_init__(self):
        object.__setattr__(self, "r_star", model.rate_vector(self.r_star))
        if any(r < 0 for r in self.r_star):
            raise model.NegativeRate("link rates must be nonnegative")
        for r in self.r_star:
            if (self.n * r).denominator != 1:
                raise cd.NonIntegralSegment(f"n*R* = {self.n * r} is not an integer")

    @property
    def l(self) -> int:
        return model.dimension_to_l(len(self.r_star))

    def widths(self) -> dict[int, int]:
        return {m: int(self.n * r) for m, r in zip(model.indices(self.l), self.r_star)}


def bc_observe(ch: DeterministicBC, x: Mapping[int, Sequence]) -> list[dict[int, np.ndarray]]:
    """Per-receiver outputs keyed by link."""
    widths = ch.widths()
    if set(x) != set(widths):
        raise AlphabetViolation(f"expected inputs on links {sorted(widths)}")
    bits = {m: _as_bits(x[m], w, f"link {model.label(m)}") for m, w in widths.items()}
    out = []
    for i in model.users_of(ch.l):
        out.append({m: bits[m] for m in model.indices(ch.l) if m >> (i - 1) & 1})
    return out


def bc_transmit(ch: DeterministicBC, x) -> tuple:
    """``x`` in canonical link order (or keyed by link); returns ``(y1, y2, y3)``.

    Each ``y_i`` lists the symbols of the links containing ``i`` in canonical
    order, e.g. ``y1 = (x_1, x_12, x_13, x_123)``.
    """
    order = model.indices(ch.l)
    if not isinstance(x, Mapping):
        x = list(x)
        if len(x) != len(order):
            raise AlphabetViolation(f"expected {len(order)} link inputs, got {len(x)}")
        x = dict(zip(order, x))
    obs = bc_observe(ch, x)
    return tuple(tuple(o[m] for m in order if m in o) for o in obs)


# ---------------------------------------------------------------------------
# coordination MAC


@dataclass(frozen=True)
class CoordinationMAC:
    k: int
    numerators: tuple[int, ...]
    l: int = 1

    def __post_init__(self):
        if self.k < 1 or self.l < 1:
            raise ValueError("k and l must be positive")
        if any(x < 0 for x in self.numerators):
            raise ValueError("numerators must be nonnegative")
        model.dimension_to_l(len(self.numerators))

    @classmethod
    def for_rates(cls, r_star: Sequence, k: int) -> "CoordinationMAC":
        r_star = model.rate_vector(r_star)
        if any(r < 0 for r in r_star):
            raise model.NegativeRate("link rates must be nonnegative")
        l = common_denominator(r_star)
        return cls(k, tuple(int(r * l) for r in r_star), l)

    @property
    def users(self) -> int:
        return model.dimension_to_l(len(self.numerators))

    def widths(self) -> dict[int, int]:
        return {m: self.k * n for m, n in zip(model.indices(self.users), self.numerators)}

    def steps_per_use(self) -> int:
        return self.k * self.l


def mac_transmit(ch: CoordinationMAC, *xs: Mapping[int, Sequence]) -> dict[int, object]:
    """One use. ``xs[t-1]`` holds transmitter ``t``'s inputs keyed by the links containing ``t``."""
    users = ch.users
    if len(xs) != users:
        raise AlphabetViolation(f"expected {users} transmitters, got {len(xs)}")
    widths = ch.widths()
    y: dict[int, object] = {}
    for m in model.indices(users):
        senders = [t for t in model.users_of(users) if m >> (t - 1) & 1]
        vals = []
        for t in senders:
            if m not in xs[t - 1]:
                raise AlphabetViolation(f"transmitter {t} gave no input for link {model.label(m)}")
            vals.append(_as_bits(xs[t - 1][m], widths[m], f"X_{t},{model.label(m)}"))
        if all(np.array_equal(vals[0], v) for v in vals[1:]):
            y[m] = vals[0]
        else:
            y[m] = ERASURE
    for t, x in enumerate(xs, start=1):
        extra = [m for m in x if not m >> (t - 1) & 1]
        if extra:
            raise AlphabetViolation(f"transmitter {t} has no input on links {[model.label(m) for m in extra]}")
    return y


def mac_transmit_block(ch: CoordinationMAC, uses: int, *xs: Mapping[int, np.ndarray]) -> tuple[dict[int, np.ndarray], dict[int, np.ndarray]]:
    """``uses`` consecutive uses at once: (outputs with erased uses zeroed, erasure mask per link)."""
    users = ch.users
    widths = ch.widths()
    out, erased = {}, {}
    for m in model.indices(users):
        senders = [t for t in model.users_of(users) if m >> (t - 1) & 1]
        blocks = [
            _as_bits(xs[t - 1][m], widths[m] * uses, f"X_{t},{model.label(m)}").reshape(uses, widths[m])
            for t in senders
        ]
        agree = np.ones(uses, dtype=bool)
        for b in blocks[1:]:
            agree &= (b == blocks[0]).all(axis=1)
        out[m] = np.where(agree[:, None], blocks[0], 0).reshape(-1).astype(np.uint8)
        erased[m] = ~agree
    return out, erased


# ---------------------------------------------------------------------------
# end to end


@dataclass(frozen=True)
class TrialReport:
    channel: str
    r_star: tuple[Fraction, ...]
    codec: dict
    n: int
    k: int | None
    uses: int
    blocks: int
    seed: int
    target: tuple[Fraction, ...]
    achieved: tuple[Fraction, ...]
    bit_errors: Mapping[str, int] = field(default_factory=dict)
    erasures: int = 0

    @property
    def total_errors(self) -> int:
        return sum(self.bit_errors.values())

    @property
    def ok(self) -> bool:
        return self.total_errors == 0 and self.erasures == 0 and self.achieved == self.target

    def to_dict(self) -> dict:
        return {
            "channel": self.channel,
            "rstar": model.rates_to_dict(self.r_star),
            "codec": self.codec,
            "n": self.n,
            "k": self.k,
            "uses": self.uses,
            "blocks": self.blocks,
            "seed": self.seed,
            "target": model.rates_to_dict(self.target),
            "achieved": model.rates_to_dict(self.achieved),
            "bit_errors": dict(self.bit_errors),
            "total_errors": self.total_errors,
            "erasures": self.erasures,
            "ok": self.ok,
        }


def _codec_dict(codec, delta) -> dict:
    if isinstance(codec, cd.CodecOp):
        return {"op": codec.id, "delta": fmt(as_fraction(delta))}
    if codec is None:
        return {"identity": True}
    return codec.to_dict()


def _errors(decoded: Mapping[int, np.ndarray], sent: Mapping[int, np.ndarray]) -> dict[int, int]:
    out = {}
    for m, bits in decoded.items():
        ref = sent[m]
        if len(bits) != len(ref):
            out[m] = max(len(bits), len(ref))
        else:
            out[m] = int(np.count_nonzero(bits != ref))
    return out


def run_end_to_end(
    channel: str,
    r_star: Sequence,
    codec=None,
    n: int = 1024,
    seed: int = 0,
    *,
    delta=None,
    k: int = 1,
    trials: int = 1,
) -> TrialReport:
    """Encode random messages, push them through the channel, decode, count errors.

    ``codec`` is a CodecOp (with ``delta``), an Applied/Chain/Schedule, or
    None for the identity map at ``R*``.
    """
    channel = channel.lower()
    r_star = model.rate_vector(r_star)
    if any(r < 0 for r in r_star):
        raise InfeasibleRates("R* must be nonnegative")
    l = model.dimension_to_l(len(r_star))
    try:
        if codec is None:
            layout = cd.Chain(()).layout(r_star, n)
        else:
            layout = cd.layout_for(codec, r_star, n, delta)
    except (cd.DeltaOutOfRange, cd.NegativeCompositeRate) as exc:
        raise InfeasibleRates(str(exc)) from exc
    order = model.indices(l)
    target = tuple(Fraction(layout.message_lengths[m], n) for m in order)
    errors = {}

    if channel == "bc":
        ch = DeterministicBC(r_star, n)
        widths = ch.widths()
        _check_fit(layout, widths)
        uses, kk, erasures = 1, None, 0
        for trial in range(trials):
            msgs = cd.random_messages(layout.message_lengths, n, cd.rng_for(seed, trial))
            wires = cd.evaluate(layout, msgs.streams)
            x = {m: np.concatenate([wires[m], np.zeros(widths[m] - len(wires[m]), np.uint8)]) for m in order}
            for i, obs in enumerate(bc_observe(ch, x), start=1):
                seen = {m: bits[: layout.wire_lengths[m]] for m, bits in obs.items()}
                decoded = cd.decode_with(layout, "bc", l, i, cd.MessageVector(n, seen))
                for m, e in _errors(decoded, msgs.streams).items():
                    key = f"{i}:{model.label(m)}"
                    errors[key] = errors.get(key, 0) + e
    elif channel == "mac":
        ch = CoordinationMAC.for_rates(r_star, k)
        step = ch.steps_per_use()
        if n % step:
            raise cd.NonIntegralSegment(f"n={n} is not a multiple of k*l={step}")
        uses = n // step
        kk = k
        widths = {m: w * uses for m, w in ch.widths().items()}
        _check_fit(layout, widths)
        erasures = 0
        for trial in range(trials):
            msgs = cd.random_messages(layout.message_lengths, n, cd.rng_for(seed, trial))
            xs = []
            for t in model.users_of(l):
                known = {m: s for m, s in msgs.streams.items() if m >> (t - 1) & 1}
                wires = cd.transmitter_encode(layout, t, known)
                xs.append({m: np.concatenate([w, np.zeros(widths[m] - len(w), np.uint8)]) for m, w in wires.items()})
            y, erased = mac_transmit_block(ch, uses, *xs)
            erasures += int(sum(e.sum() for e in erased.values()))
            seen = {m: y[m][: layout.wire_lengths[m]] for m in order}
            decoded = cd.decode_with(layout, "mac", l, 0, cd.MessageVector(n, seen))
            for m, e in _errors(decoded, msgs.streams).items():
                key = f"0:{model.label(m)}"
                errors[key] = errors.get(key, 0) + e
    else:
        raise ValueError(f"unknown channel {channel!r}")

    # a message counts as delivered only if every receiver that wants it got it bit-exact
    failed = {model.mask_of(key.split(":")[1]) for key, e in errors.items() if e}
    achieved = tuple(Fraction(0) if m in failed else t for m, t in zip(order, target))
    return TrialReport(channel, r_star, _codec_dict(codec, delta), n, kk, uses, trials, seed, target, achieved, errors, erasures)


def _check_fit(layout: cd.Layout, widths: Mapping[int, int]) -> None:
    over = [m for m, w in widths.items() if layout.wire_lengths[m] > w]
    if over:
        raise InfeasibleRates(
            "codec needs more bits than the link carries on "
            + ", ".join(f"{model.label(m)} ({layout.wire_lengths[m]} > {widths[m]})" for m in over)
        )


# ---------------------------------------------------------------------------
# coordination leakage


@dataclass(frozen=True)
class CoordinationStats:
    k: int
    numerator: int
    trials: int
    matches: int
    output_entropy: float  # plug-in estimate of H(Y) per use, bits

    @property
    def width(self) -> int:
        return self.k * self.numerator

    @property
    def probability(self) -> Fraction:
        return Fraction(self.matches, self.trials)

    @property
    def expected(self) -> Fraction:
        return Fraction(1, 2**self.width)

    @property
    def sigma(self) -> float:
        p = float(self.expected)
        return math.sqrt(p * (1 - p) / self.trials)

    def within(self, n_sigma: float = 3.0) -> bool:
        return abs(float(self.probability) - float(self.expected)) <= n_sigma * self.sigma

    @property
    def throughput(self) -> float:
        """Bits per time step that pass the link (one use = k time steps here)."""
        return self.output_entropy / self.k

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "numerator": self.numerator,
            "trials": self.trials,
            "matches": self.matches,
            "probability": fmt(self.probability),
            "expected": fmt(self.expected),
            "sigma": self.sigma,
            "within_3_sigma": self.within(),
            "output_entropy": self.output_entropy,
            "throughput": self.throughput,
            "k_times_throughput": self.k * self.throughput,
        }


def _plugin_entropy(counts: np.ndarray) -> float:
    counts = counts[counts > 0].astype(float)
    p = counts / counts.sum()
    return float(-(p * np.log2(p)).sum())


def coordination_stats(k: int, n12: int = 1, trials: int = 100_000, seed: int = 0, *, coordinated: bool = False) -> CoordinationStats:
    """Fraction of uses where two independent uniform inputs agree on a pairwise link.

    With ``coordinated`` both transmitters send the same string, the case in
    which the link carries common information.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    width = k * n12
    rng = cd.rng_for(seed, width)
    a = rng.integers(0, 2, size=(trials, width), dtype=np.uint8)
    b = a if coordinated else rng.integers(0, 2, size=(trials, width), dtype=np.uint8)
    match = (a == b).all(axis=1)
    # output symbol: the common string when it passes, one extra symbol for e
    weights = (1 << np.arange(width, dtype=np.int64)) if width < 63 else None
    if weights is not None:
        values = a.astype(np.int64) @ weights
        symbols = np.where(match, values, -1)
        _, counts = np.unique(symbols, return_counts=True)
        entropy = _plugin_entropy(counts)
    else:  # pragma: no cover - widths this large are not simulated
        entropy = float("nan")
    return CoordinationStats(k, n12, trials, int(match.sum()), entropy)


def leakage_trend(ks: Sequence[int] = (1, 2, 4, 8), n12: int = 1, trials: int = 100_000, seed: int = 0) -> list[CoordinationStats]:
    return [coordination_stats(k, n12, trials, seed) for k in ks]
