"""Small helpers for exact rational and integer vectors."""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

Rational = Fraction


def as_fraction(x) -> Fraction:
    """Coerce int, Fraction or a ``"p/q"`` string to a Fraction. Floats are refused."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot use {type(x).__name__} as an exact rational")


def as_vector(xs: Iterable) -> tuple[Fraction, ...]:
    return tuple(as_fraction(x) for x in xs)


def fmt(x: Fraction) -> str:
    """Serialize as ``"p/q"`` (or ``"p"`` when integral)."""
    return str(as_fraction(x))


def fmt_vector(xs: Iterable) -> list[str]:
    return [fmt(x) for x in xs]


def parse_vector(text: str) -> tuple[Fraction, ...]:
    """Parse ``"1,1/2,0"`` into a rational vector."""
    parts = [p for p in text.replace(" ", "").split(",")]
    if not parts or any(p == "" for p in parts):
        raise ValueError(f"malformed rational list: {text!r}")
    return tuple(Fraction(p) for p in parts)


def dot(a: Sequence, b: Sequence):
    return sum(x * y for x, y in zip(a, b))


def primitive(v: Sequence[int]) -> tuple[int, ...]:
    """Divide an integer vector by the gcd of its entries. Direction is kept."""
    g = 0
    for x in v:
        g = gcd(g, x)
    if g in (0, 1):
        return tuple(v)
    return tuple(x // g for x in v)


def integer_direction(v: Sequence) -> tuple[int, ...]:
    """Smallest integer vector that is a positive multiple of a rational vector."""
    den = 1
    for x in v:
        den = lcm(den, as_fraction(x).denominator)
    return primitive([int(as_fraction(x) * den) for x in v])


def common_denominator(xs: Iterable) -> int:
    den = 1
    for x in xs:
        den = lcm(den, as_fraction(x).denominator)
    return den
