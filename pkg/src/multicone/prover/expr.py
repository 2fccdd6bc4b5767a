"""Linear entropy expressions in the joint-entropy basis, with a parser and printer.

Grammar::

    expr    := ['+'|'-'] term (('+'|'-') term)*  |  '0'
    term    := [coeff ['*']] atom
    atom    := 'H(' varlist ['|' varlist] ')'
             | 'I(' varlist (';' varlist)+ ['|' varlist] ')'
    varlist := var (',' var)*
    coeff   := integer | integer '/' integer
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from ..rational import as_fraction


class ExpressionSyntaxError(SyntaxError):
    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position}: {text!r}")
        self.text = text
        self.position = position


class UnknownVariable(KeyError):
    pass


@dataclass(frozen=True)
class EntropyVector:
    """``sum coeffs[S] * H(X_S)`` over nonempty subsets ``S`` (bitmasks) of ``names``."""

    names: tuple[str, ...]
    coeffs: Mapping[int, Fraction]

    def __post_init__(self):
        names = tuple(self.names)
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable names")
        full = (1 << len(names)) - 1
        clean = {}
        for s, c in self.coeffs.items():
            c = as_fraction(c)
            if s <= 0 or s & ~full:
                raise ValueError(f"subset mask {s} out of range for {len(names)} variables")
            if c:
                clean[s] = c
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    @property
    def n(self) -> int:
        return len(self.names)

    def __eq__(self, other) -> bool:
        return isinstance(other, EntropyVector) and self.names == other.names and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.names, tuple(self.coeffs.items())))

    def _same_names(self, other: "EntropyVector") -> None:
        if self.names != other.names:
            raise ValueError(f"variable sets differ: {self.names} vs {other.names}")

    def __add__(self, other: "EntropyVector") -> "EntropyVector":
        self._same_names(other)
        out = dict(self.coeffs)
        for s, c in other.coeffs.items():
            out[s] = out.get(s, 0) + c
        return EntropyVector(self.names, out)

    def __neg__(self) -> "EntropyVector":
        return EntropyVector(self.names, {s: -c for s, c in self.coeffs.items()})

    def __sub__(self, other: "EntropyVector") -> "EntropyVector":
        return self + (-other)

    def scale(self, k) -> "EntropyVector":
        k = as_fraction(k)
        return EntropyVector(self.names, {s: k * c for s, c in self.coeffs.items()})

    def __rmul__(self, k) -> "EntropyVector":
        return self.scale(k)

    def is_zero(self) -> bool:
        return not self.coeffs

    def dense(self) -> list[Fraction]:
        """Coefficients for masks 1 .. 2^n - 1."""
        return [self.coeffs.get(s, Fraction(0)) for s in range(1, 1 << self.n)]

    def evaluate(self, h) -> Fraction | float:
        """``h`` maps a mask to the joint entropy of that subset."""
        return sum(c * h(s) for s, c in self.coeffs.items())

    def over(self, names: Sequence[str]) -> "EntropyVector":
        """Re-express over a superset of variable names."""
        names = tuple(names)
        idx = {v: i for i, v in enumerate(names)}
        missing = [v for v in self.names if v not in idx]
        if missing:
            raise UnknownVariable(missing[0])
        out = {}
        for s, c in self.coeffs.items():
            t = 0
            for i, v in enumerate(self.names):
                if s >> i & 1:
                    t |= 1 << idx[v]
            out[t] = c
        return EntropyVector(names, out)

    def __str__(self) -> str:
        return to_text(self)


def zero(names: Sequence[str]) -> EntropyVector:
    return EntropyVector(tuple(names), {})


def _mask(names: Sequence[str], group: Iterable[str]) -> int:
    idx = {v: i for i, v in enumerate(names)}
    m = 0
    for v in group:
        if v not in idx:
            raise UnknownVariable(v)
        m |= 1 << idx[v]
    return m


def H(names: Sequence[str], group: Iterable[str], given: Iterable[str] = ()) -> EntropyVector:
    """``H(group | given)`` expanded into joint entropies."""
    a, z = _mask(names, group), _mask(names, given)
    return h_masks(tuple(names), a, z)


def h_masks(names: tuple[str, ...], a: int, z: int = 0) -> EntropyVector:
    out: dict[int, Fraction] = {}
    if a | z:
        out[a | z] = Fraction(1)
    if z:
        out[z] = out.get(z, 0) - 1
    return EntropyVector(names, out)


def I(names: Sequence[str], groups: Sequence[Iterable[str]], given: Iterable[str] = ()) -> EntropyVector:
    """Multi-way ``I(g1; g2; ...; gk | given)`` by inclusion-exclusion."""
    masks = [_mask(names, g) for g in groups]
    return i_masks(tuple(names), masks, _mask(names, given))


def i_masks(names: tuple[str, ...], masks: Sequence[int], z: int = 0) -> EntropyVector:
    if len(masks) < 2:
        raise ValueError("mutual information needs at least two arguments")
    total = EntropyVector(names, {})
    k = len(masks)
    for pick in range(1, 1 << k):
        union = 0
        for j in range(k):
            if pick >> j & 1:
                union |= masks[j]
        sign = 1 if bin(pick).count("1") % 2 else -1
        total = total + h_masks(names, union, z).scale(sign)
    return total


# ---------------------------------------------------------------------------
# parsing


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<sym>[()+\-*/|;,]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    while pos < len(text):
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos == len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ExpressionSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append((kind, m.group(kind), start))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.terms: list[tuple[Fraction, str, list[list[str]], list[str]]] = []

    def peek(self):
        return self.toks[self.i]

    def take(self, value: str | None = None, kind: str | None = None):
        tok = self.toks[self.i]
        if (value is not None and tok[1] != value) or (kind is not None and tok[0] != kind):
            want = value or kind
            got = tok[1] or "end of input"
            raise ExpressionSyntaxError(f"expected {want!r}, found {got!r}", self.text, tok[2])
        self.i += 1
        return tok

    def parse(self):
        if self.peek() == ("num", "0", self.peek()[2]) and self.toks[self.i + 1][0] == "end":
            self.i += 1
            return []
        sign = 1
        if self.peek()[1] in "+-" and self.peek()[0] == "sym":
            sign = -1 if self.take()[1] == "-" else 1
        self.term(sign)
        while self.peek()[0] != "end":
            tok = self.peek()
            if tok[1] not in ("+", "-"):
                raise ExpressionSyntaxError(f"expected '+' or '-', found {tok[1]!r}", self.text, tok[2])
            self.take()
            self.term(-1 if tok[1] == "-" else 1)
        return self.terms

    def term(self, sign: int):
        coeff = Fraction(1)
        if self.peek()[0] == "num":
            num = int(self.take()[1])
            den = 1
            if self.peek()[1] == "/":
                self.take("/")
                den_tok = self.take(kind="num")
                den = int(den_tok[1])
                if den == 0:
                    raise ExpressionSyntaxError("zero denominator", self.text, den_tok[2])
            coeff = Fraction(num, den)
            if self.peek()[1] == "*":
                self.take("*")
        tok = self.take(kind="name")
        if tok[1] not in ("H", "I"):
            raise ExpressionSyntaxError(f"expected 'H(' or 'I(', found {tok[1]!r}", self.text, tok[2])
        self.take("(")
        groups = [self.varlist()]
        if tok[1] == "I":
            self.take(";")
            groups.append(self.varlist())
            while self.peek()[1] == ";":
                self.take(";")
                groups.append(self.varlist())
        elif self.peek()[1] == ";":
            raise ExpressionSyntaxError("H takes a single variable list", self.text, self.peek()[2])
        given: list[str] = []
        if self.peek()[1] == "|":
            self.take("|")
            given = self.varlist()
        self.take(")")
        self.terms.append((sign * coeff, tok[1], groups, given))

    def varlist(self) -> list[str]:
        out = [self.take(kind="name")[1]]
        while self.peek()[1] == ",":
            self.take(",")
            out.append(self.take(kind="name")[1])
        return out


def parse_expression(text: str, names: Sequence[str] | None = None) -> EntropyVector:
    """Parse into the joint-entropy basis.

    Without ``names`` the variables are the ones mentioned, sorted.  With
    ``names``, any other variable raises UnknownVariable.
    """
    terms = _Parser(text).parse()
    mentioned = {v for _, _, groups, given in terms for g in groups for v in g} | {
        v for _, _, _, given in terms for v in given
    }
    if names is None:
        names = tuple(sorted(mentioned))
    else:
        names = tuple(names)
        unknown = sorted(mentioned - set(names))
        if unknown:
            raise UnknownVariable(unknown[0])
    total = zero(names)
    for coeff, kind, groups, given in terms:
        piece = H(names, groups[0], given) if kind == "H" else I(names, groups, given)
        total = total + piece.scale(coeff)
    return total


# ---------------------------------------------------------------------------
# printing


def _subset_order(s: int) -> tuple[int, list[int]]:
    return (bin(s).count("1"), [i for i in range(s.bit_length()) if s >> i & 1])


def to_text(v: EntropyVector) -> str:
    if v.is_zero():
        return "0"
    parts = []
    for s in sorted(v.coeffs, key=_subset_order):
        c = v.coeffs[s]
        group = ",".join(v.names[i] for i in range(v.n) if s >> i & 1)
        mag = abs(c)
        body = f"H({group})" if mag == 1 else f"{mag}*H({group})"
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append(("- " if c < 0 else "+ ") + body)
    return " ".join(parts)
