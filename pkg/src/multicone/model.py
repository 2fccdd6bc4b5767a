"""Message subsets, rate vectors, the G/H constants, cut-set machinery and regions.

Message indices are bitmasks over receivers (bit 0 is receiver 1).  Every
vector in this package uses the canonical order ``1, 2, 3, 12, 13, 23, 123``
for three users and ``1, 2, 12`` for two.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Iterable, Sequence

from .geometry import HRep, VRep, columns, h_to_v, v_to_h
from .rational import as_fraction, as_vector, dot, fmt

ORDER = {2: (0b01, 0b10, 0b11), 3: (0b001, 0b010, 0b100, 0b011, 0b101, 0b110, 0b111)}
CHANNELS = ("bc", "mac")


class NegativeRate(ValueError):
    pass


class ConditionViolated(ValueError):
    pass


def label(mask: int) -> str:
    return "".join(str(i + 1) for i in range(3) if mask >> i & 1)


def mask_of(text) -> int:
    """``"13"`` -> 0b101. Accepts ints as already-built masks."""
    if isinstance(text, int):
        return text
    mask = 0
    for ch in str(text).strip():
        if ch not in "123":
            raise ValueError(f"bad message index {text!r}")
        mask |= 1 << (int(ch) - 1)
    if mask == 0:
        raise ValueError("empty message index")
    return mask


def indices(l: int = 3) -> tuple[int, ...]:
    try:
        return ORDER[l]
    except KeyError:
        raise ValueError(f"only L=2 and L=3 are supported, got {l}") from None


def labels(l: int = 3) -> list[str]:
    return [label(m) for m in indices(l)]


def position(mask: int, l: int = 3) -> int:
    return indices(l).index(mask)


def users_of(l: int) -> range:
    return range(1, l + 1)


def dimension_to_l(dim: int) -> int:
    for l, order in ORDER.items():
        if len(order) == dim:
            return l
    raise ValueError(f"no rate space of dimension {dim}")


# ---------------------------------------------------------------------------
# rate vectors: tuples of Fractions in canonical order


def rate_vector(values: Iterable, l: int | None = None) -> tuple[Fraction, ...]:
    vec = as_vector(values)
    if l is None:
        dimension_to_l(len(vec))
    elif len(vec) != len(indices(l)):
        raise ValueError(f"expected {len(indices(l))} rates for L={l}, got {len(vec)}")
    return vec


def ones(l: int = 3) -> tuple[Fraction, ...]:
    return tuple(Fraction(1) for _ in indices(l))


def rates_to_dict(r: Sequence) -> dict[str, str]:
    l = dimension_to_l(len(r))
    return {lab: fmt(x) for lab, x in zip(labels(l), r)}


def rates_from_dict(d: dict) -> tuple[Fraction, ...]:
    l = 3 if len(d) == 7 else 2
    missing = set(labels(l)) - set(map(str, d))
    if missing or len(d) != len(indices(l)):
        raise ValueError(f"rate vector must have exactly the keys {labels(l)}")
    return tuple(as_fraction(d[lab]) for lab in labels(l))


def rates_to_json(r: Sequence) -> str:
    return json.dumps(rates_to_dict(r))


def rates_from_json(text: str) -> tuple[Fraction, ...]:
    return rates_from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# printed constants (rows = coordinates, columns = facets / rays)


@dataclass(frozen=True)
class CanonicalMatrices:
    g_bc_2: tuple[tuple[int, ...], ...]
    h_bc_2: tuple[tuple[int, ...], ...]
    g_mac_2: tuple[tuple[int, ...], ...]
    h_mac_2: tuple[tuple[int, ...], ...]
    g_bc_3: tuple[tuple[int, ...], ...]
    h_bc_3: tuple[tuple[int, ...], ...]
    g_mac_3: tuple[tuple[int, ...], ...]
    h_mac_3: tuple[tuple[int, ...], ...]

    def g(self, channel: str, l: int):
        return getattr(self, f"g_{channel}_{l}")

    def h(self, channel: str, l: int):
        return getattr(self, f"h_{channel}_{l}")


# The L=2 MAC pair below is printed identical to the BC pair; see
# G_MAC_2_CORRECTED for the matrix that matches the two-user MAC region.
PRINTED = CanonicalMatrices(
    g_bc_2=((1, 0, 1), (0, 1, 1), (1, 1, 1)),
    h_bc_2=((1, 0, -1), (0, 1, -1), (-1, -1, 1)),
    g_mac_2=((1, 0, 1), (0, 1, 1), (1, 1, 1)),
    h_mac_2=((1, 0, -1), (0, 1, -1), (-1, -1, 1)),
    g_bc_3=(
        (1, 0, 0, 1, 1, 0, 1, 1, 1, 1, 1, 2, 2, 1, 2),
        (0, 1, 0, 1, 0, 1, 1, 1, 1, 1, 1, 2, 1, 2, 2),
        (0, 0, 1, 0, 1, 1, 1, 1, 1, 1, 1, 1, 2, 2, 2),
        (1, 1, 0, 1, 1, 1, 1, 2, 1, 1, 2, 2, 2, 2, 2),
        (1, 0, 1, 1, 1, 1, 1, 1, 2, 1, 2, 2, 2, 2, 2),
        (0, 1, 1, 1, 1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 2),
        (1, 1, 1, 1, 1, 1, 1, 2, 2, 2, 2, 3, 3, 3, 3),
    ),
    h_bc_3=(
        (-1, -1, 0, 1, 0, 0, 1, 0, 0, -1, 0, 0, 0, 0, 0, 0),
        (-1, 0, -1, 0, 1, 0, 0, -1, 0, 0, 1, 0, 0, 0, 0, 0),
        (0, -1, -1, 0, 0, -1, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0),
        (1, 0, 0, -1, -1, -1, 0, 0, 0, 0, 0, 0, 1, 0, 0, -1),
        (0, 1, 0, 0, 0, 0, -1, -1, -1, 0, 0, 0, 0, 1, 0, -1),
        (0, 0, 1, 0, 0, 0, 0, 0, 0, -1, -1, -1, 0, 0, 1, -1),
        (0, 0, 0, 0, 0, 1, 0, 1, 0, 1, 0, 0, -1, -1, -1, 2),
    ),
    g_mac_3=(
        (1, 0, 0, 1, 1, 0, 1, 1, 1, 1, 1),
        (0, 1, 0, 1, 0, 1, 1, 1, 1, 1, 1),
        (0, 0, 1, 0, 1, 1, 1, 1, 1, 1, 1),
        (0, 0, 0, 1, 0, 0, 0, 1, 1, 1, 1),
        (0, 0, 0, 0, 1, 0, 1, 0, 1, 1, 1),
        (0, 0, 0, 0, 0, 1, 1, 1, 0, 1, 1),
        (0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1),
    ),
    h_mac_3=(
        (1, 1, 0, 0, 0, 0, 0, 0, 0, 0),
        (0, 0, 1, 1, 0, 0, 0, 0, 0, 0),
        (0, 0, 0, 0, 1, 1, 0, 0, 0, 0),
        (-1, 0, -1, 0, 0, 0, 1, 0, 0, 0),
        (0, -1, 0, 0, -1, 0, 0, 1, 0, 0),
        (0, 0, 0, -1, 0, -1, 0, 0, 1, 0),
        (0, 0, 0, 0, 0, 0, -1, -1, -1, 1),
    ),
)

# Facets R1 <= R1*, R2 <= R2*, R1 + R2 + R12 <= sum: the region spanned by
# (1,1,1) -> (0,1,2), (1,0,2), (1,1,0) for the two-user MAC.
G_MAC_2_CORRECTED = ((1, 0, 1), (0, 1, 1), (0, 0, 1))


def g_columns(channel: str, l: int, *, corrected: bool = True) -> list[tuple[int, ...]]:
    """Facet normals of the multicast cone, one per column."""
    channel = channel.lower()
    if channel == "mac" and l == 2 and corrected:
        return columns(G_MAC_2_CORRECTED)
    return columns(PRINTED.g(channel, l))


def cone_hrep(channel: str, l: int, *, corrected: bool = True) -> HRep:
    dim = len(indices(l))
    return HRep(dim, tuple((g, 0) for g in g_columns(channel, l, corrected=corrected)))


def cone_rays(channel: str, l: int, *, corrected: bool = True) -> list[tuple[int, ...]]:
    return sorted(h_to_v(cone_hrep(channel, l, corrected=corrected)).rays)


def achievability_directions(channel: str, l: int) -> list[tuple[int, ...]]:
    """Extremal rays oriented as realizable rate shifts (computed, not read off a figure)."""
    return cone_rays(channel, l, corrected=True)


# ---------------------------------------------------------------------------
# cut collections and the floor operator


CutCollection = frozenset


def cut_collection(items: Iterable) -> frozenset[int]:
    return frozenset(mask_of(x) for x in items)


def floor_op(a: Iterable, l: int = 3) -> frozenset[int]:
    """Messages intended for receivers all of whose incoming links are in ``a``."""
    a = cut_collection(a)
    out: set[int] = set()
    for i in users_of(l):
        bit = 1 << (i - 1)
        feeding = [m for m in indices(l) if m & bit]
        if all(m in a for m in feeding):
            out.update(feeding)
    return frozenset(out)


def lemma51_condition(a1: Iterable, a2: Iterable, a3: Iterable) -> bool:
    a1, a2, a3 = cut_collection(a1), cut_collection(a2), cut_collection(a3)
    return a1 <= a2 | a3 or a2 <= a1 | a3 or a3 <= a1 | a2


@dataclass(frozen=True)
class CutInequality:
    """``sum lhs_I R_I <= sum rhs_I R*_I`` with coefficients in canonical order."""

    lhs: tuple[int, ...]
    rhs: tuple[int, ...]

    def holds(self, r: Sequence, r_star: Sequence) -> bool:
        return dot(self.lhs, r) <= dot(self.rhs, r_star)

    def as_dict(self) -> dict:
        l = dimension_to_l(len(self.lhs))
        return {"lhs": dict(zip(labels(l), self.lhs)), "rhs": dict(zip(labels(l), self.rhs))}


def _indicator(sets: Iterable[frozenset[int]], l: int) -> tuple[int, ...]:
    counts = Counter()
    for s in sets:
        counts.update(s)
    return tuple(counts[m] for m in indices(l))


def cut_inequality(a1: Iterable, a2: Iterable = (), a3: Iterable = (), l: int = 3) -> CutInequality:
    a1, a2, a3 = cut_collection(a1), cut_collection(a2), cut_collection(a3)
    if not lemma51_condition(a1, a2, a3):
        raise ConditionViolated(
            "no collection is contained in the union of the other two; "
            "use special_bound_11 for the row-11 collections"
        )
    f = lambda s: floor_op(s, l)
    terms = [
        f(a1 | a2 | a3),
        f(a1 | a2) & f(a1 | a3) & f(a2 | a3),
        f(a1) & f(a2) & f(a3),
    ]
    return CutInequality(_indicator(terms, l), _indicator([a1, a2, a3], l))


ROW11 = (
    cut_collection(["1", "12", "13", "123"]),
    cut_collection(["2", "12", "23", "123"]),
    cut_collection(["3", "13", "23"]),
)


def special_bound_11() -> CutInequality:
    """The bound for the row-11 collections, obtained through a separate entropy chain.

    The chain ends in ``H(V1) + H(V2) + H(V3)`` with ``V_i`` the messages each
    receiver decodes (receiver 3 without ``W_123``), so the left side counts
    how many of those three message sets contain each index.
    """
    decoded = (
        cut_collection(["1", "12", "13", "123"]),
        cut_collection(["2", "12", "23", "123"]),
        cut_collection(["3", "13", "23"]),
    )
    return CutInequality(_indicator(decoded, 3), _indicator(ROW11, 3))


def load_table1() -> list[tuple[frozenset[int], frozenset[int], frozenset[int]]]:
    text = resources.files("multicone").joinpath("data/table1.txt").read_text()
    return parse_table1(text)


def parse_table1(text: str) -> list[tuple[frozenset[int], frozenset[int], frozenset[int]]]:
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(";")
        if len(parts) != 3:
            raise ValueError(f"table row needs three ';'-separated collections: {line!r}")
        rows.append(tuple(cut_collection(p.split(",")) if p.strip() else frozenset() for p in parts))
    return rows


def format_table1_row(row) -> str:
    return ";".join(",".join(label(m) for m in sorted(c, key=lambda m: position(m))) for c in row)


# Printed row 13 yields (2,1,1,2,2,2,3) <= (3,1,1,2,2,2,3), which is not tight
# and reproduces no facet.  Replacing {1} by {3} in its A2 (making it the A2
# of rows 12 and 15) yields the missing column (2,1,2,2,2,2,3).
TABLE1_CORRECTIONS = {13: "1,3,13,23,123;2,3,12,23,123;1,12,13,123"}


def table1_rows(corrected: bool = True):
    rows = load_table1()
    if corrected:
        for number, text in TABLE1_CORRECTIONS.items():
            rows[number - 1] = parse_table1(text)[0]
    return rows


def row_inequality(row) -> CutInequality:
    a1, a2, a3 = row
    if lemma51_condition(a1, a2, a3):
        return cut_inequality(a1, a2, a3)
    if tuple(row) == ROW11:
        return special_bound_11()
    raise ConditionViolated(f"row {format_table1_row(row)} has no known bound")


def table1_generate(rows=None, corrected: bool = True) -> list[CutInequality]:
    """One inequality per row; the row failing the containment test gets the special bound."""
    rows = table1_rows(corrected) if rows is None else rows
    return [row_inequality(row) for row in rows]


def table1_matches_g(corrected: bool = True) -> bool:
    gen = Counter(ineq.lhs for ineq in table1_generate(corrected=corrected))
    return gen == Counter(columns(PRINTED.g_bc_3))


def table1_report() -> list[dict]:
    """Per-row record: collections, condition, generated inequality, matching G column."""
    g = columns(PRINTED.g_bc_3)
    printed = table1_rows(corrected=False)
    out = []
    for number, row in enumerate(table1_rows(corrected=True), start=1):
        ineq = row_inequality(row)
        entry = {
            "row": number,
            "collections": format_table1_row(row),
            "condition": lemma51_condition(*row),
            "lhs": list(ineq.lhs),
            "rhs": list(ineq.rhs),
            "tight": ineq.lhs == ineq.rhs,
            "g_column": g.index(ineq.lhs) + 1 if ineq.lhs in g else None,
        }
        if number in TABLE1_CORRECTIONS:
            raw = row_inequality(printed[number - 1])
            entry["printed"] = {
                "collections": format_table1_row(printed[number - 1]),
                "lhs": list(raw.lhs),
                "rhs": list(raw.rhs),
                "g_column": g.index(raw.lhs) + 1 if raw.lhs in g else None,
            }
        out.append(entry)
    return out


# ---------------------------------------------------------------------------
# regions


def _check_rates(r_star: Sequence, l: int | None = None) -> tuple[Fraction, ...]:
    r_star = rate_vector(r_star, l)
    if any(x < 0 for x in r_star):
        raise NegativeRate(f"R* must be componentwise nonnegative, got {[str(x) for x in r_star]}")
    return r_star


def region(channel: str, r_star: Sequence) -> HRep:
    """``{R >= 0 : G^T (R - R*) <= 0}`` for the given channel family."""
    r_star = _check_rates(r_star)
    l = dimension_to_l(len(r_star))
    gs = g_columns(channel, l)
    return HRep(len(r_star), tuple((g, dot(g, r_star)) for g in gs), nonneg_orthant=True)


def bc_region(r_star: Sequence) -> HRep:
    return region("bc", r_star)


def mac_region(r_star: Sequence) -> HRep:
    return region("mac", r_star)


def operations_region(channel: str, r_star: Sequence, directions=None) -> HRep:
    """``{R >= 0 : R <= R* + H delta, delta >= 0}`` built from generators.

    The set ``R* + cone(H, -e_j)`` is converted to facets and intersected
    with the nonnegative orthant.
    """
    r_star = _check_rates(r_star)
    l = dimension_to_l(len(r_star))
    if directions is None:
        directions = achievability_directions(channel, l)
    dim = len(r_star)
    lowering = [tuple(-int(i == j) for i in range(dim)) for j in range(dim)]
    shifted = VRep(dim, (r_star,), tuple(directions) + tuple(lowering))
    h = v_to_h(shifted)
    return HRep(dim, h.inequalities, nonneg_orthant=True)


def lemma61_regions(r_star: Sequence) -> list[HRep]:
    """The seven per-link regions of the coordination MAC, in canonical order."""
    r_star = _check_rates(r_star, 3)
    out = []
    order = indices(3)
    for pos, link in enumerate(order):
        # link I carries message J iff the transmitters of I all know J
        carried = [j for j in order if j & link == link]
        normal = tuple(int(m in carried) for m in order)
        ineqs = [(normal, r_star[pos])]
        for k, m in enumerate(order):
            if m not in carried:
                e = tuple(int(i == k) for i in range(7))
                ineqs.append((e, 0))
        out.append(HRep(7, tuple(ineqs), nonneg_orthant=True))
    return out


def hstar_membership(alpha: Sequence) -> bool:
    """``alpha >= 0`` and ``alpha^T H_BC,3 <= 0``."""
    alpha = as_vector(alpha)
    if len(alpha) != 7:
        raise ValueError("alpha must have 7 entries")
    if any(a < 0 for a in alpha):
        return False
    return all(dot(alpha, h) <= 0 for h in columns(PRINTED.h_bc_3))


# ---------------------------------------------------------------------------
# duality checks against the printed figures


@dataclass(frozen=True)
class DualityFinding:
    channel: str
    l: int
    computed_rays: tuple[tuple[int, ...], ...]
    printed_rays: tuple[tuple[int, ...], ...]
    verdict: str  # "match", "negated" or "mismatch"
    note: str = ""
    corrected_rays: tuple[tuple[int, ...], ...] | None = None

    @property
    def n_rays(self) -> int:
        return len(self.computed_rays)


def compare_ray_sets(computed: Iterable, printed: Iterable) -> str:
    computed = Counter(map(tuple, computed))
    printed = Counter(map(tuple, printed))
    if computed == printed:
        return "match"
    if computed == Counter(tuple(-x for x in r) for r in printed):
        return "negated"
    return "mismatch"


def cone_duality(channel: str, l: int) -> DualityFinding:
    channel = channel.lower()
    computed = cone_rays(channel, l, corrected=False)
    printed = sorted(columns(PRINTED.h(channel, l)))
    verdict = compare_ray_sets(computed, printed)
    note = ""
    corrected = None
    if channel == "mac" and l == 2:
        corrected = tuple(cone_rays("mac", 2, corrected=True))
        if PRINTED.g_mac_2 == PRINTED.g_bc_2 and PRINTED.h_mac_2 == PRINTED.h_bc_2:
            note = (
                "printed MAC L=2 matrices are identical to the BC L=2 pair; "
                "the corrected facets give rays " + ", ".join(map(str, corrected))
            )
    elif verdict == "negated":
        note = "printed columns are the negations of the achievable rate shifts"
    return DualityFinding(channel, l, tuple(computed), tuple(printed), verdict, note, corrected)


# Known findings; anything else is an unexpected mismatch.
EXPECTED_VERDICTS = {("bc", 2): "match", ("bc", 3): "match", ("mac", 2): "match", ("mac", 3): "negated"}
MAC2_TEXT_DIRECTIONS = ((-1, 0, 1), (0, -1, 1), (0, 0, -1))


def finding_is_expected(f: DualityFinding) -> bool:
    if f.verdict != EXPECTED_VERDICTS[(f.channel, f.l)]:
        return False
    if (f.channel, f.l) == ("mac", 2):
        return Counter(f.corrected_rays or ()) == Counter(MAC2_TEXT_DIRECTIONS)
    return True
