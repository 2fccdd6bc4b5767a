"""Elemental Shannon inequalities and exact LP proofs with checkable certificates.

A target ``t >= 0`` holds for every distribution meeting equality
constraints ``c_j = 0`` whenever ``t = sum lam_i e_i + sum mu_j c_j`` with
``lam >= 0`` and ``e_i`` elemental.  Finding such multipliers is a
feasibility LP solved exactly; the certificate is re-expanded and compared
coefficient by coefficient before it is returned.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import comb
from typing import Sequence

from ..lp import minimize
from ..rational import fmt
from .expr import EntropyVector, h_masks, i_masks, to_text, zero

MAX_VARIABLES = 6


class TooManyVariables(ValueError):
    pass


def elemental_count(n: int) -> int:
    return n + comb(n, 2) * 2 ** (n - 2)


def elemental_inequalities(n: int | Sequence[str], *, max_vars: int = MAX_VARIABLES) -> list[EntropyVector]:
    """``H(X_i | rest) >= 0`` and ``I(X_i; X_j | X_K) >= 0`` for all ``K`` avoiding ``i, j``."""
    names = tuple(f"X{i + 1}" for i in range(n)) if isinstance(n, int) else tuple(n)
    k = len(names)
    if k < 1:
        raise ValueError("need at least one variable")
    if k > max_vars:
        raise TooManyVariables(f"{k} variables exceeds the limit of {max_vars}")
    full = (1 << k) - 1
    out = [h_masks(names, 1 << i, full & ~(1 << i)) for i in range(k)]
    for i, j in combinations(range(k), 2):
        others = [b for b in range(k) if b not in (i, j)]
        for r in range(len(others) + 1):
            for pick in combinations(others, r):
                z = sum(1 << b for b in pick)
                out.append(i_masks(names, [1 << i, 1 << j], z))
    return out


@dataclass(frozen=True)
class ConstraintSet:
    equalities: tuple[EntropyVector, ...] = ()

    def over(self, names) -> "ConstraintSet":
        return ConstraintSet(tuple(c.over(names) for c in self.equalities))


def functional(names: Sequence[str], what: Sequence[str], of: Sequence[str]) -> EntropyVector:
    """``H(what | of) = 0`` as the single equality ``H(what, of) - H(of)``."""
    from .expr import H

    return H(names, what, of)


def independent(names: Sequence[str], group: Sequence[str]) -> EntropyVector:
    """Mutual independence of ``group``: ``sum H(X_i) - H(group) = 0``."""
    from .expr import H

    total = zero(names)
    for v in group:
        total = total + H(names, [v])
    return total - H(names, group)


@dataclass(frozen=True)
class ProofCertificate:
    target: EntropyVector
    constraints: ConstraintSet
    lambdas: tuple[tuple[EntropyVector, Fraction], ...]
    mus: tuple[tuple[EntropyVector, Fraction], ...]

    def expand(self) -> EntropyVector:
        total = zero(self.target.names)
        for e, lam in self.lambdas:
            total = total + e.scale(lam)
        for c, mu in self.mus:
            total = total + c.scale(mu)
        return total

    def verify(self) -> bool:
        return all(lam >= 0 for _, lam in self.lambdas) and self.expand() == self.target

    @property
    def proved(self) -> bool:
        return True

    def to_dict(self) -> dict:
        return {
            "status": "proved",
            "target": to_text(self.target),
            "variables": list(self.target.names),
            "constraints": [to_text(c) + " = 0" for c in self.constraints.equalities],
            "elemental_multipliers": [{"inequality": to_text(e) + " >= 0", "lambda": fmt(v)} for e, v in self.lambdas],
            "constraint_multipliers": [{"equality": to_text(c) + " = 0", "mu": fmt(v)} for c, v in self.mus],
            "verified": self.verify(),
        }


@dataclass(frozen=True)
class Witness:
    """Variables as GF(2)-linear functions of independent uniform bits ``b1, b2, ...``."""

    assignment: tuple[tuple[str, tuple[int, ...]], ...]
    value: Fraction

    def describe(self) -> dict[str, str]:
        out = {}
        for name, rows in self.assignment:
            parts = []
            for row in rows:
                bits = [f"b{i + 1}" for i in range(row.bit_length()) if row >> i & 1]
                parts.append("+".join(bits) if bits else "0")
            out[name] = "(" + ", ".join(parts) + ")" if len(parts) != 1 else parts[0]
        return out

    def to_dict(self) -> dict:
        return {"variables": self.describe(), "value": fmt(self.value)}


@dataclass(frozen=True)
class Unproven:
    """Not provable from Shannon inequalities and the constraints. Not a disproof by itself."""

    target: EntropyVector
    constraints: ConstraintSet
    witness: Witness | None = None

    @property
    def proved(self) -> bool:
        return False

    def to_dict(self) -> dict:
        out = {
            "status": "unproven",
            "target": to_text(self.target),
            "variables": list(self.target.names),
            "constraints": [to_text(c) + " = 0" for c in self.constraints.equalities],
        }
        if self.witness is not None:
            out["witness"] = self.witness.to_dict()
        return out


def prove(
    target: EntropyVector,
    constraints: ConstraintSet | Sequence[EntropyVector] = (),
    *,
    max_vars: int = MAX_VARIABLES,
    find_witness: bool = True,
) -> ProofCertificate | Unproven:
    if not isinstance(constraints, ConstraintSet):
        constraints = ConstraintSet(tuple(constraints))
    names = target.names
    for c in constraints.equalities:
        if c.names != names:
            raise ValueError("constraints must be over the same variables as the target")
    elems = elemental_inequalities(names, max_vars=max_vars)
    eqs = [c for c in constraints.equalities if not c.is_zero()]
    cols = [e.dense() for e in elems]
    cols += [c.dense() for c in eqs] + [[-x for x in c.dense()] for c in eqs]
    rows = len(cols[0]) if cols else (1 << len(names)) - 1
    a_eq = [[col[r] for col in cols] for r in range(rows)]
    b_eq = target.dense()
    # smallest total multiplier mass keeps certificates short
    x = minimize([1] * len(cols), a_eq, b_eq)
    if x is None:
        witness = find_gf2_witness(target, constraints) if find_witness else None
        return Unproven(target, constraints, witness)
    ne = len(elems)
    lambdas = tuple((elems[i], x[i]) for i in range(ne) if x[i])
    mus = []
    for j, c in enumerate(eqs):
        mu = x[ne + j] - x[ne + len(eqs) + j]
        if mu:
            mus.append((c, mu))
    cert = ProofCertificate(target, constraints, lambdas, tuple(mus))
    if not cert.verify():  # pragma: no cover - would mean an LP bug
        raise ArithmeticError("certificate failed exact re-expansion")
    return cert


# ---------------------------------------------------------------------------
# GF(2)-linear witnesses


def _rank(rows: list[int]) -> int:
    basis: list[int] = []
    for r in rows:
        for b in basis:
            r = min(r, r ^ b)
        if r:
            basis.append(r)
    return len(basis)


def gf2_entropy(assignment: Sequence[Sequence[int]]):
    """Entropy function (bits) of variables that are linear maps of uniform bits."""

    def h(mask: int) -> int:
        rows = [r for i, rs in enumerate(assignment) if mask >> i & 1 for r in rs]
        return _rank(rows)

    return h


def find_gf2_witness(
    target: EntropyVector,
    constraints: ConstraintSet = ConstraintSet(),
    *,
    bits: int = 2,
    budget: int = 200_000,
) -> Witness | None:
    """Search small linear distributions for one making the target negative.

    Each variable is one linear function of ``bits`` uniform bits (or a
    constant).  Returns the most negative value found.
    """
    n = target.n
    options = range(1 << bits)
    if len(options) ** n > budget:
        return None
    best: Witness | None = None
    for combo in product(options, repeat=n):
        assignment = [(c,) if c else () for c in combo]
        h = gf2_entropy(assignment)
        if any(c.evaluate(h) != 0 for c in constraints.equalities):
            continue
        val = Fraction(target.evaluate(h))
        if val < 0 and (best is None or val < best.value):
            best = Witness(tuple(zip(target.names, (tuple(a) for a in assignment))), val)
    return best
