"""Exact phase-one simplex over the rationals.

The tableau is kept fraction-free: every entry is an integer and the true
tableau is ``T / det`` where ``det`` is the previous pivot element (integer
pivoting as in lrs).  Divisions in the update are exact by construction.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence

from .rational import as_fraction


class LPError(ArithmeticError):
    pass


def _integer_row(coeffs: Sequence, rhs) -> tuple[list[int], int]:
    values = [as_fraction(c) for c in coeffs] + [as_fraction(rhs)]
    den = 1
    for v in values:
        den = lcm(den, v.denominator)
    ints = [int(v * den) for v in values]
    return ints[:-1], ints[-1]


class _Tableau:
    """Fraction-free tableau for ``A x = b, x >= 0`` with one artificial per row."""

    def __init__(self, a_eq, b_eq):
        m = len(a_eq)
        if m != len(b_eq):
            raise ValueError("row count mismatch between a_eq and b_eq")
        self.m = m
        self.ncols = ncols = len(a_eq[0]) if m else 0
        if any(len(r) != ncols for r in a_eq):
            raise ValueError("ragged constraint matrix")
        self.rhs = ncols + m
        self.rows: list[list[int]] = []
        for i, (coeffs, b) in enumerate(zip(a_eq, b_eq)):
            ints, bi = _integer_row(coeffs, b)
            if bi < 0:
                ints = [-x for x in ints]
                bi = -bi
            row = ints + [0] * m + [bi]
            row[ncols + i] = 1
            self.rows.append(row)
        self.basis = [ncols + i for i in range(m)]
        self.det = 1

    def pivot(self, leave: int, entering: int, obj: list[int]) -> list[int]:
        pivot_row = self.rows[leave]
        p = pivot_row[entering]
        det = self.det
        for i, row in enumerate(self.rows):
            if i == leave:
                continue
            f = row[entering]
            if f == 0:
                self.rows[i] = [(x * p) // det for x in row]
            else:
                self.rows[i] = [(x * p - f * y) // det for x, y in zip(row, pivot_row)]
        f = obj[entering]
        obj = [(x * p - f * y) // det for x, y in zip(obj, pivot_row)]
        self.det = p
        self.basis[leave] = entering
        return obj

    def ratio_row(self, entering: int) -> int:
        rhs = self.rhs
        leave = -1
        for i, row in enumerate(self.rows):
            a = row[entering]
            if a <= 0:
                continue
            if leave < 0:
                leave = i
                continue
            lr = self.rows[leave]
            lhs_v = row[rhs] * lr[entering]
            rhs_v = lr[rhs] * a
            if lhs_v < rhs_v or (lhs_v == rhs_v and self.basis[i] < self.basis[leave]):
                leave = i
        return leave

    def run(self, obj: list[int], allowed: int, rule: str, max_pivots: int) -> tuple[list[int], bool]:
        """Minimise; returns (objective row, bounded)."""
        degenerate_run = 0
        for _ in range(max_pivots):
            use_bland = rule == "bland" or degenerate_run > 50
            entering = -1
            if use_bland:
                for j in range(allowed):
                    if obj[j] < 0:
                        entering = j
                        break
            else:
                best = 0
                for j in range(allowed):
                    if obj[j] < best:
                        best = obj[j]
                        entering = j
            if entering < 0:
                return obj, True
            leave = self.ratio_row(entering)
            if leave < 0:
                return obj, False
            degenerate_run = degenerate_run + 1 if self.rows[leave][self.rhs] == 0 else 0
            obj = self.pivot(leave, entering, obj)
        raise LPError(f"simplex did not terminate within {max_pivots} pivots")

    def phase_one(self, rule: str, max_pivots: int) -> bool:
        obj = [0] * (self.rhs + 1)
        for row in self.rows:
            for j in range(self.ncols):
                obj[j] -= row[j]
            obj[self.rhs] -= row[self.rhs]
        obj, _ = self.run(obj, self.ncols, rule, max_pivots)
        return obj[self.rhs] == 0

    def drive_out_artificials(self) -> None:
        """Pivot zero-valued artificials out of the basis; drop redundant rows."""
        keep = []
        for i in range(self.m):
            if self.basis[i] < self.ncols:
                keep.append(i)
                continue
            row = self.rows[i]
            j = next((j for j in range(self.ncols) if row[j] != 0), -1)
            if j < 0:
                continue
            if row[j] < 0:
                # the row's rhs is zero, so negating keeps it feasible and det positive
                self.rows[i] = [-x for x in row]
            self.pivot(i, j, [0] * (self.rhs + 1))
            keep.append(i)
        self.rows = [self.rows[i] for i in keep]
        self.basis = [self.basis[i] for i in keep]
        self.m = len(keep)

    def point(self) -> list[Fraction]:
        x = [Fraction(0)] * self.ncols
        for i, j in enumerate(self.basis):
            if j < self.ncols:
                x[j] = Fraction(self.rows[i][self.rhs], self.det)
        return x


def feasible_point(
    a_eq: Sequence[Sequence],
    b_eq: Sequence,
    *,
    rule: str = "bland",
    max_pivots: int = 200_000,
) -> list[Fraction] | None:
    """Return some ``x >= 0`` with ``a_eq @ x == b_eq`` exactly, or None.

    ``rule`` is ``"bland"`` (smallest-index, never cycles) or ``"dantzig"``
    (most negative reduced cost, falls back to Bland after a run of
    degenerate pivots).
    """
    if len(a_eq) != len(b_eq):
        raise ValueError("row count mismatch between a_eq and b_eq")
    if not a_eq:
        return []
    t = _Tableau(a_eq, b_eq)
    if not t.phase_one(rule, max_pivots):
        return None
    return t.point()


class Unbounded(LPError):
    pass


def minimize(
    c: Sequence,
    a_eq: Sequence[Sequence],
    b_eq: Sequence,
    *,
    rule: str = "bland",
    max_pivots: int = 200_000,
) -> list[Fraction] | None:
    """An optimal ``x >= 0`` of ``min c.x`` s.t. ``a_eq @ x == b_eq``; None if infeasible.

    Raises Unbounded when the objective has no lower bound on the feasible set.
    """
    cost = [as_fraction(v) for v in c]
    if not a_eq:
        if any(v < 0 for v in cost):
            raise Unbounded("objective unbounded below")
        return [Fraction(0)] * len(cost)
    t = _Tableau(a_eq, b_eq)
    if len(cost) != t.ncols:
        raise ValueError("cost vector length does not match the constraint matrix")
    if not t.phase_one(rule, max_pivots):
        return None
    t.drive_out_artificials()
    den = 1
    for v in cost:
        den = lcm(den, v.denominator)
    ci = [int(v * den) for v in cost] + [0] * (t.rhs - t.ncols)
    # reduced costs, scaled by det
    obj = [cj * t.det for cj in ci] + [0]
    for i, b in enumerate(t.basis):
        cb = ci[b]
        if cb:
            obj = [o - cb * x for o, x in zip(obj, t.rows[i])]
    _, bounded = t.run(obj, t.ncols, rule, max_pivots)
    if not bounded:
        raise Unbounded("objective unbounded below")
    return t.point()


def verify_solution(a_eq, b_eq, x) -> bool:
    if any(v < 0 for v in x):
        return False
    for coeffs, b in zip(a_eq, b_eq):
        if sum(as_fraction(c) * v for c, v in zip(coeffs, x)) != as_fraction(b):
            return False
    return True
