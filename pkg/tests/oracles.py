"""Independent, deliberately naive reference computations used only by tests."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import gcd

import numpy as np


def _solve_square(a, b):
    """Exact Gauss-Jordan solve; None when singular."""
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(y)] for row, y in zip(a, b)]
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c] != 0), None)
        if p is None:
            return None
        m[c], m[p] = m[p], m[c]
        piv = m[c][c]
        m[c] = [x / piv for x in m[c]]
        for r in range(n):
            if r != c and m[r][c] != 0:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [m[r][n] for r in range(n)]


def _kernel_line(rows, d):
    """Generator of the kernel when it is one-dimensional, else None."""
    # fix one free coordinate at a time and solve the rest
    for free in range(d):
        others = [j for j in range(d) if j != free]
        for pick in combinations(range(len(rows)), d - 1):
            a = [[rows[i][j] for j in others] for i in pick]
            b = [-rows[i][free] for i in pick]
            sol = _solve_square(a, b)
            if sol is None:
                continue
            v = [Fraction(0)] * d
            v[free] = Fraction(1)
            for j, x in zip(others, sol):
                v[j] = x
            if all(sum(Fraction(r[j]) * v[j] for j in range(d)) == 0 for r in rows):
                return v
    return None


def _primitive(v):
    den = 1
    for x in v:
        den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    return tuple(x // g for x in ints)


def brute_force_rays(g_rows, d):
    """Extreme rays of the pointed cone {x : g.x <= 0 for g in g_rows}.

    Every (d-1)-subset of constraints whose tight set has rank d-1 fixes a
    line; both directions are kept when they satisfy all constraints.
    """
    rays = set()
    for pick in combinations(range(len(g_rows)), d - 1):
        rows = [g_rows[i] for i in pick]
        v = _kernel_line(rows, d) if d > 1 else [Fraction(1)]
        if v is None:
            continue
        for sgn in (1, -1):
            w = [sgn * x for x in v]
            if all(sum(Fraction(r[j]) * w[j] for j in range(d)) <= 0 for r in g_rows):
                rays.add(_primitive(w))
    return rays


def fourier_motzkin(ineqs, eliminate):
    """Project {x : a.x <= b} by removing coordinates in ``eliminate`` (indices).

    Returns inequalities over the remaining coordinates, in their original order.
    """
    rows = [(list(map(Fraction, a)), Fraction(b)) for a, b in ineqs]
    for j in sorted(eliminate, reverse=True):
        pos = [r for r in rows if r[0][j] > 0]
        neg = [r for r in rows if r[0][j] < 0]
        zero = [r for r in rows if r[0][j] == 0]
        out = [(a[:j] + a[j + 1 :], b) for a, b in zero]
        for ap, bp in pos:
            for an, bn in neg:
                lp, ln = ap[j], -an[j]
                a = [ln * x + lp * y for x, y in zip(ap, an)]
                b = ln * bp + lp * bn
                del a[j]
                if any(a) or b < 0:
                    out.append((a, b))
        rows = _dedupe(out)
    return rows


def _dedupe(rows):
    seen = {}
    for a, b in rows:
        if not any(a):
            seen[("trivial", b)] = (a, b)
            continue
        scale = max(abs(x) for x in a)
        key = (tuple(x / scale for x in a), b / scale)
        seen[key] = (a, b)
    return list(seen.values())


def satisfies(ineqs, x):
    return all(sum(Fraction(ai) * Fraction(xi) for ai, xi in zip(a, x)) <= b for a, b in ineqs)


def _solve_unique(a, b):
    """Unique exact solution of a (possibly overdetermined) system, else None."""
    rows, n = len(a), len(a[0]) if a else 0
    m = [[Fraction(x) for x in row] + [Fraction(y)] for row, y in zip(a, b)]
    r = 0
    for c in range(n):
        p = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if p is None:
            return None
        m[r], m[p] = m[p], m[r]
        piv = m[r][c]
        m[r] = [x / piv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        r += 1
    if any(m[i][n] != 0 for i in range(r, rows)):
        return None
    return [m[i][n] for i in range(n)]


def lp_by_basis_enumeration(c, a_eq, b_eq):
    """Minimum of c.x over {A x = b, x >= 0} by trying every independent support (bounded cases only)."""
    m, n = len(a_eq), len(a_eq[0])
    best = None
    for k in range(0, min(m, n) + 1):
        for cols in combinations(range(n), k):
            if k == 0:
                if any(Fraction(v) != 0 for v in b_eq):
                    continue
                sol = []
            else:
                sol = _solve_unique([[a_eq[i][j] for j in cols] for i in range(m)], b_eq)
            if sol is None or any(v < 0 for v in sol):
                continue
            x = [Fraction(0)] * n
            for j, v in zip(cols, sol):
                x[j] = v
            val = sum(Fraction(ci) * xi for ci, xi in zip(c, x))
            if best is None or val < best:
                best = val
    return best


def entropy_of_joint(p, values, cols):
    """Plain-dict marginal entropy in bits."""
    marg = {}
    for prob, row in zip(p, values):
        key = tuple(row[c] for c in cols)
        marg[key] = marg.get(key, 0.0) + prob
    q = np.array([v for v in marg.values() if v > 0])
    return float(-(q * np.log2(q)).sum())
