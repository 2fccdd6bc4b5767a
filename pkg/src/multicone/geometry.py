"""Exact polyhedral computation over the rationals.

Polyhedra are homogenized into cones and converted with the double
description method.  Nothing in this module touches floating point.

Conventions
-----------
* ``HRep`` rows read ``normal . x <= offset``.  ``nonneg_orthant`` adds
  ``x_j >= 0`` for every coordinate without listing it.
* ``VRep`` is ``conv(vertices) + cone(rays)``.  Rays are primitive integer
  vectors; their sign is meaningful and never normalised away.  A VRep with
  rays but no vertices is read as a cone with apex at the origin; a VRep
  with neither is the empty set.
* Lines (lineality) are stored as a pair of opposite rays.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence, Union

from .lp import feasible_point
from .rational import as_fraction, as_vector, dot, fmt, fmt_vector, integer_direction, primitive


class DimensionMismatch(ValueError):
    pass


Vector = tuple[Fraction, ...]
Inequality = tuple[Vector, Fraction]


def _coerce_ineq(item, dim: int) -> Inequality:
    normal, offset = item
    normal = as_vector(normal)
    if len(normal) != dim:
        raise DimensionMismatch(f"normal of length {len(normal)} in dimension {dim}")
    if all(x == 0 for x in normal):
        raise ValueError("inequality with zero normal")
    return normal, as_fraction(offset)


@dataclass(frozen=True)
class HRep:
    dim: int
    inequalities: tuple[Inequality, ...] = ()
    nonneg_orthant: bool = False

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be positive")
        object.__setattr__(
            self, "inequalities", tuple(_coerce_ineq(q, self.dim) for q in self.inequalities)
        )

    def all_inequalities(self) -> list[Inequality]:
        out = list(self.inequalities)
        if self.nonneg_orthant:
            for j in range(self.dim):
                e = [Fraction(0)] * self.dim
                e[j] = Fraction(-1)
                out.append((tuple(e), Fraction(0)))
        return out

    def with_inequalities(self, extra: Iterable) -> "HRep":
        return HRep(self.dim, self.inequalities + tuple(extra), self.nonneg_orthant)


@dataclass(frozen=True)
class VRep:
    dim: int
    vertices: tuple[Vector, ...] = ()
    rays: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be positive")
        verts = tuple(as_vector(v) for v in self.vertices)
        rays = []
        for r in self.rays:
            if len(r) != self.dim:
                raise DimensionMismatch(f"ray of length {len(r)} in dimension {self.dim}")
            if all(as_fraction(x) == 0 for x in r):
                raise ValueError("zero ray")
            rays.append(integer_direction(r))
        if any(len(v) != self.dim for v in verts):
            raise DimensionMismatch("vertex length differs from dimension")
        if rays and not verts:
            verts = (tuple(Fraction(0) for _ in range(self.dim)),)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "rays", tuple(rays))

    @property
    def is_empty(self) -> bool:
        return not self.vertices


@dataclass(frozen=True)
class RegionSpec:
    rep: Union[HRep, VRep]
    canonical: bool = field(default=False, compare=False)

    @property
    def dim(self) -> int:
        return self.rep.dim


Region = Union[RegionSpec, HRep, VRep]


def _rep(r: Region):
    return r.rep if isinstance(r, RegionSpec) else r


# ---------------------------------------------------------------------------
# exact linear algebra on small integer matrices


def _rref(rows: Sequence[Sequence], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    mat = [[Fraction(x) for x in r] for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        p = mat[r][c]
        mat[r] = [x / p for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


def rank(rows: Sequence[Sequence], ncols: int | None = None) -> int:
    if not rows:
        return 0
    ncols = len(rows[0]) if ncols is None else ncols
    return len(_rref(rows, ncols)[1])


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[tuple[int, ...]]:
    """Integer basis of ``{y : row . y = 0}``, canonical for the row space."""
    red, pivots = _rref(rows, ncols) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        y = [Fraction(0)] * ncols
        y[f] = Fraction(1)
        for row, pc in zip(red, pivots):
            y[pc] = -row[f]
        basis.append(integer_direction(y))
    return basis


def _solve_square(rows: Sequence[Sequence[int]]) -> list[list[Fraction]]:
    """Inverse of a nonsingular square integer matrix."""
    n = len(rows)
    aug = [list(map(Fraction, r)) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    red, pivots = _rref(aug, n)
    if pivots != list(range(n)):
        raise ArithmeticError("singular basis in double description")
    return [row[n:] for row in red]


# ---------------------------------------------------------------------------
# double description


def _pointed_cone_rays(rows: list[tuple[int, ...]], d: int) -> list[tuple[int, ...]]:
    """Extreme rays of ``{y : a . y <= 0 for a in rows}``; the rows must have rank d."""
    basis_idx: list[int] = []
    for i, r in enumerate(rows):
        if rank([rows[j] for j in basis_idx] + [r], d) > len(basis_idx):
            basis_idx.append(i)
            if len(basis_idx) == d:
                break
    if len(basis_idx) < d:
        raise ArithmeticError("cone is not pointed")

    inv = _solve_square([rows[i] for i in basis_idx])
    all_basis = 0
    for i in basis_idx:
        all_basis |= 1 << i
    rays: list[tuple[int, ...]] = []
    tight: list[int] = []
    for j, i in enumerate(basis_idx):
        col = [-inv[k][j] for k in range(d)]
        rays.append(integer_direction(col))
        tight.append(all_basis & ~(1 << i))

    in_basis = set(basis_idx)
    for i, a in enumerate(rows):
        if i in in_basis:
            continue
        bit = 1 << i
        vals = [dot(a, r) for r in rays]
        pos = [k for k, v in enumerate(vals) if v > 0]
        neg = [k for k, v in enumerate(vals) if v < 0]
        if not pos:
            for k, v in enumerate(vals):
                if v == 0:
                    tight[k] |= bit
            continue
        new_rays: list[tuple[int, ...]] = []
        new_tight: list[int] = []
        for p in pos:
            for q in neg:
                common = tight[p] & tight[q]
                if common.bit_count() < d - 2:
                    continue
                adjacent = True
                for k in range(len(rays)):
                    if k != p and k != q and tight[k] & common == common:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                vp, vq = vals[p], vals[q]
                ray = primitive([vp * y - vq * x for x, y in zip(rays[p], rays[q])])
                new_rays.append(ray)
                new_tight.append(common | bit)
        keep = [k for k, v in enumerate(vals) if v <= 0]
        rays = [rays[k] for k in keep] + new_rays
        tight = [tight[k] | (bit if vals[k] == 0 else 0) for k in keep] + new_tight
    return rays


def cone_generators(rows: Iterable[Sequence], d: int) -> tuple[list[tuple[int, ...]], list[tuple[int, ...]]]:
    """Generators of ``{y in Q^d : a . y <= 0}``.

    Returns ``(rays, lineality)``: extreme rays of the cone intersected with
    the orthogonal complement of its lineality space, and an integer basis of
    the lineality space itself.
    """
    seen = set()
    clean: list[tuple[int, ...]] = []
    for r in rows:
        v = integer_direction(r)
        if len(v) != d:
            raise DimensionMismatch("row length differs from dimension")
        if all(x == 0 for x in v) or v in seen:
            continue
        seen.add(v)
        clean.append(v)
    lin = nullspace(clean, d)
    work = clean + lin + [tuple(-x for x in l) for l in lin]
    if not work:
        return [], lin
    return _pointed_cone_rays(work, d), lin


# ---------------------------------------------------------------------------
# conversions


def _empty_hrep(dim: int) -> HRep:
    e = tuple(Fraction(int(j == 0)) for j in range(dim))
    return HRep(dim, ((e, Fraction(-1)), (tuple(-x for x in e), Fraction(0))))


def _sorted_vrep(dim, vertices, rays) -> VRep:
    return VRep(dim, tuple(sorted(set(vertices))), tuple(sorted(set(rays))))


def h_to_v(h: Region) -> VRep:
    """Minimal V-representation of an H-represented polyhedron.

    An infeasible system yields the empty VRep (``result.is_empty``).
    """
    h = _rep(h)
    if isinstance(h, VRep):
        raise TypeError("h_to_v expects an HRep")
    d = h.dim
    rows = [tuple(normal) + (-offset,) for normal, offset in h.all_inequalities()]
    rows.append((0,) * d + (-1,))
    rays, lin = cone_generators(rows, d + 1)
    vertices = []
    rec = []
    for r in rays:
        if r[d] > 0:
            vertices.append(tuple(Fraction(x, r[d]) for x in r[:d]))
        else:
            rec.append(primitive(r[:d]))
    for l in lin:
        rec.append(primitive(l[:d]))
        rec.append(primitive([-x for x in l[:d]]))
    if not vertices:
        return VRep(d)
    return _sorted_vrep(d, vertices, rec)


def _scaled_ineq(a: Sequence[int], c: int) -> Inequality:
    # row (a, c) means a.x + c <= 0; rescale so the normal is primitive
    g = 0
    for x in a:
        g = gcd(g, x)
    return tuple(Fraction(x // g) for x in a), Fraction(-c, g)


def v_to_h(v: Region) -> HRep:
    """Minimal facet description of ``conv(vertices) + cone(rays)``.

    Implicit equalities come out as pairs of opposite inequalities.
    """
    v = _rep(v)
    if isinstance(v, HRep):
        raise TypeError("v_to_h expects a VRep")
    d = v.dim
    if v.is_empty:
        return _empty_hrep(d)
    gens = [tuple(p) + (Fraction(1),) for p in v.vertices]
    gens += [tuple(r) + (0,) for r in v.rays]
    rays, lin = cone_generators(gens, d + 1)
    ineqs = set()
    for y in rays:
        a, c = y[:d], y[d]
        if all(x == 0 for x in a):
            continue
        ineqs.add(_scaled_ineq(a, c))
    for l in lin:
        a, c = l[:d], l[d]
        ineqs.add(_scaled_ineq(a, c))
        ineqs.add(_scaled_ineq([-x for x in a], -c))
    return HRep(d, tuple(sorted(ineqs)))


def canonicalize(r: Region) -> RegionSpec:
    """Redundancy-free, primitive, lexicographically sorted form of the same kind."""
    rep = _rep(r)
    if isinstance(r, RegionSpec) and r.canonical:
        return r
    if isinstance(rep, HRep):
        return RegionSpec(v_to_h(h_to_v(rep)), canonical=True)
    return RegionSpec(h_to_v(v_to_h(rep)), canonical=True)


def to_hrep(r: Region) -> HRep:
    rep = _rep(r)
    return rep if isinstance(rep, HRep) else v_to_h(rep)


def to_vrep(r: Region) -> VRep:
    rep = _rep(r)
    return rep if isinstance(rep, VRep) else h_to_v(rep)


# ---------------------------------------------------------------------------
# membership, sums, equality


def contains(r: Region, p: Sequence) -> bool:
    rep = _rep(r)
    p = as_vector(p)
    if len(p) != rep.dim:
        raise DimensionMismatch(f"point of length {len(p)} in dimension {rep.dim}")
    if isinstance(rep, HRep):
        return all(dot(a, p) <= b for a, b in rep.all_inequalities())
    if rep.is_empty:
        return False
    nv, nr = len(rep.vertices), len(rep.rays)
    a_eq = []
    for j in range(rep.dim):
        a_eq.append([v[j] for v in rep.vertices] + [r[j] for r in rep.rays])
    a_eq.append([1] * nv + [0] * nr)
    return feasible_point(a_eq, list(p) + [1]) is not None


def recession_contains(r: Region, direction: Sequence) -> bool:
    h = to_hrep(r)
    return all(dot(a, direction) <= 0 for a, _ in h.all_inequalities())


def minkowski_sum(a: Region, b: Region) -> VRep:
    a, b = to_vrep(a), to_vrep(b)
    if a.dim != b.dim:
        raise DimensionMismatch(f"cannot add regions of dimension {a.dim} and {b.dim}")
    if a.is_empty or b.is_empty:
        return VRep(a.dim)
    verts = {tuple(x + y for x, y in zip(p, q)) for p in a.vertices for q in b.vertices}
    raw = VRep(a.dim, tuple(verts), a.rays + b.rays)
    return canonicalize(raw).rep


def minkowski_sum_all(regions: Iterable[Region]) -> VRep:
    regions = list(regions)
    if not regions:
        raise ValueError("empty sum")
    acc = to_vrep(regions[0])
    for r in regions[1:]:
        acc = minkowski_sum(acc, r)
    return acc


def included_in(a: Region, b: Region) -> bool:
    """Mutual-inclusion building block: every generator of a lies in b."""
    va = to_vrep(a)
    if va.is_empty:
        return True
    hb = to_hrep(b)
    return all(contains(hb, p) for p in va.vertices) and all(
        recession_contains(hb, r) for r in va.rays
    )


def regions_equal(a: Region, b: Region) -> bool:
    ra, rb = _rep(a), _rep(b)
    if ra.dim != rb.dim:
        raise DimensionMismatch(f"dimensions {ra.dim} and {rb.dim}")
    ca = canonicalize(to_hrep(a)).rep
    cb = canonicalize(to_hrep(b)).rep
    if ca == cb:
        return True
    return included_in(a, b) and included_in(b, a)


# ---------------------------------------------------------------------------
# file formats


def columns(matrix: Sequence[Sequence]) -> list[tuple]:
    return [tuple(col) for col in zip(*matrix)] if matrix else []


def matrix_from_columns(cols: Sequence[Sequence]) -> list[tuple]:
    return [tuple(row) for row in zip(*cols)] if cols else []


def write_matrix_csv(matrix: Sequence[Sequence], stream=None) -> str:
    """One row per coordinate; entries as integers or ``p/q`` strings."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in matrix:
        writer.writerow([fmt(x) for x in row])
    text = buf.getvalue()
    if stream is not None:
        stream.write(text)
    return text


def read_matrix_csv(text: str) -> list[tuple[Fraction, ...]]:
    rows = []
    for rec in csv.reader(io.StringIO(text)):
        if not rec or all(not c.strip() for c in rec):
            continue
        rows.append(tuple(Fraction(c.strip()) for c in rec))
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise ValueError("ragged matrix")
    return rows


def region_to_dict(r: Region) -> dict:
    rep = _rep(r)
    out = {"dim": rep.dim, "ineqs": [], "vertices": [], "rays": []}
    if isinstance(rep, HRep):
        out["kind"] = "h"
        out["ineqs"] = [{"normal": fmt_vector(a), "offset": fmt(b)} for a, b in rep.inequalities]
        out["nonneg_orthant"] = rep.nonneg_orthant
    else:
        out["kind"] = "v"
        out["vertices"] = [fmt_vector(v) for v in rep.vertices]
        out["rays"] = [fmt_vector(ray) for ray in rep.rays]
    return out


def region_from_dict(d: dict) -> RegionSpec:
    kind = d.get("kind") or ("h" if d.get("ineqs") else "v")
    if kind == "h":
        ineqs = tuple((as_vector(q["normal"]), as_fraction(q["offset"])) for q in d.get("ineqs", []))
        return RegionSpec(HRep(int(d["dim"]), ineqs, bool(d.get("nonneg_orthant", False))))
    return RegionSpec(VRep(int(d["dim"]), tuple(as_vector(v) for v in d.get("vertices", [])),
                           tuple(as_vector(r) for r in d.get("rays", []))))


def region_to_json(r: Region) -> str:
    return json.dumps(region_to_dict(r), sort_keys=True)


def region_from_json(text: str) -> RegionSpec:
    return region_from_dict(json.loads(text))
