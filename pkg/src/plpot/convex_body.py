"""Exact geometry of convex polytope bodies in the closed positive orthant.

A body is the convex hull of finitely many rational points in (R_+)^d,
d <= 4, with nonempty interior.  All geometric predicates here run in
exact rational arithmetic (`fractions.Fraction`), so membership tests,
lattice-point enumeration, and support values carry no rounding error.
Floating point enters only in the optional array views used by the
numerical layers.

Conventions
-----------
* A half-space is stored as ``(r, a)`` with primitive integer normal
  ``r`` and rational offset ``a``, meaning ``<x, r> <= a``.
* ``n P`` always denotes the dilate ``{n x : x in P}`` about the origin.
* Vertex and half-space tuples are sorted lexicographically so that
  equal bodies compare and hash equal.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    ConstantPolynomial,
    DegenerateBody,
    NegativeCoordinate,
    Unreachable,
)

MultiIndex = tuple[int, ...]
Vertex = tuple[Fraction, ...]
Halfspace = tuple[tuple[int, ...], Fraction]


def _frac(x) -> Fraction:
    """Coerce one coordinate to an exact rational.

    Accepts int, Fraction, and numeric strings like ``"3/2"``.  Floats are
    converted through their exact binary value, which is faithful but
    usually not what a config file intends; prefer strings there.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as a rational coordinate")


def _rank(rows: list[tuple[Fraction, ...]]) -> int:
    """Rank of a small rational matrix by fraction-free Gaussian elimination."""
    mat = [list(r) for r in rows]
    if not mat:
        return 0
    ncols = len(mat[0])
    rank = 0
    for col in range(ncols):
        pivot = next((i for i in range(rank, len(mat)) if mat[i][col] != 0), None)
        if pivot is None:
            continue
        mat[rank], mat[pivot] = mat[pivot], mat[rank]
        prow = mat[rank]
        for i in range(len(mat)):
            if i != rank and mat[i][col] != 0:
                f = mat[i][col] / prow[col]
                mat[i] = [a - f * b for a, b in zip(mat[i], prow)]
        rank += 1
        if rank == len(mat):
            break
    return rank


def _null_vector(rows: list[tuple[Fraction, ...]]) -> tuple[Fraction, ...] | None:
    """One nonzero vector orthogonal to all rows, or None if none exists.

    Only used with d-1 independent rows in R^d, where the orthogonal
    complement is a line.
    """
    d = len(rows[0])
    mat = [list(r) for r in rows]
    pivots: list[int] = []
    rank = 0
    for col in range(d):
        pivot = next((i for i in range(rank, len(mat)) if mat[i][col] != 0), None)
        if pivot is None:
            continue
        mat[rank], mat[pivot] = mat[pivot], mat[rank]
        prow = mat[rank]
        mat[rank] = [a / prow[col] for a in prow]
        for i in range(len(mat)):
            if i != rank and mat[i][col] != 0:
                f = mat[i][col]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[rank])]
        pivots.append(col)
        rank += 1
    free = [c for c in range(d) if c not in pivots]
    if not free:
        return None
    fc = free[0]
    vec = [Fraction(0)] * d
    vec[fc] = Fraction(1)
    for row, pc in zip(mat[:rank], pivots):
        vec[pc] = -row[fc]
    return tuple(vec)


def _primitive(normal: Sequence[Fraction], offset: Fraction) -> Halfspace:
    """Rescale so the normal has coprime integer entries, keeping direction."""
    denoms = [f.denominator for f in normal]
    scale = Fraction(math.lcm(*denoms))
    ints = [int(f * scale) for f in normal]
    g = math.gcd(*(abs(i) for i in ints))
    ints = [i // g for i in ints]
    return tuple(ints), offset * scale / g


@dataclass(frozen=True)
class ConvexBody:
    """Convex hull of rational points in the positive orthant, dim 1..4.

    Build through :func:`build_body`; the constructor does not validate.

    Attributes
    ----------
    dim : int
        Ambient dimension d.
    vertices : tuple of vertex tuples
        Irredundant vertex set, each a tuple of Fractions, sorted.
    halfspaces : tuple of (normal, offset)
        Complete facet description; ``<x, r> <= a`` for each entry.
    """

    dim: int
    vertices: tuple[Vertex, ...]
    halfspaces: tuple[Halfspace, ...]

    @cached_property
    def vertex_array(self) -> np.ndarray:
        """Float view of the vertices, shape (nv, d)."""
        arr = np.array([[float(c) for c in v] for v in self.vertices], dtype=float)
        arr.flags.writeable = False
        return arr

    def __str__(self) -> str:
        verts = ", ".join("(" + ", ".join(str(c) for c in v) + ")" for v in self.vertices)
        return f"ConvexBody(dim={self.dim}, vertices=[{verts}])"


def build_body(points: Iterable[Sequence]) -> ConvexBody:
    """Construct a body from generating points.

    Parameters
    ----------
    points : iterable of coordinate sequences
        At least d+1 affinely independent points, every coordinate >= 0.
        Coordinates may be ints, Fractions, or strings like ``"1/2"``.

    Returns
    -------
    ConvexBody
        With redundant generators removed and the exact facet list.

    Raises
    ------
    NegativeCoordinate
        If any coordinate is negative.
    DegenerateBody
        If the hull is not full-dimensional or dim is outside 1..4.
    """
    pts = [tuple(_frac(c) for c in p) for p in points]
    if not pts:
        raise DegenerateBody("no points given")
    d = len(pts[0])
    if not 1 <= d <= 4:
        raise DegenerateBody(f"dimension {d} outside supported range 1..4")
    if any(len(p) != d for p in pts):
        raise DegenerateBody("points of mixed dimension")
    for p in pts:
        if any(c < 0 for c in p):
            raise NegativeCoordinate(f"point {tuple(map(str, p))} leaves the positive orthant")
    pts = sorted(set(pts))
    base = pts[0]
    diffs = [tuple(a - b for a, b in zip(p, base)) for p in pts[1:]]
    if _rank(diffs) < d:
        raise DegenerateBody("points do not span a full-dimensional hull")

    halfspaces = _facet_hunt(pts, d)

    vertices = []
    for p in pts:
        active = [r for r, a in halfspaces if _dot(p, r) == a]
        if len(active) >= d and _rank([tuple(map(Fraction, r)) for r in active]) == d:
            vertices.append(p)
    body = ConvexBody(dim=d, vertices=tuple(vertices), halfspaces=halfspaces)
    for v in body.vertices:
        for r, a in body.halfspaces:
            assert _dot(v, r) <= a
    return body


def _dot(x: Sequence, r: Sequence) -> Fraction:
    return sum((xi * ri for xi, ri in zip(x, r)), start=Fraction(0))


def _facet_hunt(pts: list[Vertex], d: int) -> tuple[Halfspace, ...]:
    """Enumerate facets by testing every hyperplane through d generators.

    Quadratic-to-quartic in the number of generators, which is fine for
    the handful of vertices these bodies have.  Every facet of the hull
    contains d affinely independent generators, so no facet is missed.
    """
    if d == 1:
        lo = min(p[0] for p in pts)
        hi = max(p[0] for p in pts)
        return (((-1,), -lo), ((1,), hi))
    found: dict[tuple[int, ...], Fraction] = {}
    for comb in itertools.combinations(range(len(pts)), d):
        base = pts[comb[0]]
        rows = [tuple(a - b for a, b in zip(pts[i], base)) for i in comb[1:]]
        if _rank(rows) != d - 1:
            continue
        normal = _null_vector(rows)
        if normal is None:
            continue
        offset = _dot(base, normal)
        sides = [_dot(p, normal) - offset for p in pts]
        if all(s <= 0 for s in sides):
            pass
        elif all(s >= 0 for s in sides):
            normal = tuple(-c for c in normal)
            offset = -offset
        else:
            continue
        r, a = _primitive(normal, offset)
        prev = found.setdefault(r, a)
        assert prev == a
    # Drop supporting hyperplanes that touch only a low-dimensional face:
    # a facet's contact set has affine rank exactly d-1.
    facets = []
    for r, a in found.items():
        contact = [p for p in pts if _dot(p, r) == a]
        diffs = [tuple(x - y for x, y in zip(p, contact[0])) for p in contact[1:]]
        if _rank(diffs) == d - 1:
            facets.append((r, a))
    return tuple(sorted(facets))


def contains(body: ConvexBody, point: Sequence, scale=1) -> bool:
    """Exact membership test ``point in scale * body``.

    ``point`` entries and ``scale`` may be ints, Fractions, or strings;
    floats are taken at their exact binary value.
    """
    x = [_frac(c) for c in point]
    if len(x) != body.dim:
        raise ValueError(f"point has dimension {len(x)}, body has {body.dim}")
    s = _frac(scale)
    return all(_dot(x, r) <= s * a for r, a in body.halfspaces)


@lru_cache(maxsize=512)
def lattice_points(body: ConvexBody, n: int) -> tuple[MultiIndex, ...]:
    """All nonnegative integer points of ``n * body``, sorted lexicographically.

    This is the exponent set of the degree-n polynomial space attached to
    the body.  Enumeration scans the integer bounding box and keeps the
    points passing the exact facet test.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return ((0,) * body.dim,) if contains(body, (0,) * body.dim) else ()
    los, his = [], []
    for k in range(body.dim):
        cs = [v[k] for v in body.vertices]
        los.append(max(0, math.ceil(n * min(cs))))
        his.append(math.floor(n * max(cs)))
    out = []
    for cand in itertools.product(*(range(lo, hi + 1) for lo, hi in zip(los, his))):
        if all(sum(c * ri for c, ri in zip(cand, r)) <= n * a for r, a in body.halfspaces):
            out.append(cand)
    return tuple(out)


@dataclass(frozen=True)
class SupportValue:
    """Support function value together with one maximizing vertex."""

    value: object
    maximizer: Vertex

    def __float__(self) -> float:
        return float(self.value)


def support_value(body: ConvexBody, x: Sequence) -> SupportValue:
    """Support function ``max_v <x, v>`` over the vertex set.

    Exact when ``x`` has rational entries; float entries give a float
    result.  Ties return the lexicographically first maximizing vertex.
    """
    if len(x) != body.dim:
        raise ValueError(f"direction has dimension {len(x)}, body has {body.dim}")
    best = None
    best_v = None
    for v in body.vertices:
        val = sum(xi * vi for xi, vi in zip(x, v))
        if best is None or val > best:
            best, best_v = val, v
    return SupportValue(best, best_v)


def check_sigma_in_kp(body: ConvexBody, k_max: int = 16) -> int | None:
    """Smallest k <= k_max with the unit simplex inside ``k * body``, else None.

    Since dilation fixes the origin, the test reduces to the simplex
    vertices: the origin must lie in the body, and each coordinate unit
    vector in some common dilate.
    """
    origin = (0,) * body.dim
    if not contains(body, origin):
        return None
    units = [tuple(1 if i == k else 0 for i in range(body.dim)) for k in range(body.dim)]
    for k in range(1, k_max + 1):
        if all(contains(body, e, scale=k) for e in units):
            return k
    return None


@dataclass(frozen=True)
class LowerSetCheck:
    """Outcome of the downward-closure probe.

    ``ok`` is True when no violation was found up to ``n_probe``; a
    False verdict comes with an exact witness pair ``(inside, outside)``
    of lattice points in some dilate, componentwise ordered, where the
    smaller one escapes the dilate.
    """

    ok: bool
    witness: tuple[MultiIndex, MultiIndex] | None
    n_probe: int
    n_witness: int | None = None

    def __bool__(self) -> bool:
        return self.ok


def is_lower_set(body: ConvexBody, n_probe: int = 6) -> LowerSetCheck:
    """Probe whether the body's lattice sets are downward closed.

    Checks, for n = 1..n_probe, that decrementing any single coordinate
    of a lattice point of ``n * body`` stays inside.  A failure is a
    certificate that the body is not a lower set; success is evidence up
    to the probe depth only.
    """
    for n in range(1, n_probe + 1):
        pts = set(lattice_points(body, n))
        for j in sorted(pts):
            for k in range(body.dim):
                if j[k] == 0:
                    continue
                down = j[:k] + (j[k] - 1,) + j[k + 1:]
                if down not in pts:
                    return LowerSetCheck(False, (j, down), n_probe, n)
    return LowerSetCheck(True, None, n_probe)


def deg_p(poly, body: ConvexBody) -> int:
    """Smallest n >= 1 with the polynomial's support inside ``n * body``.

    ``poly`` may be a PolyCoeffs or any object with a ``support``
    attribute, or a bare iterable of multi-indices.

    Raises
    ------
    ConstantPolynomial
        If the support is empty or only the origin.
    Unreachable
        If some support point violates a through-origin half-space (no
        dilate ever contains it), or the admissible dilation range is
        empty.
    """
    support = getattr(poly, "support", poly)
    support = [tuple(int(c) for c in j) for j in support]
    if any(len(j) != body.dim for j in support):
        raise ValueError("support dimension does not match body")
    if any(c < 0 for j in support for c in j):
        raise ValueError("support indices must be nonnegative")
    support = [j for j in support if any(c != 0 for c in j)]
    if not support:
        raise ConstantPolynomial("support is empty or the origin alone")
    lo, hi = 1, None
    for j in support:
        for r, a in body.halfspaces:
            s = sum(c * ri for c, ri in zip(j, r))
            if a > 0:
                lo = max(lo, math.ceil(Fraction(s) / a))
            elif a == 0:
                if s > 0:
                    raise Unreachable(
                        f"support point {j} violates through-origin half-space {r}"
                    )
            else:
                # <j, r> <= n a with a < 0 caps n from above
                cap = math.floor(Fraction(s) / a)
                hi = cap if hi is None else min(hi, cap)
    if hi is not None and hi < lo:
        raise Unreachable("no single dilate contains the whole support")
    return lo


def dilate(body: ConvexBody, t) -> ConvexBody:
    """The dilate ``t * body`` about the origin, t a positive rational."""
    s = _frac(t)
    if s <= 0:
        raise ValueError("dilation factor must be positive")
    return build_body([tuple(s * c for c in v) for v in body.vertices])


def unit_simplex(d: int) -> ConvexBody:
    """Standard simplex: hull of the origin and the coordinate unit vectors."""
    pts = [(0,) * d] + [tuple(1 if i == k else 0 for i in range(d)) for k in range(d)]
    return build_body(pts)


def unit_box(d: int) -> ConvexBody:
    """Unit cube [0, 1]^d."""
    return build_body(list(itertools.product((0, 1), repeat=d)))


def non_lower_quadrilateral() -> ConvexBody:
    """Planar quadrilateral hull{(0,0), (1,0), (0,1), (1,2)}.

    The canonical body that contains the unit simplex yet is not a lower
    set; the smoothing counterexample lives on it.
    """
    return build_body([(0, 0), (1, 0), (0, 1), (1, 2)])


def body_to_dict(body: ConvexBody) -> dict:
    """JSON-ready description with coordinates as exact rational strings."""
    return {
        "dim": body.dim,
        "vertices": [[str(c) for c in v] for v in body.vertices],
        "halfspaces": [
            {"normal": list(r), "offset": str(a)} for r, a in body.halfspaces
        ],
    }


def body_from_dict(data: dict) -> ConvexBody:
    """Rebuild a body from :func:`body_to_dict` output (vertices only)."""
    return build_body(data["vertices"])
