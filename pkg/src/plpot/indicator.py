"""Logarithmic indicator of a body and the geometry of its level sets.

For a body P with vertex set V the indicator is

    h_P(z) = max_{v in V} sum_k v_k * log|z_k|,

the natural logarithmic growth envelope of polynomials with exponents
in the dilates of P.  At zero coordinates the convention is
0 * (-inf) = 0: a vertex contributes only if every coordinate it
touches with a positive exponent has positive modulus, which matches
the supremum over the body because the face {x_k = 0} of P is spanned
by vertices of P.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .convex_body import ConvexBody, check_sigma_in_kp
from .errors import UnboundedLevelSet


@dataclass(frozen=True)
class LogPoint:
    """A point recorded by coordinate moduli and their logarithms.

    ``logs`` is ``log(moduli)`` with ``-inf`` at zero coordinates.  Keeping
    both views lets extremely large or small points be represented exactly
    in log form without overflow.
    """

    moduli: tuple[float, ...]
    logs: tuple[float, ...]

    @classmethod
    def from_point(cls, z) -> "LogPoint":
        m = np.abs(np.asarray(z, dtype=complex))
        return cls.from_moduli(m)

    @classmethod
    def from_moduli(cls, moduli) -> "LogPoint":
        m = np.asarray(moduli, dtype=float)
        if np.any(m < 0) or np.any(np.isnan(m)):
            raise ValueError("moduli must be nonnegative")
        with np.errstate(divide="ignore"):
            logs = np.log(m)
        return cls(tuple(m.tolist()), tuple(logs.tolist()))

    @classmethod
    def from_logs(cls, logs) -> "LogPoint":
        ls = np.asarray(logs, dtype=float)
        if np.any(np.isnan(ls)):
            raise ValueError("logs must not be NaN")
        with np.errstate(over="ignore"):
            m = np.exp(ls)
        return cls(tuple(m.tolist()), tuple(ls.tolist()))

    @property
    def dim(self) -> int:
        return len(self.moduli)


def h_p_on_logs(body: ConvexBody, logs: np.ndarray) -> np.ndarray:
    """Vectorized indicator on log-moduli arrays of shape (..., d).

    Returns max over vertices of <v, logs> with the 0 * (-inf) = 0
    convention; -inf where no vertex applies.
    """
    logs = np.asarray(logs, dtype=float)
    if logs.shape[-1] != body.dim:
        raise ValueError("log-point dimension does not match body")
    verts = body.vertex_array
    best = np.full(logs.shape[:-1], -np.inf)
    with np.errstate(invalid="ignore"):
        for v in verts:
            terms = np.where(v == 0.0, 0.0, v * logs)
            cand = terms.sum(axis=-1)
            np.maximum(best, cand, out=best)
    return best


def h_p(body: ConvexBody, point) -> float:
    """Indicator value at one point.

    ``point`` may be a LogPoint, a complex coordinate sequence, or a
    sequence of nonnegative moduli.  Zero coordinates are allowed; the
    value is -inf only when every vertex needs a vanished coordinate.
    """
    if isinstance(point, LogPoint):
        logs = np.asarray(point.logs)
    else:
        arr = np.asarray(point)
        if np.iscomplexobj(arr):
            arr = np.abs(arr)
        arr = np.asarray(arr, dtype=float)
        if np.any(arr < 0):
            raise ValueError("moduli must be nonnegative")
        with np.errstate(divide="ignore"):
            logs = np.log(arr)
    return float(h_p_on_logs(body, logs))


def make_h_function(body: ConvexBody):
    """Vectorized callable z -> h_P(z) on complex arrays of shape (..., d)."""

    def h(z):
        m = np.abs(np.asarray(z, dtype=complex))
        with np.errstate(divide="ignore"):
            logs = np.log(m)
        return h_p_on_logs(body, logs)

    return h


@dataclass(frozen=True)
class LowerBoundCheck:
    """Comparison of the indicator against the coordinatewise growth floor.

    ``lhs`` is the indicator value, ``rhs`` the floor
    (1/k) max_j log+ |z_j|, and ``ok`` records lhs >= rhs - 1e-12.
    """

    lhs: float
    rhs: float
    k: int
    ok: bool


def check_lower_bound(body: ConvexBody, point, k: int) -> LowerBoundCheck:
    """Check h_P(z) >= (1/k) * max_j log+ |z_j| given the simplex sits in k*P.

    Raises
    ------
    ValueError
        If the unit simplex is not contained in ``k * body``, which is the
        hypothesis making the bound valid.
    """
    k0 = check_sigma_in_kp(body, k_max=k)
    if k0 is None:
        raise ValueError(f"unit simplex not inside {k} * body")
    if isinstance(point, LogPoint):
        logs = np.asarray(point.logs)
    else:
        with np.errstate(divide="ignore"):
            logs = np.log(np.abs(np.asarray(point, dtype=complex)))
    lhs = float(h_p_on_logs(body, logs))
    rhs = float(max(0.0, np.max(logs)) / k)
    return LowerBoundCheck(lhs=lhs, rhs=rhs, k=k, ok=lhs >= rhs - 1e-12)


@dataclass(frozen=True)
class LevelSetDistance:
    """Sampled distance between two indicator level surfaces.

    ``estimate`` is the minimum distance found between the surfaces in
    moduli space, always an upper bound for the true surface distance;
    ``resolution`` is the sample spacing near the reported closest pair
    and calibrates how far the estimate can sit above the local minimum
    it converged to.  In dimension 2 the pieces of the surfaces are
    enumerated exactly, so every local basin is searched; in dimension 3
    the surfaces are sampled along rays and ``resolution`` is the global
    spacing of that coarser net.
    """

    estimate: float
    resolution: float
    level: float
    level_far: float


def _trace_surface(body: ConvexBody, dirs: np.ndarray, level: float) -> np.ndarray:
    """Points rho * u with h_P = level along each direction u (rows of dirs).

    The indicator is nondecreasing in rho along any ray with positive
    direction entries and tends to +inf, so a bisection converges; the
    bracket search expands and contracts by factors of 4.
    """
    m = dirs.shape[0]
    rho = np.ones(m)

    def surf_vals(r):
        return h_p_on_logs(body, np.log(r[:, None] * dirs))

    lo = rho.copy()
    for _ in range(700):
        vals = surf_vals(lo)
        mask = vals >= level
        if not mask.any():
            break
        lo[mask] /= 4.0
    else:
        raise UnboundedLevelSet("level not bracketed from below along some ray")
    hi = rho.copy()
    for _ in range(700):
        vals = surf_vals(hi)
        mask = vals <= level
        if not mask.any():
            break
        hi[mask] *= 4.0
    else:
        raise UnboundedLevelSet("level not bracketed from above along some ray")
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        vals = surf_vals(mid)
        below = vals < level
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    mid = 0.5 * (lo + hi)
    return mid[:, None] * dirs


def _boundary_segments(body: ConvexBody, level: float) -> list:
    """Edges, in log-moduli space, of the planar region {h_P <= level}.

    The sublevel region is the convex polyhedron {<v, u> <= level over
    vertices v}, unbounded toward very negative coordinates, so it is
    truncated by a box whose low walls sit far enough out that their
    exp-images are negligible against the exp-image of any breakpoint.
    Returns (p, q) endpoint pairs in u-space, one per body vertex whose
    constraint carries an edge of the boundary.
    """
    verts = body.vertex_array
    lo = -(2.0 * abs(level) + 60.0)
    hi = []
    row_max = float(verts.sum(axis=1).max())
    for k in range(2):
        pos = verts[:, k][verts[:, k] > 0]
        hi.append(min((abs(level) + abs(lo) * row_max + 5.0) / float(pos.min()), 700.0))
    rows = [(float(v[0]), float(v[1]), level) for v in verts if v.any()]
    n_real = len(rows)
    rows += [(-1.0, 0.0, -lo), (0.0, -1.0, -lo), (1.0, 0.0, hi[0]), (0.0, 1.0, hi[1])]
    a_mat = np.array([[r[0], r[1]] for r in rows])
    b_vec = np.array([r[2] for r in rows])
    pts = []
    owners = []
    for i in range(len(rows)):
        for j in range(i + 1, len(rows)):
            m2 = a_mat[[i, j]]
            det = m2[0, 0] * m2[1, 1] - m2[0, 1] * m2[1, 0]
            if abs(det) < 1e-12 * (np.abs(m2).max() ** 2 + 1e-300):
                continue
            u = np.linalg.solve(m2, b_vec[[i, j]])
            if np.all(a_mat @ u <= b_vec + 1e-7 * (1.0 + np.abs(b_vec))):
                pts.append(u)
                owners.append((i, j))
    segments = []
    for i in range(n_real):
        hits = [p for p, o in zip(pts, owners) if i in o]
        if len(hits) < 2:
            continue
        tangent = np.array([-a_mat[i, 1], a_mat[i, 0]])
        proj = [float(p @ tangent) for p in hits]
        p_min = hits[int(np.argmin(proj))]
        p_max = hits[int(np.argmax(proj))]
        if np.linalg.norm(p_max - p_min) > 1e-9:
            segments.append((p_min, p_max))
    return segments


def _segment_pair_min(seg_a, seg_b, starts: int, rounds: int):
    """Closest approach of the exp-images of two u-space segments.

    Re-grids a shrinking parameter box around the best (t, s) each round;
    the first pass is dense so endpoint pinches and interior basins are
    both seeded.  Returns (distance, spacing) where spacing is the local
    sample spacing in moduli space at the final pair.
    """
    pa, pb = seg_a
    qa, qb = seg_b

    def m_of(t, p0, p1):
        with np.errstate(over="ignore"):
            return np.exp(p0[None, :] + t[:, None] * (p1 - p0)[None, :])

    ct, cs, half = 0.5, 0.5, 0.5
    best = np.inf
    for r in range(rounds):
        n = 65 if r == 0 else starts
        t = np.clip(np.linspace(ct - half, ct + half, n), 0.0, 1.0)
        s = np.clip(np.linspace(cs - half, cs + half, n), 0.0, 1.0)
        ma = m_of(t, pa, pb)
        mb = m_of(s, qa, qb)
        dmat = np.hypot(
            ma[:, None, 0] - mb[None, :, 0], ma[:, None, 1] - mb[None, :, 1]
        )
        it, js = np.unravel_index(int(np.argmin(dmat)), dmat.shape)
        best = float(dmat[it, js])
        ct, cs = float(t[it]), float(s[js])
        half *= 0.35
    delta = max(half / 0.35, 1e-15)
    spacing = 0.0
    for c0, p0, p1 in ((ct, pa, pb), (cs, qa, qb)):
        lohi = np.clip(np.array([c0 - delta, c0 + delta]), 0.0, 1.0)
        mm = m_of(lohi, p0, p1)
        spacing += float(np.hypot(mm[1, 0] - mm[0, 0], mm[1, 1] - mm[0, 1]))
    return best, spacing


def level_set_distance(body: ConvexBody, x: LogPoint, c: float, search=200) -> LevelSetDistance:
    """Distance in moduli space between {h_P = h_P(x)} and {h_P = h_P(x) - log c}.

    ``c`` in (0, 1) scales the far level down in value space, so the far
    surface {e^{h_P} = (1/c) e^{h_P(x)}} lies outside the near one.
    Because both surfaces are rotation-invariant in each complex
    coordinate, Euclidean distance between moduli vectors equals the
    distance between the corresponding torus orbits.  In dimension 2 the
    surfaces are polyhedral in log-moduli, so their edges are enumerated
    exactly and every edge pair is minimized over; this resolves the
    near-axis pinch of non-lower-set bodies, where the two surfaces
    approach within a multiple of e^{-h_P(x)}.  ``search`` sets the
    refinement grid per zoom round (or, via the largest axis of a grid
    specification, the ray count in dimension 3).

    Raises
    ------
    UnboundedLevelSet
        If h_P(x) <= 0, where the inner level set degenerates.
    """
    if not 0 < c < 1:
        raise ValueError("level constant c must lie in (0, 1)")
    n_dirs = max(int(getattr(a, "num", 0)) for a in search.axes) if hasattr(search, "axes") else int(search)
    level = h_p(body, x)
    if not level > 0:
        raise UnboundedLevelSet(f"indicator value {level} is not positive")
    level_far = level - math.log(c)
    d = body.dim
    if d == 1:
        est = math.exp(level_far) - math.exp(level)
        return LevelSetDistance(estimate=est, resolution=0.0, level=level, level_far=level_far)
    if d == 2:
        near = _boundary_segments(body, level)
        far = _boundary_segments(body, level_far)
        if not near or not far:
            raise UnboundedLevelSet("a level surface has no boundary edges")
        starts = min(max(int(math.isqrt(max(n_dirs, 1))) * 2 + 1, 9), 65)
        best = np.inf
        res = np.inf
        for sa in near:
            for sb in far:
                dist, spacing = _segment_pair_min(sa, sb, starts, rounds=40)
                if dist < best:
                    best, res = dist, spacing
        return LevelSetDistance(estimate=float(best), resolution=float(res), level=level, level_far=level_far)
    if d == 3:
        k = max(8, int(math.sqrt(n_dirs)))
        margin = (math.pi / 2) / (4 * k)
        th = np.linspace(margin, math.pi / 2 - margin, k)
        t1, t2 = np.meshgrid(th, th, indexing="ij")
        dirs = np.stack(
            [np.cos(t1) * np.cos(t2), np.cos(t1) * np.sin(t2), np.sin(t1)], axis=-1
        ).reshape(-1, 3)
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        s_near = _trace_surface(body, dirs, level)
        s_far = _trace_surface(body, dirs, level_far)
        diff = s_near[:, None, :] - s_far[None, :, :]
        dist = float(np.sqrt((diff**2).sum(axis=-1)).min())
        res = float(
            np.linalg.norm(np.diff(s_near, axis=0), axis=1).max()
            + np.linalg.norm(np.diff(s_far, axis=0), axis=1).max()
        )
        return LevelSetDistance(estimate=dist, resolution=res, level=level, level_far=level_far)
    raise ValueError("level-set tracing supports dimensions 1..3")
