"""Two regularizations of indicator-class functions and their stress tests.

Convolution smoothing ``u * chi_eps`` with a product bump kernel keeps
the indicator class only for lower-set bodies; the explicit
quadrilateral construction in :func:`counterexample_point` drives the
smoothing gap above any requested constant.  The inf-convolution

    u_t(x) = -log inf_y [ e^{-u(y)} + |y - x| / t ]

regularizes from above for every body; :func:`ferrier_contracts` checks
its structural guarantees on samples, sharing one candidate pool across
all t values so that monotonicity and the Lipschitz identity hold to
floating-point rounding rather than to search error.

All minimizations are grid searches: a multistart lattice (3 per real
dimension plus the center), one exhaustive pass at the caller's grid
resolution over the pruned search ball, then geometric zoom rounds.
Reported ``grid_error`` values are resolution-based estimates; achieved
minima are always true upper bounds of the infima.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .convex_body import ConvexBody, body_to_dict, non_lower_quadrilateral
from .errors import (
    ConfigError,
    ContractViolation,
    NonFiniteSample,
    QuadratureTooCoarse,
    ToleranceExceeded,
)
from .grids import GridField, GridSpec
from .indicator import h_p_on_logs

# ---------------------------------------------------------------------------
# kernel


def _bump(s: np.ndarray) -> np.ndarray:
    """exp(-1/(1-s)) for s < 1, else 0; the standard compactly supported bump."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = s < 1.0
    with np.errstate(divide="ignore", over="ignore", under="ignore"):
        out[inside] = np.exp(-1.0 / (1.0 - s[inside]))
    return out


def _gauss01(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


@dataclass(frozen=True, eq=False)
class Kernel:
    """Product bump kernel on moduli with its polar quadrature.

    The profile is prod_k beta(|z_k|^2) with beta(s) = exp(-1/(1-s)),
    supported in the unit polydisk and rotation invariant per
    coordinate.  ``normalizer`` makes the total integral over C^d one;
    ``offsets``/``weights`` are the per-coordinate polar stencil
    (Gauss-Legendre radius x equiangular trapezoid) normalized so the
    weights of one coordinate sum to 1.
    """

    dim: int
    nodes: int
    radial_nodes: np.ndarray
    radial_weights: np.ndarray
    n_angles: int
    coord_mass: float
    normalizer: float
    offsets: np.ndarray  # complex (S,)
    weights: np.ndarray  # float (S,), sum 1

    support_radius: float = 1.0

    def profile(self, moduli) -> np.ndarray:
        m = np.asarray(moduli, dtype=float)
        return np.prod(_bump(m**2), axis=-1)

    def chi(self, moduli) -> np.ndarray:
        return self.normalizer * self.profile(moduli)


@lru_cache(maxsize=64)
def build_kernel(d: int, nodes_per_dim: int = 32) -> Kernel:
    """Kernel with certified normalization for dimension d.

    ``nodes_per_dim`` Gauss-Legendre radial nodes and twice as many
    angles per coordinate.
    """
    if nodes_per_dim < 8:
        raise ConfigError("kernel needs at least 8 nodes per dimension")
    r, w = _gauss01(nodes_per_dim)
    beta = _bump(r**2)
    n_ang = 2 * nodes_per_dim
    coord_mass = float(2.0 * math.pi * np.sum(w * r * beta))
    angles = 2.0 * math.pi * np.arange(n_ang) / n_ang
    offsets = (r[:, None] * np.exp(1j * angles)[None, :]).ravel()
    wt = (w * r * beta)[:, None] * np.full((1, n_ang), 2.0 * math.pi / n_ang)
    weights = wt.ravel() / coord_mass
    return Kernel(
        dim=d,
        nodes=nodes_per_dim,
        radial_nodes=r,
        radial_weights=w,
        n_angles=n_ang,
        coord_mass=coord_mass,
        normalizer=coord_mass ** (-d),
        offsets=offsets,
        weights=weights,
    )


@dataclass(frozen=True)
class ConvolveResult:
    """Convolution value with a node-doubling error estimate."""

    value: float
    error: float
    nodes: int

    def __float__(self) -> float:
        return self.value


def _convolve_once(f, kernel: Kernel, eps: float, z: np.ndarray) -> float:
    d = kernel.dim
    v, w = kernel.offsets, kernel.weights
    if d == 1:
        pts = (z[0] - eps * v)[:, None]
        vals = np.asarray(f(pts), dtype=float).reshape(-1)
        if not np.all(np.isfinite(vals)):
            raise NonFiniteSample("integrand not finite on the convolution stencil")
        return float(np.dot(vals, w))
    # evaluate the tensor stencil in chunks of the first coordinate to
    # keep memory flat even with doubled node counts
    rest = np.meshgrid(*([v] * (d - 1)), indexing="ij")
    rest_flat = np.stack([z[k + 1] - eps * g.ravel() for k, g in enumerate(rest)], axis=-1)
    w_rest = w
    for _ in range(d - 2):
        w_rest = np.multiply.outer(w_rest, w).ravel()
    r = rest_flat.shape[0]
    chunk = max(1, int(4_000_000 // max(r, 1)))
    acc = 0.0
    for i0 in range(0, v.size, chunk):
        blk = z[0] - eps * v[i0:i0 + chunk]
        pts = np.empty((blk.size, r, d), dtype=complex)
        pts[:, :, 0] = blk[:, None]
        pts[:, :, 1:] = rest_flat[None, :, :]
        vals = np.asarray(f(pts), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise NonFiniteSample("integrand not finite on the convolution stencil")
        acc += float(np.dot(w[i0:i0 + chunk], vals @ w_rest))
    return acc


def convolve(f, kernel: Kernel, eps: float, z) -> ConvolveResult:
    """Quadrature value of (f * chi_eps)(z) with doubled-node error estimate.

    ``f`` must be vectorized over point arrays of shape (..., d) and
    finite on the closed polydisk of radius eps around z.
    """
    if eps <= 0:
        raise ConfigError("eps must be positive")
    z = np.asarray(z, dtype=complex).reshape(-1)
    if z.shape[0] != kernel.dim:
        raise ConfigError("point dimension does not match kernel")
    coarse = _convolve_once(f, kernel, eps, z)
    fine_kernel = build_kernel(kernel.dim, 2 * kernel.nodes)
    fine = _convolve_once(f, fine_kernel, eps, z)
    return ConvolveResult(value=fine, error=abs(fine - coarse), nodes=fine_kernel.nodes)


# ---------------------------------------------------------------------------
# smoothing gap of the indicator, stable in log-moduli coordinates


def _coordinate_log_tables(logs: np.ndarray, eps: float, kernel: Kernel):
    """Per coordinate k, a split log|z_k - eps*v| = base_k + table_k.

    Evaluated stably for any log-modulus: when the center dwarfs the
    stencil the table is log|1 - (eps/|z_k|) v| around base logs[k],
    when the stencil dwarfs the center (or the coordinate vanishes) the
    base is 0 and the table carries log(eps |v - offset|) directly.
    """
    v = kernel.offsets
    log_eps = math.log(eps)
    bases = []
    tables = []
    for lk in logs:
        if lk == -math.inf:
            bases.append(0.0)
            tables.append(log_eps + np.log(np.abs(v)))
        elif lk - log_eps > 50.0:
            delta = eps * math.exp(-lk) if lk - log_eps < 700.0 else 0.0
            bases.append(float(lk))
            tables.append(np.log(np.abs(1.0 - delta * v)))
        elif lk - log_eps < -50.0:
            offset = math.exp(lk - log_eps) if lk - log_eps > -700.0 else 0.0
            bases.append(float(lk))
            tables.append(log_eps + np.log(np.abs(v - offset)) - lk)
        else:
            c = math.exp(lk)
            bases.append(float(lk))
            tables.append(np.log(np.maximum(np.abs(c - eps * v), 1e-300)) - lk)
    return np.array(bases), tables


def _smoothing_gap_log(body: ConvexBody, logs: np.ndarray, eps: float, kernel: Kernel) -> float:
    """(H_P * chi_eps)(z) - H_P(z) for z given by log-moduli, any magnitude.

    The integrand is evaluated with the dominant per-vertex constant
    subtracted, so the result is accurate even when the level values
    themselves are astronomically large.  Vanishing coordinates are
    allowed as long as the indicator itself stays finite there.
    """
    d = body.dim
    logs = np.asarray(logs, dtype=float)
    bases, tables = _coordinate_log_tables(logs, eps, kernel)
    verts = body.vertex_array
    consts = verts @ bases
    # the true indicator value: vertices supported on a vanishing
    # coordinate contribute -inf there and cannot attain the max
    dead = ~np.isfinite(logs)
    alive = ~np.any((verts > 0) & dead[None, :], axis=1)
    if not np.any(alive):
        raise NonFiniteSample("indicator is -inf at the scan point")
    center = float(np.max(consts[alive]))
    shifted = consts - center

    w = kernel.weights
    if d == 1:
        cand = shifted[:, None] + verts[:, 0][:, None] * tables[0][None, :]
        integrand = cand.max(axis=0)
        total_w = float(np.sum(w))
        return float(np.dot(integrand, w) + center * (total_w - 1.0))
    if d == 2:
        s1, s2 = tables[0].size, tables[1].size
        chunk = max(1, int(4_000_000 // max(s2, 1)))
        acc = 0.0
        for i0 in range(0, s1, chunk):
            t1 = tables[0][i0:i0 + chunk]
            best = np.full((t1.size, s2), -np.inf)
            for sv, vert in zip(shifted, verts):
                cand = sv + vert[0] * t1[:, None] + vert[1] * tables[1][None, :]
                np.maximum(best, cand, out=best)
            acc += float(w[i0:i0 + chunk] @ best @ w)
        total_w = float(np.sum(w)) ** 2
        return acc + center * (total_w - 1.0)
    raise ConfigError("smoothing gap evaluation supports d <= 2")


def a_delta_bound(body: ConvexBody, delta: float) -> float:
    """Analytic smoothing bound by vertex enumeration.

    The mixed-regime estimate gives sup over P of
    j_small*log(1 + 1/delta) + j_large*log(1 + delta); taking the worse
    coordinate orientation makes the number a bound for either regime.
    """
    if not 0 < delta:
        raise ConfigError("delta must be positive")
    big = math.log1p(1.0 / delta)
    small = math.log1p(delta)
    verts = body.vertex_array
    best = 0.0
    d = body.dim
    for mask in range(1 << d):
        coef = np.array([big if (mask >> k) & 1 else small for k in range(d)])
        best = max(best, float(np.max(verts @ coef)))
    return best


def convolution_gap_scan(
    body: ConvexBody, eps: float, region: GridSpec, nodes: int = 16
) -> GridField:
    """Field of (H_P * chi_eps) - H_P over a d=2 region of moduli.

    Metadata records the vertex-evaluated analytic bound for delta = eps
    alongside a node-doubling error estimate, so a scan is directly
    comparable against the lower-set theory.
    """
    if body.dim != 2:
        raise ConfigError("the smoothing scan is a d=2 diagnostic")
    pts = region.complex_points(2)
    moduli = np.abs(pts)
    kern = build_kernel(2, nodes)
    fine = build_kernel(2, 2 * nodes)
    vals = np.empty(pts.shape[0])
    errs = np.empty(pts.shape[0])
    with np.errstate(divide="ignore"):
        logm = np.log(moduli)
    for i in range(pts.shape[0]):
        coarse = _smoothing_gap_log(body, logm[i], eps, kern)
        val = _smoothing_gap_log(body, logm[i], eps, fine)
        vals[i] = val
        errs[i] = abs(val - coarse)
    meta = {
        "task": "convolution_gap_scan",
        "body": body_to_dict(body),
        "eps": eps,
        "kernel_nodes": fine.nodes,
        "a_delta_bound": a_delta_bound(body, eps),
        "max_quadrature_error": float(np.max(errs)),
    }
    return GridField.from_spec(region, vals.reshape(region.shape), meta)


@dataclass(frozen=True)
class CounterexampleReport:
    """One verified point where smoothing overshoots the indicator by > C.

    ``log_x`` and ``log_y`` are log-moduli of the constructed point (the
    second coordinate is astronomically large for large C, so only its
    logarithm is representable); ``gap`` is the quadrature value of the
    smoothing excess there and ``a_eps`` the kernel mass of the shifted
    half-annulus driving the construction.
    """

    eps: float
    c: float
    a_eps: float
    log_x: float
    log_y: float
    gap: float
    quadrature_error: float
    nodes: int

    def to_dict(self) -> dict:
        return {
            "eps": self.eps,
            "C": self.c,
            "a_eps": self.a_eps,
            "x_C_log_modulus": self.log_x,
            "y_C_log_modulus": self.log_y,
            "gap": self.gap,
            "quadrature_error": self.quadrature_error,
            "nodes": self.nodes,
        }


def _half_annulus_mass(nodes: int) -> float:
    """Kernel mass, per coordinate, of radii in [1/2, 1] (scale invariant)."""
    kern = build_kernel(1, nodes)
    r, w = _gauss01(nodes)
    rr = 0.5 + 0.5 * r
    inner = 2.0 * math.pi * np.sum(0.5 * w * rr * _bump(rr**2))
    return float(inner / kern.coord_mass)


def counterexample_point(
    eps: float, c: float, quad_nodes: int = 48, body: ConvexBody | None = None
) -> CounterexampleReport:
    """Construct and verify a point with smoothing gap above c.

    Follows the explicit recipe on the quadrilateral hull{(0,0),(1,0),
    (0,1),(1,2)}: pick |y| beyond max(4/eps, (2/eps) e^{2c/A_eps}) + eps
    and |x| below min(eps/4, 1/|y|), then evaluate the gap by polar
    quadrature in log-moduli coordinates.  The chain guarantees the gap
    is at least 2c.

    Raises
    ------
    ConfigError
        If a body other than the quadrilateral is supplied.
    QuadratureTooCoarse
        If the certified quadrature error exceeds gap - c.
    """
    quad = non_lower_quadrilateral()
    if body is None:
        body = quad
    if body != quad:
        raise ConfigError("the counterexample construction is specific to the quadrilateral")
    if not 0 < eps < 1:
        raise ConfigError("eps must lie in (0, 1)")
    if c <= 0:
        raise ConfigError("C must be positive")

    a_eps = _half_annulus_mass(quad_nodes)
    base = max(math.log(4.0 / eps), math.log(2.0 / eps) + 2.0 * c / a_eps)
    log_y = base + math.log1p(eps * math.exp(-base)) + 1e-6
    log_x = min(math.log(eps / 4.0), -log_y) - math.log(2.0)

    logs = np.array([log_x, log_y])
    kern = build_kernel(2, quad_nodes)
    fine = build_kernel(2, 2 * quad_nodes)
    coarse_gap = _smoothing_gap_log(body, logs, eps, kern)
    gap = _smoothing_gap_log(body, logs, eps, fine)
    err = abs(gap - coarse_gap) + 1e-12
    if err >= gap - c:
        raise QuadratureTooCoarse(
            f"certified error {err:.3e} exceeds margin gap - C = {gap - c:.3e}"
        )
    return CounterexampleReport(
        eps=eps,
        c=c,
        a_eps=a_eps,
        log_x=log_x,
        log_y=log_y,
        gap=gap,
        quadrature_error=err,
        nodes=fine.nodes,
    )


# ---------------------------------------------------------------------------
# grid inf-convolution engine


def _lattice(dim_real: int, per_dim: int) -> np.ndarray:
    axes = [np.linspace(-1.0, 1.0, per_dim)] * dim_real
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in mesh], axis=-1)


def _as_points(centers: np.ndarray, offs: np.ndarray, scale: np.ndarray, radial: bool):
    """Candidate points centers + scale * offs, shape (B, L, d)."""
    if radial:
        pts = centers[:, None, :] + scale[:, None, None] * offs[None, :, :]
        return np.maximum(pts, 0.0)
    cplx = offs[:, 0::2] + 1j * offs[:, 1::2]
    return centers[:, None, :] + scale[:, None, None] * cplx[None, :, :]


def _zoom_inf(objective, lam: float, centers: np.ndarray, radius: np.ndarray,
              grid: int = 9, rounds: int = 12, radial: bool = False):
    """Batched minimization of objective(y) + lam * |y - centers| on balls.

    ``radial=True`` searches moduli space (real nonnegative coordinates)
    instead of C^d; the cone distance is Euclidean either way.  Returns
    (values, minimizers, error estimates); values are always achieved,
    hence true upper bounds of the infima.
    """
    centers = np.asarray(centers)
    b, d = centers.shape
    dim_real = d if radial else 2 * d
    radius = np.asarray(radius, dtype=float)

    def cost(pts):
        vals = np.asarray(objective(pts), dtype=float)
        if np.any(np.isnan(vals)):
            raise NonFiniteSample("objective returned NaN during minimization")
        dist = np.linalg.norm(
            np.abs(pts - centers[:, None, :]) if not radial else pts - centers[:, None, :],
            axis=-1,
        )
        total = vals + lam * dist
        total = np.where(dist <= radius[:, None] * (1.0 + 1e-9), total, np.inf)
        return total, dist

    best_val = np.asarray(objective(centers[:, None, :]), dtype=float).reshape(b)
    if np.any(np.isnan(best_val)):
        raise NonFiniteSample("objective returned NaN at a center")
    best_pt = centers.astype(centers.dtype).copy()

    for per_dim in (3, grid):
        offs = _lattice(dim_real, per_dim)
        pts = _as_points(centers, offs, radius, radial)
        total, _ = cost(pts)
        idx = np.argmin(total, axis=1)
        better = total[np.arange(b), idx] < best_val
        best_val = np.where(better, total[np.arange(b), idx], best_val)
        best_pt[better] = pts[better, idx[better]]

    shrink = 2.0 / (grid - 1)
    h = radius * shrink
    offs = _lattice(dim_real, grid)
    spread = np.zeros(b)
    for _ in range(rounds):
        pts = _as_points(best_pt, offs, h, radial)
        total, _ = cost(pts)
        idx = np.argmin(total, axis=1)
        cur = total[np.arange(b), idx]
        better = cur < best_val
        best_val = np.where(better, cur, best_val)
        best_pt[better] = pts[better, idx[better]]
        finite = np.where(np.isfinite(total), total, np.nan)
        with np.errstate(invalid="ignore"):
            spread = np.nanmax(finite, axis=1) - best_val
        h = h * shrink
    h_last = h / shrink
    diam = 2.0 * h_last * math.sqrt(dim_real)
    slope = np.where(diam > 0, np.nan_to_num(spread) / np.maximum(diam, 1e-300), 0.0)
    err = (lam + slope) * 0.5 * h * math.sqrt(dim_real)
    return best_val, best_pt, err


@dataclass(frozen=True)
class FerrierResult:
    """One inf-convolution evaluation.

    ``u_t_value = -log(delta)`` where delta is the achieved minimum of
    e^{-u(y)} + |y-x|/t; the search was confined to the ball in which
    any candidate can still beat y = x.
    """

    x: tuple[complex, ...]
    t: float
    u_t_value: float
    delta: float
    minimizer: tuple[complex, ...]
    search_radius: float
    grid_error: float


def ferrier(u, t: float, x, grid: int = 9, rounds: int = 12, radial: bool = False) -> FerrierResult:
    """Evaluate u_t(x) = -log inf_y [e^{-u(y)} + |y - x|/t].

    ``u`` must be vectorized over (..., d) arrays; with ``radial=True``
    it is read as a function of moduli and the search runs in moduli
    space, which is exact for rotation-invariant u.
    """
    if t <= 0:
        raise ConfigError("t must be positive")
    x = np.asarray(x, dtype=complex).reshape(1, -1)
    lam = 1.0 / t

    if radial:
        centers = np.abs(x).astype(float)

        def objective(pts):
            with np.errstate(over="ignore", under="ignore"):
                return np.exp(-np.asarray(u(pts), dtype=float))

    else:
        centers = x

        def objective(pts):
            with np.errstate(over="ignore", under="ignore"):
                return np.exp(-np.asarray(u(pts), dtype=float))

    delta_x = float(objective(centers[:, None, :]).reshape(-1)[0])
    radius = np.array([t * delta_x * (1.0 + 1e-9)])
    if not math.isfinite(delta_x) or delta_x == 0.0:
        val = math.inf if delta_x == 0.0 else -math.inf
        return FerrierResult(
            tuple(x.ravel()), t, val, delta_x, tuple(x.ravel()), 0.0, 0.0
        )
    vals, pts, errs = _zoom_inf(objective, lam, centers, radius, grid, rounds, radial)
    delta = float(min(vals[0], delta_x))
    y = pts[0]
    if radial:
        phases = np.where(np.abs(x.ravel()) > 0, x.ravel() / np.abs(x.ravel()), 1.0)
        y = phases * y
    u_t = -math.log(delta) if delta > 0 else math.inf
    err_u = float(errs[0] / delta) if delta > 0 else math.inf
    return FerrierResult(
        x=tuple(x.ravel()),
        t=t,
        u_t_value=u_t,
        delta=delta,
        minimizer=tuple(np.asarray(y, dtype=complex)),
        search_radius=float(radius[0]),
        grid_error=err_u,
    )


@dataclass(frozen=True)
class FerrierContractReport:
    """Shared-pool evaluation of u_t over samples and its checked clauses.

    All values are minima over one common candidate pool, which makes
    clause (i) exact under floating-point rounding and clause (ii) exact
    up to arithmetic noise, independent of search quality.
    """

    t_list: tuple[float, ...]
    u_values: np.ndarray          # (M,)
    ut_table: np.ndarray          # (T, M)
    delta_table: np.ndarray       # (T, M)
    lipschitz_margin: float
    shell_edges: tuple[float, ...] | None
    shell_max_gap: np.ndarray | None  # (T, shells)
    pool_size: int


def ferrier_contracts(
    u,
    t_list,
    sample,
    body: ConvexBody | None = None,
    c: float | None = None,
    shell_edges=None,
    radial: bool = False,
    grid: int = 9,
    rounds: int = 12,
    lipschitz_tol: float = 1e-12,
    growth_tol: float = 1.0,
) -> FerrierContractReport:
    """Check the inf-convolution guarantees on a point sample.

    Clauses: (i) u_t decreases as t decreases, exactly; (ii) the
    function e^{-u_t} is (1/t)-Lipschitz on sample pairs within
    ``lipschitz_tol``; (iii) with ``c`` and ``body`` given, u_t stays
    above c + h_P; (iv) with ``body`` given, the excess u_t - h_P must
    not grow along expanding modulus shells by more than ``growth_tol``.

    Raises ContractViolation naming the failed clause.
    """
    ts = [float(t) for t in t_list]
    if any(b >= a for a, b in zip(ts, ts[1:])):
        raise ValueError("t_list must be strictly decreasing")
    pts = np.atleast_2d(np.asarray(sample, dtype=complex))
    m, d = pts.shape

    def objective(arr):
        with np.errstate(over="ignore", under="ignore"):
            return np.exp(-np.asarray(u(arr), dtype=float))

    # candidate pool: the samples themselves plus refined minimizers per (x, t)
    pool = [pts]
    centers = np.abs(pts).astype(float) if radial else pts
    g_cent = objective(centers[:, None, :]).reshape(m)
    if np.any(np.isnan(g_cent)):
        raise NonFiniteSample("u returned NaN on the sample")
    for t in ts:
        radius = t * g_cent * (1.0 + 1e-9)
        _, mins, _ = _zoom_inf(objective, 1.0 / t, centers, radius, grid, rounds, radial)
        if radial:
            phases = np.where(np.abs(pts) > 0, pts / np.abs(pts), 1.0)
            pool.append(phases * mins)
        else:
            pool.append(mins.astype(complex))
    pool_pts = np.concatenate(pool, axis=0)
    g_pool = objective(np.abs(pool_pts) if radial else pool_pts)
    g_pool = np.asarray(g_pool, dtype=float).reshape(-1)

    dist = np.linalg.norm(np.abs(pts[:, None, :] - pool_pts[None, :, :]), axis=-1)
    delta_table = np.empty((len(ts), m))
    for i, t in enumerate(ts):
        delta_table[i] = np.min(g_pool[None, :] + dist / t, axis=1)
    with np.errstate(divide="ignore"):
        ut_table = -np.log(delta_table)
        u_vals = -np.log(g_cent)

    # clause (i): smaller t means larger delta, exactly
    for i in range(len(ts) - 1):
        bad = delta_table[i + 1] < delta_table[i]
        if np.any(bad):
            j = int(np.argmax(bad))
            raise ContractViolation(
                "(i) monotone",
                f"u_t increased from t={ts[i]} to t={ts[i + 1]} at sample {j}",
            )

    # clause (ii): 1/t Lipschitz of delta on sample pairs
    pair_dist = np.linalg.norm(np.abs(pts[:, None, :] - pts[None, :, :]), axis=-1)
    worst = -math.inf
    for i, t in enumerate(ts):
        diff = np.abs(delta_table[i][:, None] - delta_table[i][None, :])
        margin = float(np.max(diff - pair_dist / t))
        worst = max(worst, margin)
        if margin > lipschitz_tol:
            raise ContractViolation(
                "(ii) lipschitz", f"margin {margin:.3e} at t={t}"
            )

    # dominance u_t >= u is structural (x sits in the pool); verify anyway
    if np.any(delta_table > g_cent[None, :]):
        raise ContractViolation("(dominance)", "delta exceeded e^{-u} at a sample")

    shell_max = None
    edges = None
    hp_vals = None
    if body is not None:
        with np.errstate(divide="ignore"):
            hp_vals = h_p_on_logs(body, np.log(np.abs(pts)))
    if c is not None:
        if hp_vals is None:
            raise ConfigError("clause (iii) needs the body")
        floor = c + hp_vals
        viol = float(np.max(floor[None, :] - ut_table))
        if viol > 1e-9 * max(1.0, float(np.max(np.abs(floor)))):
            raise ContractViolation("(iii) lower class", f"u_t below c + h_P by {viol:.3e}")
    if body is not None:
        radii = np.linalg.norm(np.abs(pts), axis=-1)
        if shell_edges is None:
            lo, hi = float(radii.min()), float(radii.max()) * (1 + 1e-9)
            edges = tuple(np.geomspace(max(lo, 1e-9), hi, 5).tolist())
        else:
            edges = tuple(float(e) for e in shell_edges)
        gap = ut_table - hp_vals[None, :]
        shell_max = np.full((len(ts), len(edges) - 1), -np.inf)
        which = np.searchsorted(np.asarray(edges), radii, side="right") - 1
        which = np.clip(which, 0, len(edges) - 2)
        for s in range(len(edges) - 1):
            mask = which == s
            if np.any(mask):
                shell_max[:, s] = gap[:, mask].max(axis=1)
        for i, t in enumerate(ts):
            row = shell_max[i][np.isfinite(shell_max[i])]
            if row.size >= 2 and row[-1] > row[0] + growth_tol:
                raise ContractViolation(
                    "(iv) bounded",
                    f"excess grows across shells at t={t}: {row.tolist()}",
                )

    return FerrierContractReport(
        t_list=tuple(ts),
        u_values=np.asarray(u_vals),
        ut_table=ut_table,
        delta_table=delta_table,
        lipschitz_margin=worst,
        shell_edges=edges,
        shell_max_gap=shell_max,
        pool_size=pool_pts.shape[0],
    )


# ---------------------------------------------------------------------------
# appendix distance identity


@dataclass(frozen=True)
class HatDeltaResult:
    """Grid-certified inf-convolution of a nonnegative function with a cone."""

    value: float
    minimizer: tuple[complex, ...]
    search_radius: float
    grid_error: float

    def __float__(self) -> float:
        return self.value


def hat_delta(delta, lam: float, s, grid: int = 9, rounds: int = 12) -> HatDeltaResult:
    """inf over s' of delta(s') + lam |s' - s|, searched on |s'-s| <= delta(s)/lam."""
    if lam <= 0:
        raise ConfigError("lam must be positive")
    s = np.asarray(s, dtype=complex).reshape(1, -1)

    def objective(pts):
        return np.asarray(delta(pts), dtype=float)

    d0 = float(objective(s[:, None, :]).reshape(-1)[0])
    if not math.isfinite(d0):
        raise NonFiniteSample("delta not finite at the center")
    radius = np.array([d0 / lam * (1.0 + 1e-9)])
    if d0 == 0.0:
        return HatDeltaResult(0.0, tuple(s.ravel()), 0.0, 0.0)
    vals, pts, errs = _zoom_inf(objective, lam, s, radius, grid, rounds, radial=False)
    val = float(min(vals[0], d0))
    return HatDeltaResult(
        value=val,
        minimizer=tuple(np.asarray(pts[0], dtype=complex)),
        search_radius=float(radius[0]),
        grid_error=float(errs[0]),
    )


@dataclass(frozen=True)
class DistanceIdentityReport:
    """Two-route evaluation of the cone inf-convolution on a sample.

    ``lhs`` minimizes delta(s') + lam|s'-s| directly; ``rhs`` minimizes
    lam|s-s'| + rho over pairs with rho >= delta(s') quantized upward,
    the distance-to-complement formulation.  ``combined_tol`` sums both
    grid error estimates and the rho quantization step.
    """

    lam: float
    lhs: np.ndarray
    rhs: np.ndarray
    combined_tol: np.ndarray
    worst_diff: float
    ok: bool


def distance_identity_check(
    delta,
    lam: float,
    sample,
    grid: int = 9,
    rounds: int = 12,
    rho_step: float = 1e-6,
) -> DistanceIdentityReport:
    """Check the identity between the two formulations on sample points.

    Raises ToleranceExceeded with the worst point if the routes disagree
    beyond the combined grid tolerance.
    """
    pts = np.atleast_2d(np.asarray(sample, dtype=complex))
    m = pts.shape[0]
    lhs = np.empty(m)
    rhs = np.empty(m)
    tol = np.empty(m)
    worst = (-1.0, None)
    for i in range(m):
        left = hat_delta(delta, lam, pts[i], grid=grid, rounds=rounds)

        step = rho_step * max(1.0, left.value)

        def complement_cost(arr):
            vals = np.asarray(delta(arr), dtype=float)
            return np.ceil(vals / step) * step

        d0 = float(np.asarray(delta(pts[i][None, None, :])).reshape(-1)[0])
        radius = np.array([d0 / lam * (1.0 + 1e-9)])
        vals, _, errs = _zoom_inf(
            complement_cost, lam, pts[i][None, :], radius, grid, rounds, radial=False
        )
        right = float(min(vals[0], np.ceil(d0 / step) * step))
        lhs[i] = left.value
        rhs[i] = right
        tol[i] = left.grid_error + float(errs[0]) + step
        diff = abs(left.value - right)
        if diff - tol[i] > worst[0]:
            worst = (diff - tol[i], i)
    diffs = np.abs(lhs - rhs)
    ok = bool(np.all(diffs <= tol))
    if not ok:
        i = worst[1]
        raise ToleranceExceeded(
            f"identity mismatch {diffs[i]:.3e} > tol {tol[i]:.3e} at sample {i}"
        )
    return DistanceIdentityReport(
        lam=lam,
        lhs=lhs,
        rhs=rhs,
        combined_tol=tol,
        worst_diff=float(np.max(diffs)),
        ok=ok,
    )


# ---------------------------------------------------------------------------
# plurisubharmonicity probe


@dataclass(frozen=True)
class SubmeanCheck:
    lhs: float
    rhs: float
    tol: float
    ok: bool


def submean_check(u, z0, direction, r: float, nodes: int = 256, extra_tol: float = 0.0) -> SubmeanCheck:
    """Sub-mean-value probe of u along one complex line.

    Compares u(z0) against the trapezoidal circle average of
    u(z0 + r e^{i theta} dir); the tolerance combines a node-doubling
    estimate with the caller's extra budget for noisy u.
    """
    if r <= 0:
        raise ConfigError("radius must be positive")
    z0 = np.asarray(z0, dtype=complex).reshape(-1)
    direction = np.asarray(direction, dtype=complex).reshape(-1)
    if z0.shape != direction.shape or not np.any(direction != 0):
        raise ConfigError("direction must be a nonzero vector matching z0")

    def mean(nn: int) -> float:
        th = 2.0 * np.pi * np.arange(nn) / nn
        circle = z0[None, :] + r * np.exp(1j * th)[:, None] * direction[None, :]
        vals = np.asarray(u(circle), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise NonFiniteSample("u not finite on the probe circle")
        return float(np.mean(vals))

    m1 = mean(nodes)
    m2 = mean(2 * nodes)
    lhs = float(np.asarray(u(z0[None, :]), dtype=float).reshape(-1)[0])
    tol = 4.0 * abs(m2 - m1) + 1e-9 * max(1.0, abs(m2)) + extra_tol
    return SubmeanCheck(lhs=lhs, rhs=m2, tol=tol, ok=lhs <= m2 + tol)


def usable_t_estimate(body: ConvexBody, c_floor: float, probes, n_dirs: int = 120) -> float:
    """Largest t validated by the level-set separation bound on probes.

    For the Lipschitz floor constant ``c_floor`` in (0,1), the
    inf-convolution stays in the growth class whenever
    t <= dist(L_x, L_{1/c,x}) e^{h_P(x)} / c over the relevant x; the
    sampled minimum of that expression is returned (resolution already
    subtracted).
    """
    from .indicator import LogPoint, level_set_distance

    if not 0 < c_floor < 1:
        raise ConfigError("c_floor must lie in (0, 1)")
    best = math.inf
    for p in probes:
        x = p if isinstance(p, LogPoint) else LogPoint.from_point(p)
        est = level_set_distance(body, x, c_floor, search=n_dirs)
        h = est.level
        usable = max(est.estimate - est.resolution, 0.0) * math.exp(h) / c_floor
        best = min(best, usable)
    return best
