"""Weighted polynomial extremal problem over sampled compact sets.

For a body P, a sampled weighted set (zeta_i, q_i), and a degree n, the
central quantity is

    phi_n(z0) = sup { |p(z0)| : supp(p) in nP,  |p(zeta_i)| <= e^{n q_i} },

whose normalized logarithm (1/n) log phi_n estimates the weighted
extremal function.  The sup is a second-order cone program: by phase
invariance it equals max Re p(z0) over the same constraints.  The
implementation certifies both sides of the optimum independently of the
conic solver's own stopping test:

* a primal witness polynomial, rescaled by its actually evaluated
  constraint norm, gives an attainable lower bound;
* dual multipliers, corrected to satisfy the stationarity equation
  exactly in the orthonormalized constraint basis, give an upper bound.

The gap between the two is reported and must pass the caller's
tolerance, otherwise the run fails loudly rather than returning an
uncertified number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

import clarabel

from .convex_body import ConvexBody, MultiIndex, body_to_dict, contains, deg_p, lattice_points
from .errors import NotMonotone, SolverStall, Unbounded
from .grids import GridField, GridSpec
from .indicator import h_p_on_logs
from .sets import SampledWeightedSet

_RANK_RTOL = 1e-12


@dataclass(frozen=True)
class PolyCoeffs:
    """Polynomial with exponent support in a dilate of a body.

    ``support`` and ``coeffs`` are aligned; ``n`` is a dilation order
    whose lattice is known to contain the support (not necessarily the
    smallest one).
    """

    support: tuple[MultiIndex, ...]
    coeffs: tuple[complex, ...]
    n: int

    @property
    def coeff_array(self) -> np.ndarray:
        return np.asarray(self.coeffs, dtype=complex)

    @property
    def exponent_array(self) -> np.ndarray:
        return np.asarray(self.support, dtype=float)


def make_poly(body: ConvexBody, terms: Mapping[MultiIndex, complex], n: int | None = None) -> PolyCoeffs:
    """Validated constructor: drops zero terms, checks membership in nP.

    With ``n=None`` the smallest admissible dilation order is computed
    (which rejects constants; pass n explicitly for them).
    """
    cleaned = {tuple(int(c) for c in j): complex(v) for j, v in terms.items() if v != 0}
    if not cleaned:
        raise ValueError("zero polynomial has no representation")
    support = tuple(sorted(cleaned))
    if n is None:
        n = deg_p(support, body)
    for j in support:
        if not contains(body, j, scale=n):
            raise ValueError(f"exponent {j} outside {n} * body")
    return PolyCoeffs(support=support, coeffs=tuple(cleaned[j] for j in support), n=int(n))


def eval_poly(poly: PolyCoeffs, z) -> complex | np.ndarray:
    """Evaluate at points of shape (d,) or (..., d); exponent 0^0 is 1."""
    zarr = np.asarray(z, dtype=complex)
    single = zarr.ndim == 1
    pts = zarr[None, :] if single else zarr
    mono = np.prod(pts[..., None, :] ** poly.exponent_array, axis=-1)
    vals = mono @ poly.coeff_array
    return complex(vals[0]) if single else vals


def weighted_sup_norm(poly: PolyCoeffs, sample: SampledWeightedSet, n: int) -> float:
    """max_i |p(zeta_i)| e^{-n q_i} over the sample; +inf weights drop out."""
    if n < poly.n:
        raise ValueError(f"polynomial carries order {poly.n}, norm requested at {n}")
    vals = np.abs(eval_poly(poly, sample.points))
    damp = np.exp(-n * sample.q_values)
    scaled = np.where(damp == 0.0, 0.0, vals * damp)
    return float(np.max(scaled))


@dataclass(frozen=True)
class ExtremalEstimate:
    """Certified one-point solution of the sampled extremal problem.

    ``phi_value`` is attained by ``witness`` (audited against the actual
    sample constraints), ``upper_bound`` is a dual certificate, and
    ``solver_gap = upper_bound - phi_value`` bounds the uncertainty.
    """

    z0: tuple[complex, ...]
    n: int
    phi_value: float
    v_estimate: float
    witness: PolyCoeffs | None
    solver_gap: float
    upper_bound: float


class ExtremalSolver:
    """Reusable conic solver for a fixed (body, sample, n) triple.

    Building the solver factors the constraint matrix once; each call to
    :meth:`estimate` only swaps the linear objective, so sweeping a grid
    of evaluation points reuses the symbolic factorization.

    Conditioning: monomials are evaluated in coordinates scaled by the
    per-coordinate sample radii, and each constraint row is divided by
    its weight bound, after which the matrix is replaced by its singular
    value decomposition; the optimization runs in the orthonormal image
    coordinates where constraint violations are measured exactly.
    """

    def __init__(
        self,
        body: ConvexBody,
        sample: SampledWeightedSet,
        n: int,
        tol: float = 1e-8,
        max_iter: int = 200,
    ):
        if sample.dim != body.dim:
            raise ValueError("sample dimension does not match body")
        if n < 1:
            raise ValueError("degree order n must be >= 1")
        self.body = body
        self.sample = sample
        self.n = int(n)
        self.tol = float(tol)
        self.max_iter = int(max_iter)
        basis = lattice_points(body, n)
        if not basis:
            raise ValueError(f"{n} * body contains no lattice exponents")
        self.basis = basis
        self._expo = np.asarray(basis, dtype=float)

        finite = np.isfinite(sample.q_values)
        pts = sample.points[finite]
        q = sample.q_values[finite]
        rho = np.max(np.abs(pts), axis=0)
        rho[rho == 0.0] = 1.0
        self.rho = rho

        mono = np.prod((pts / rho)[:, None, :] ** self._expo[None, :, :], axis=-1)
        with np.errstate(over="ignore"):
            damp = np.exp(-self.n * q)
        a_mat = mono * damp[:, None]
        u_full, s_full, vh_full = np.linalg.svd(a_mat, full_matrices=False)
        cutoff = s_full[0] * max(a_mat.shape) * np.finfo(float).eps if s_full.size else 0.0
        r = int(np.sum(s_full > cutoff))
        self.rank = r
        self.u_mat = u_full[:, :r]
        self.sigma = s_full[:r]
        self.v_mat = vh_full[:r].conj().T

        self._solver = self._build(tight=False) if r else None
        self._solver_tight = None

    # -- conic problem assembly ------------------------------------------

    def _build(self, tight: bool):
        r = self.rank
        m = self.u_mat.shape[0]
        nv = 2 * r
        g = np.zeros((3 * m, nv))
        g[1::3, :r] = -self.u_mat.real
        g[1::3, r:] = self.u_mat.imag
        g[2::3, :r] = -self.u_mat.imag
        g[2::3, r:] = -self.u_mat.real
        b = np.zeros(3 * m)
        b[0::3] = 1.0
        cones = [clarabel.SecondOrderConeT(3)] * m
        settings = clarabel.DefaultSettings()
        settings.verbose = False
        settings.presolve_enable = False
        settings.equilibrate_enable = False
        settings.max_iter = self.max_iter
        if tight:
            settings.tol_gap_abs = 1e-12
            settings.tol_gap_rel = 1e-12
            settings.tol_feas = 1e-12
        return clarabel.DefaultSolver(
            sp.csc_matrix((nv, nv)),
            np.zeros(nv),
            sp.csc_matrix(g),
            b,
            cones,
            settings,
        )

    def _phi0(self, z0: np.ndarray) -> np.ndarray:
        scaled = z0 / self.rho
        phi = np.prod(scaled[None, :] ** self._expo, axis=-1)
        if not np.all(np.isfinite(phi)):
            raise ValueError("monomial evaluation overflowed at this point")
        return phi

    def _run(self, q_vec: np.ndarray, tight: bool):
        if not tight:
            solver = self._solver
            solver.update(q=q_vec)
        else:
            if self._solver_tight is None:
                self._solver_tight = self._build(tight=True)
            solver = self._solver_tight
            solver.update(q=q_vec)
        sol = solver.solve()
        status = str(sol.status)
        if status not in ("Solved", "AlmostSolved"):
            return None
        return np.asarray(sol.x), np.asarray(sol.z)

    # -- certificates ----------------------------------------------------

    def _certify(self, g_vec: np.ndarray, x: np.ndarray, z: np.ndarray):
        """Primal and dual bounds from a solver iterate.

        The feasible point is obtained by shrinking the iterate onto the
        unit-disk constraints; the dual bound corrects the multipliers so
        the stationarity equation holds exactly, which costs only the
        correction's magnitude because the constraint basis U has
        orthonormal columns (U^T conj(U) = I).
        """
        r = self.rank
        gn = float(np.linalg.norm(np.concatenate([g_vec.real, g_vec.imag])))
        u = x[:r] + 1j * x[r:]
        img = self.u_mat @ u
        u_feas = u / max(1.0, float(np.max(np.abs(img))))
        lower = abs(np.dot(g_vec, u_feas))
        nu = -(z[1::3] + 1j * z[2::3]).conj()
        target = g_vec / gn
        resid = target - self.u_mat.T @ nu
        nu_fixed = nu + self.u_mat.conj() @ resid
        upper = gn * float(np.sum(np.abs(nu_fixed)))
        return u_feas, lower, max(upper, lower)

    def estimate(self, z0) -> ExtremalEstimate:
        """Solve the extremal problem at one evaluation point.

        Raises
        ------
        Unbounded
            If the evaluation functional has a component outside the row
            space of the constraints (some feasible direction grows the
            objective without bound).
        SolverStall
            If even the tightened solve leaves a certified gap above
            ``tol * max(1, upper_bound)``.
        """
        z0 = np.asarray(z0, dtype=complex).reshape(-1)
        if z0.shape[0] != self.body.dim:
            raise ValueError("evaluation point dimension mismatch")
        phi0 = self._phi0(z0)
        norm0 = float(np.linalg.norm(phi0))
        if norm0 == 0.0:
            return ExtremalEstimate(tuple(z0), self.n, 0.0, -math.inf, None, 0.0, 0.0)
        if self.rank < len(self.basis):
            w = phi0.conj()
            resid = w - self.v_mat @ (self.v_mat.conj().T @ w)
            if np.linalg.norm(resid) > 1e-10 * norm0 or self.rank == 0:
                raise Unbounded(
                    "sampled constraints leave the evaluation functional unconstrained"
                )
        g_vec = (self.v_mat.T @ phi0) / self.sigma
        gn = float(np.linalg.norm(np.concatenate([g_vec.real, g_vec.imag])))
        if gn == 0.0:
            return ExtremalEstimate(tuple(z0), self.n, 0.0, -math.inf, None, 0.0, 0.0)
        q_vec = -np.concatenate([g_vec.real, -g_vec.imag]) / gn

        best = None
        for tight in (False, True):
            out = self._run(q_vec, tight)
            if out is None:
                continue
            u_feas, lower, upper = self._certify(g_vec, *out)
            if best is None or upper - lower < best[2] - best[1]:
                best = (u_feas, lower, upper)
            if upper - lower <= self.tol * max(1.0, upper):
                break
        if best is None:
            raise SolverStall("conic solver failed to return an iterate")
        u_feas, lower, upper = best

        coeff_scaled = self.v_mat @ (u_feas / self.sigma)
        coeff = coeff_scaled / np.prod(self.rho[None, :] ** self._expo, axis=-1)
        witness = PolyCoeffs(support=self.basis, coeffs=tuple(coeff.tolist()), n=self.n)
        audit = weighted_sup_norm(witness, self.sample, self.n)
        if audit > 1.0:
            coeff = coeff / audit
            witness = PolyCoeffs(support=self.basis, coeffs=tuple(coeff.tolist()), n=self.n)
        phi_value = abs(eval_poly(witness, z0))
        upper = max(upper, phi_value)
        gap = upper - phi_value
        if gap > self.tol * max(1.0, upper):
            raise SolverStall(
                f"certified gap {gap:.3e} above tolerance at point {z0.tolist()}"
            )
        v_est = math.log(phi_value) / self.n if phi_value > 0 else -math.inf
        return ExtremalEstimate(
            z0=tuple(z0),
            n=self.n,
            phi_value=phi_value,
            v_estimate=v_est,
            witness=witness,
            solver_gap=gap,
            upper_bound=upper,
        )


def phi_n(
    body: ConvexBody,
    sample: SampledWeightedSet,
    n: int,
    z0,
    tol: float = 1e-8,
    max_iter: int = 200,
) -> ExtremalEstimate:
    """One-shot wrapper around :class:`ExtremalSolver` for a single point."""
    return ExtremalSolver(body, sample, n, tol=tol, max_iter=max_iter).estimate(z0)


def v_estimate_grid(
    body: ConvexBody,
    sample: SampledWeightedSet,
    n: int,
    grid: GridSpec,
    tol: float = 1e-8,
) -> GridField:
    """Normalized log-extremal values (1/n) log phi_n over a grid.

    Returns a :class:`GridField` whose metadata records the problem
    setup and the worst certified solver gap encountered.
    """
    solver = ExtremalSolver(body, sample, n, tol=tol)
    pts = grid.complex_points(body.dim)
    values = np.empty(pts.shape[0])
    worst_gap = 0.0
    for i, p in enumerate(pts):
        est = solver.estimate(p)
        values[i] = est.v_estimate
        rel = est.solver_gap / max(1.0, est.upper_bound)
        worst_gap = max(worst_gap, rel)
    meta = {
        "task": "v_estimate_grid",
        "body": body_to_dict(body),
        "n": n,
        "tol": tol,
        "sample": {"label": sample.label, "mesh": sample.mesh, "size": sample.size},
        "backend": "clarabel",
        "max_relative_solver_gap": worst_gap,
    }
    return GridField.from_spec(grid, values.reshape(grid.shape), meta)


@dataclass(frozen=True)
class SubmultEntry:
    z0: tuple[complex, ...]
    log_lower_n: float
    log_lower_m: float
    log_upper_nm: float
    log_excess: float


@dataclass(frozen=True)
class SubmultReport:
    """Submultiplicativity audit phi_n * phi_m <= phi_{n+m}.

    ``log_excess`` per entry is log(L_n) + log(L_m) - log(U_{n+m}) using
    the certified lower bounds for the factors and the certified upper
    bound for the sum degree, so a positive value beyond the slack is a
    genuine violation, not solver noise.
    """

    n: int
    m: int
    entries: tuple[SubmultEntry, ...]
    worst_excess: float
    ok: bool


def check_submultiplicative(
    body: ConvexBody,
    sample: SampledWeightedSet,
    n: int,
    m: int,
    z_list: Iterable[Sequence[complex]],
    tol: float = 1e-8,
    slack: float = 1e-6,
) -> SubmultReport:
    """Check the degree-additivity inequality on a list of points."""
    solvers: dict[int, ExtremalSolver] = {}
    for k in {n, m, n + m}:
        solvers[k] = ExtremalSolver(body, sample, k, tol=tol)
    entries = []
    worst = -math.inf
    for z in z_list:
        en = solvers[n].estimate(z)
        em = solvers[m].estimate(z)
        enm = solvers[n + m].estimate(z)
        ln = math.log(en.phi_value) if en.phi_value > 0 else -math.inf
        lm = math.log(em.phi_value) if em.phi_value > 0 else -math.inf
        lu = math.log(enm.upper_bound) if enm.upper_bound > 0 else -math.inf
        excess = ln + lm - lu
        if math.isnan(excess):
            excess = -math.inf
        worst = max(worst, excess)
        entries.append(SubmultEntry(tuple(np.atleast_1d(np.asarray(z, dtype=complex))), ln, lm, lu, excess))
    ok = worst <= math.log1p(slack)
    return SubmultReport(n=n, m=m, entries=tuple(entries), worst_excess=worst, ok=ok)


@dataclass(frozen=True)
class MonotoneWeightReport:
    """Extremal estimates under a nondecreasing family of weights."""

    v_table: np.ndarray  # (levels, points)
    v_limit: np.ndarray  # (points,) from the target weight
    nondecreasing_ok: bool
    limit_gap: float


def monotone_weight_limit(
    body: ConvexBody,
    sample: SampledWeightedSet,
    q_levels: Sequence[np.ndarray],
    n: int,
    z_list: Sequence[Sequence[complex]],
    tol: float = 1e-8,
) -> MonotoneWeightReport:
    """Estimates for weights increasing to the sample's own weight.

    ``q_levels`` are weight vectors on the sample's points, componentwise
    nondecreasing and bounded by ``sample.q_values`` (the limit weight).
    Raises NotMonotone if the ordering fails.  Looser weights admit more
    polynomials, so the estimates must not decrease within solver
    accuracy, and the last level should agree with the direct solve at
    the limit weight to the extent it has converged.
    """
    levels = [np.asarray(q, dtype=float) for q in q_levels]
    for a, b in zip(levels, levels[1:] + [sample.q_values]):
        if np.any(b < a):
            raise NotMonotone("weight levels are not componentwise nondecreasing")
    table = np.empty((len(levels), len(z_list)))
    for li, q in enumerate(levels):
        s = SampledWeightedSet(sample.points, q, sample.mesh, sample.label + f"|level{li}")
        solver = ExtremalSolver(body, s, n, tol=tol)
        for zi, z in enumerate(z_list):
            table[li, zi] = solver.estimate(z).v_estimate
    limit_solver = ExtremalSolver(body, sample, n, tol=tol)
    v_limit = np.array([limit_solver.estimate(z).v_estimate for z in z_list])
    drops = np.diff(table, axis=0).min(initial=0.0)
    nondec = bool(drops >= -10 * tol)
    limit_gap = float(np.max(np.abs(table[-1] - v_limit)))
    return MonotoneWeightReport(
        v_table=table, v_limit=v_limit, nondecreasing_ok=nondec, limit_gap=limit_gap
    )


def lelong_plus_envelope(field: GridField, body: ConvexBody, m: float, big_r: float) -> GridField:
    """Pointwise max of a sampled function with m + h_P(z / R).

    This is the standard truncation producing a function with full
    logarithmic growth from one that is only bounded above by the
    indicator; values of the input below the envelope are replaced.
    """
    grid_info = field.meta.get("grid")
    if grid_info is None:
        raise ValueError("field metadata does not record its grid")
    spec = GridSpec.from_dict(grid_info)
    pts = spec.complex_points(body.dim)
    with np.errstate(divide="ignore"):
        logs = np.log(np.abs(pts) / big_r)
    floor_vals = m + h_p_on_logs(body, logs)
    out = np.maximum(field.values, floor_vals.reshape(field.values.shape))
    meta = dict(field.meta)
    meta["envelope"] = {"m": m, "R": big_r, "body": body_to_dict(body)}
    return GridField(axes=field.axes, values=out, meta=meta)
