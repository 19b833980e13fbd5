"""Smoothing, the inf-convolution regularizer, and their contracts."""

import math

import numpy as np
import pytest

from plpot.convex_body import build_body, non_lower_quadrilateral, unit_simplex
from plpot.errors import (
    ConfigError,
    ContractViolation,
    NonFiniteSample,
    QuadratureTooCoarse,
    ToleranceExceeded,
)
from plpot.grids import Axis, GridSpec
from plpot.indicator import make_h_function
from plpot.regularize import (
    HatDeltaResult,
    a_delta_bound,
    build_kernel,
    convolution_gap_scan,
    convolve,
    counterexample_point,
    distance_identity_check,
    ferrier,
    ferrier_contracts,
    hat_delta,
    submean_check,
    usable_t_estimate,
)
import plpot.regularize as regularize
from plpot.indicator import LogPoint


QUAD = non_lower_quadrilateral()
SIMPLEX = unit_simplex(2)
H_QUAD = make_h_function(QUAD)
H_SIMPLEX = make_h_function(SIMPLEX)


# ---------------------------------------------------------------------------
# kernel


def test_kernel_weights_are_a_probability_measure():
    for d, nodes in ((1, 32), (1, 64), (2, 16)):
        k = build_kernel(d, nodes)
        assert k.weights.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(k.weights >= 0)
        assert k.support_radius == 1.0


def test_kernel_profile_bump_shape():
    k = build_kernel(1, 32)
    r = np.linspace(0.0, 1.5, 31)
    vals = k.profile(r[:, None])
    assert vals[0] == pytest.approx(math.exp(-1.0))
    assert np.all(vals <= math.exp(-1.0) + 1e-15)
    assert np.all(vals >= 0.0)
    assert np.all(vals[r >= 1.0] == 0.0)
    assert np.all(np.diff(vals[r <= 1.0]) <= 1e-15)


def test_kernel_coordinate_mass_against_midpoint_rule():
    k = build_kernel(1, 48)
    r = (np.arange(200_000) + 0.5) / 200_000
    oracle = float(np.sum(np.exp(-1.0 / (1.0 - r**2)) * 2 * np.pi * r) / 200_000)
    assert k.coord_mass == pytest.approx(oracle, rel=1e-6)


def test_kernel_rejects_coarse_quadrature():
    with pytest.raises(ConfigError):
        build_kernel(1, 4)


# ---------------------------------------------------------------------------
# convolution


def test_convolve_constant_is_exact():
    k = build_kernel(1, 16)
    out = convolve(lambda z: np.full(z.shape[:-1], 2.5), k, 0.3, (1.0 + 1j,))
    assert out.value == pytest.approx(2.5, abs=1e-12)
    assert out.error < 1e-12


def test_convolve_harmonic_mean_value():
    # log|z| is harmonic away from 0, so the radial kernel reproduces it
    k = build_kernel(1, 24)
    out = convolve(lambda z: np.log(np.abs(z[..., 0])), k, 0.5, (2.0 + 0j,))
    assert out.value == pytest.approx(math.log(2.0), abs=1e-12)


def test_convolve_indicator_on_harmonic_region():
    k = build_kernel(2, 12)
    out = convolve(H_SIMPLEX, k, 0.5, (3.0 + 0j, 2.0 + 0j))
    assert out.value == pytest.approx(math.log(3.0), abs=1e-9)


@pytest.mark.parametrize("z0", [(1.0 + 0j, 1.0 + 0j), (0.5 + 0j, 1.0j), (2.0 + 0j, 2.0 + 0j)])
def test_convolve_dominates_indicator(z0):
    k = build_kernel(2, 12)
    out = convolve(H_QUAD, k, 0.4, z0)
    assert out.value >= H_QUAD(np.asarray(z0)) - 1e-8


def test_convolve_monotone_in_eps_at_kink():
    k = build_kernel(2, 12)
    z0 = (1.0 + 0j, 1.0 + 0j)
    big = convolve(H_QUAD, k, 0.5, z0).value
    small = convolve(H_QUAD, k, 0.25, z0).value
    assert big >= small >= float(H_QUAD(np.asarray(z0)))


def test_convolve_submean_for_subharmonic():
    k = build_kernel(1, 16)
    f = lambda z: np.abs(z[..., 0]) ** 2
    out = convolve(f, k, 0.7, (1.0 + 2j,))
    assert out.value >= 5.0 - 1e-12


def test_convolve_rejects_nonfinite_samples():
    k = build_kernel(1, 16)
    with pytest.raises(NonFiniteSample):
        convolve(lambda z: np.full(z.shape[:-1], np.nan), k, 0.1, (1.0,))
    with pytest.raises(NonFiniteSample):
        convolve(lambda z: np.full(z.shape[:-1], -np.inf), k, 0.1, (1.0,))


# ---------------------------------------------------------------------------
# gap scan and the analytic bound


def test_a_delta_bound_values():
    assert a_delta_bound(SIMPLEX, 0.1) == pytest.approx(math.log(11.0))
    assert a_delta_bound(QUAD, 0.1) == pytest.approx(3 * math.log(11.0))


def test_gap_scan_lower_set_stays_under_analytic_bound():
    region = GridSpec(
        axes=(Axis("m1", 0.01, 0.09, 3), Axis("m2", 10.5, 20.0, 3)), mode="moduli"
    )
    field = convolution_gap_scan(SIMPLEX, 0.1, region, nodes=12)
    bound = field.meta["a_delta_bound"]
    assert bound == pytest.approx(math.log(11.0))
    assert np.all(field.values <= bound)
    assert np.all(field.values >= -field.meta["max_quadrature_error"] - 1e-12)


def test_gap_scan_small_eps_on_compact_region():
    region = GridSpec(
        axes=(Axis("m1", 0.2, 2.0, 3), Axis("m2", 0.2, 2.0, 3)), mode="moduli"
    )
    field = convolution_gap_scan(SIMPLEX, 0.02, region, nodes=12)
    assert float(field.values.max()) <= 0.05


def test_gap_scan_requires_dimension_two():
    seg = build_body([(0,), (1,)])
    region = GridSpec(axes=(Axis("m", 0.5, 2.0, 3),), mode="moduli")
    with pytest.raises(ConfigError):
        convolution_gap_scan(seg, 0.1, region)


# ---------------------------------------------------------------------------
# counterexample driver


def test_counterexample_produces_gap_beyond_c():
    rep = counterexample_point(0.5, 1.0)
    assert rep.gap > 1.0
    assert rep.gap >= 2.0 - 1e-9
    assert rep.quadrature_error < rep.gap - 1.0
    assert 0.0 < rep.a_eps < 1.0
    assert rep.log_x < 0 < rep.log_y
    d = rep.to_dict()
    assert set(d) == {
        "eps", "C", "a_eps", "x_C_log_modulus", "y_C_log_modulus",
        "gap", "quadrature_error", "nodes",
    }


def test_counterexample_gap_scales_with_c():
    rep = counterexample_point(0.5, 5.0)
    assert rep.gap >= 10.0 - 1e-9
    # the witness modulus grows like e^{2C/a_eps}, kept in log form
    assert rep.log_y > 2 * 5.0 / rep.a_eps


def test_counterexample_guards():
    with pytest.raises(ConfigError):
        counterexample_point(0.5, 1.0, body=SIMPLEX)
    for bad_eps in (0.0, 1.0, 1.5, -0.25):
        with pytest.raises(ConfigError):
            counterexample_point(bad_eps, 1.0)
    with pytest.raises(ConfigError):
        counterexample_point(0.5, 0.0)


def test_counterexample_reports_coarse_quadrature(monkeypatch):
    def fake_gap(body, logs, eps, kernel):
        return 2.0 if kernel.nodes >= 96 else 5.0

    monkeypatch.setattr(regularize, "_smoothing_gap_log", fake_gap)
    with pytest.raises(QuadratureTooCoarse):
        counterexample_point(0.5, 1.0)


# ---------------------------------------------------------------------------
# ferrier regularization


def test_ferrier_constant_fixed_point():
    res = ferrier(lambda z: np.zeros(z.shape[:-1]), 1.0, (0.5 + 0.5j,))
    assert res.u_t_value == pytest.approx(0.0, abs=1e-12)
    assert res.minimizer[0] == pytest.approx(0.5 + 0.5j)


def test_ferrier_log_plus_at_origin():
    def u(z):
        with np.errstate(divide="ignore"):
            return np.maximum(np.log(np.abs(z[..., 0])), 0.0)

    res = ferrier(u, 1.0, (0.0 + 0j,))
    assert res.u_t_value == pytest.approx(0.0, abs=res.grid_error + 1e-9)
    assert res.search_radius == pytest.approx(1.0, rel=1e-6)


def test_ferrier_dominates_u_and_stays_in_ball():
    rng = np.random.default_rng(8)
    u = lambda z: H_QUAD(z)
    for _ in range(10):
        x = tuple(rng.normal(size=2) * 3 + 1j * rng.normal(size=2))
        res = ferrier(u, 0.5, x)
        assert res.u_t_value >= float(u(np.asarray(x))) - 1e-12
        assert np.linalg.norm(np.asarray(res.minimizer) - np.asarray(x)) <= res.search_radius * (1 + 1e-12)


def test_ferrier_monotone_in_t():
    u = lambda z: H_QUAD(z)
    x = (2.0 + 1j, 3.0 - 0.5j)
    hi = ferrier(u, 1.0, x)
    lo = ferrier(u, 0.25, x)
    assert lo.u_t_value <= hi.u_t_value + hi.grid_error + lo.grid_error + 1e-9


def test_ferrier_radial_matches_cartesian_for_rotation_invariant_u():
    u = lambda z: H_QUAD(z)
    x = (1.5 + 0j, 2.5 + 0j)
    cart = ferrier(u, 0.5, x, rounds=16)
    rad = ferrier(u, 0.5, x, rounds=16, radial=True)
    tol = cart.grid_error + rad.grid_error + 1e-9
    assert rad.u_t_value == pytest.approx(cart.u_t_value, abs=tol)


def shell_sample(rng, radii, per_shell):
    out = []
    for big_r in radii:
        w = rng.normal(size=(per_shell, 2)) + 1j * rng.normal(size=(per_shell, 2))
        w *= (big_r / np.linalg.norm(w, axis=1))[:, None]
        out.append(w)
    return np.concatenate(out)


def test_ferrier_contracts_pass_for_shifted_indicator():
    rng = np.random.default_rng(12)
    sample = shell_sample(rng, (10.0, 100.0, 1000.0), 6)
    u = lambda z: 1.0 + H_QUAD(z)
    rep = ferrier_contracts(
        u,
        [1.0, 0.1, 0.01],
        sample,
        body=QUAD,
        c=1.0,
        shell_edges=[5.0, 50.0, 500.0, 5000.0],
    )
    assert rep.lipschitz_margin <= 1e-12
    assert np.all(np.diff(rep.delta_table, axis=0) >= 0)
    assert rep.pool_size >= sample.shape[0]
    gaps = rep.shell_max_gap
    assert np.nanmax(gaps) - np.nanmin(gaps) <= 1.0


def test_ferrier_contracts_require_decreasing_t():
    sample = np.array([[1.0 + 0j, 1.0 + 0j]])
    with pytest.raises(ValueError):
        ferrier_contracts(lambda z: H_QUAD(z), [0.1, 0.1], sample)


def test_ferrier_contracts_flag_missing_floor():
    rng = np.random.default_rng(3)
    sample = (rng.normal(size=(10, 2)) + 1j * rng.normal(size=(10, 2))) * 10
    u = lambda z: H_QUAD(z) - 5.0
    with pytest.raises(ContractViolation) as info:
        ferrier_contracts(u, [1.0, 0.5], sample, body=QUAD, c=0.0)
    assert "(iii)" in str(info.value)


def test_ferrier_contracts_flag_unbounded_excess():
    rng = np.random.default_rng(5)
    sample = shell_sample(rng, (10.0, 100.0, 1000.0), 6)
    u = lambda z: 2.0 * H_QUAD(z)
    with pytest.raises(ContractViolation) as info:
        ferrier_contracts(
            u, [1.0, 0.1], sample, body=QUAD, shell_edges=[5.0, 50.0, 500.0, 5000.0]
        )
    assert "(iv)" in str(info.value)


# ---------------------------------------------------------------------------
# hat_delta and the appendix distance identity


def test_hat_delta_examples():
    const = lambda s: np.ones(s.shape[:-1])
    for lam in (0.5, 2.0):
        assert hat_delta(const, lam, (0.3 + 0.1j,)).value == pytest.approx(1.0, abs=1e-12)
    absval = lambda s: np.abs(s[..., 0])
    assert hat_delta(absval, 1.0, (0.0 + 0j,)).value == pytest.approx(0.0, abs=1e-12)
    assert hat_delta(absval, 1.0, (1.0 + 0j,)).value == pytest.approx(1.0, abs=1e-9)
    hinge = lambda s: np.maximum(1.0 - np.abs(s[..., 0]), 0.0)
    assert hat_delta(hinge, 2.0, (0.0 + 0j,)).value == pytest.approx(1.0, abs=1e-9)


def test_hat_delta_is_lam_lipschitz():
    rng = np.random.default_rng(9)
    delta = lambda s: np.abs(np.sin(np.abs(s[..., 0]))) + 0.1
    lam = 1.5
    pts = rng.normal(size=6) + 1j * rng.normal(size=6)
    vals = [hat_delta(delta, lam, (p,)) for p in pts]
    for i in range(6):
        for j in range(i):
            lhs = abs(vals[i].value - vals[j].value)
            slack = vals[i].grid_error + vals[j].grid_error + 1e-9
            assert lhs <= lam * abs(pts[i] - pts[j]) + slack


@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
def test_distance_identity_constant(lam):
    const = lambda s: np.ones(s.shape[:-1])
    rep = distance_identity_check(const, lam, np.array([[0.0 + 0j], [1.0 + 1j]]))
    assert rep.ok
    assert np.allclose(rep.lhs, 1.0, atol=1e-9)
    assert np.all(np.abs(rep.lhs - rep.rhs) <= rep.combined_tol)
    assert rep.worst_diff <= float(np.max(rep.combined_tol))


def test_distance_identity_absolute_value():
    absval = lambda s: np.abs(s[..., 0])
    rep = distance_identity_check(absval, 1.0, np.array([[1.0 + 0j]]))
    assert rep.ok
    assert rep.lhs[0] == pytest.approx(1.0, abs=1e-6)
    assert rep.rhs[0] == pytest.approx(1.0, abs=1e-6)


def test_distance_identity_indicator_slice():
    delta = lambda s: np.exp(-np.maximum(np.log(np.abs(s[..., 0])), 0.0))
    sample = np.array([[0.5 + 0j], [1.5 + 0j], [3.0 + 0j]])
    rep = distance_identity_check(delta, 1.0, sample)
    assert rep.ok


def test_distance_identity_reports_worst_point(monkeypatch):
    const = lambda s: np.ones(s.shape[:-1])

    def fake(delta, lam, s, grid=9, rounds=12):
        return HatDeltaResult(value=5.0, minimizer=tuple(s), search_radius=1.0, grid_error=0.0)

    monkeypatch.setattr(regularize, "hat_delta", fake)
    with pytest.raises(ToleranceExceeded):
        distance_identity_check(const, 1.0, np.array([[0.0 + 0j]]))


# ---------------------------------------------------------------------------
# sub-mean-value probe


def test_submean_examples():
    harmonic = submean_check(lambda z: z[..., 0].real, (0.3 + 0.2j,), (1.0,), 0.5)
    assert harmonic.ok and abs(harmonic.lhs - harmonic.rhs) <= harmonic.tol
    sub = submean_check(lambda z: np.abs(z[..., 0]) ** 2, (1.0 + 0j,), (1.0,), 0.5)
    assert sub.ok and sub.lhs < sub.rhs
    superh = submean_check(lambda z: -np.abs(z[..., 0]) ** 2, (1.0 + 0j,), (1.0,), 0.5)
    assert not superh.ok


def test_submean_for_ferrier_output():
    u = lambda z: H_QUAD(z)
    rng = np.random.default_rng(21)
    for _ in range(5):
        z0 = tuple(rng.normal(size=2) * 2 + 1j * rng.normal(size=2))
        direction = tuple(rng.normal(size=2) + 1j * rng.normal(size=2))
        u_t = lambda z: np.vectorize(
            lambda *row: ferrier(u, 0.5, row, rounds=8).u_t_value
        )(*(z[..., k] for k in range(2)))
        chk = submean_check(u_t, z0, direction, 0.3, nodes=32, extra_tol=2e-3)
        assert chk.ok


def test_submean_rejects_nonfinite_circle():
    u = lambda z: np.where(np.abs(z[..., 0]) > 1.0, np.nan, 0.0)
    with pytest.raises(NonFiniteSample):
        submean_check(u, (1.0 + 0j,), (1.0,), 0.5)


# ---------------------------------------------------------------------------
# usable t


def test_usable_t_estimate_positive_for_both_bodies():
    quad_probes = [LogPoint.from_moduli([1.0, r]) for r in (10.0, 100.0, 1000.0)]
    t_quad = usable_t_estimate(QUAD, 0.5, quad_probes)
    assert 1.8 <= t_quad <= 2.05
    simp_probes = [LogPoint.from_moduli([r, r]) for r in (10.0, 100.0)]
    t_simp = usable_t_estimate(SIMPLEX, 1 / math.e, simp_probes)
    assert t_simp == pytest.approx((math.e - 1) * 10.0 * 10.0 * math.e, rel=1e-4)


def test_usable_t_estimate_validates_floor():
    probes = [LogPoint.from_moduli([1.0, 10.0])]
    for bad in (0.0, 1.0, 2.0):
        with pytest.raises(ConfigError):
            usable_t_estimate(QUAD, bad, probes)
