"""Indicator values, the growth floor, and level-set geometry."""

import math

import numpy as np
import pytest

from plpot.convex_body import build_body, support_value, unit_box, unit_simplex
from plpot.errors import UnboundedLevelSet
from plpot.grids import Axis, GridSpec
from plpot.indicator import (
    LogPoint,
    check_lower_bound,
    h_p,
    h_p_on_logs,
    level_set_distance,
    make_h_function,
)


QUAD = build_body([(0, 0), (1, 0), (0, 1), (1, 2)])
SIMPLEX = unit_simplex(2)


def test_h_p_quadrilateral_example():
    want = math.log(18.0)  # log 2 + 2 log 3
    assert h_p(QUAD, (2.0, 3.0)) == pytest.approx(want, abs=1e-14)
    assert h_p(QUAD, [2 + 0j, 3j]) == pytest.approx(want, abs=1e-14)
    assert h_p(QUAD, LogPoint.from_moduli([2.0, 3.0])) == pytest.approx(want, abs=1e-14)


def test_h_p_zero_on_closed_unit_polydisk():
    rng = np.random.default_rng(3)
    for body in (QUAD, SIMPLEX, unit_box(2)):
        for _ in range(20):
            m = rng.uniform(0.0, 1.0, size=2)
            assert h_p(body, m) == 0.0


def test_h_p_simplex_at_exponentials():
    assert h_p(SIMPLEX, (math.e, math.e**2)) == pytest.approx(2.0, abs=1e-14)


def test_h_p_zero_coordinate_convention():
    # vertices with a positive exponent on a vanished coordinate drop out
    assert h_p(QUAD, (0.0, 5.0)) == pytest.approx(math.log(5.0))
    assert h_p(QUAD, (5.0, 0.0)) == pytest.approx(math.log(5.0))
    assert h_p(QUAD, (0.0, 0.0)) == 0.0
    assert h_p(SIMPLEX, (0.0, 0.0)) == 0.0


def test_h_p_matches_support_value_on_finite_logs():
    rng = np.random.default_rng(11)
    for _ in range(50):
        logs = rng.uniform(-3.0, 3.0, size=2)
        direct = float(support_value(QUAD, tuple(logs.tolist())).value)
        assert h_p(QUAD, LogPoint.from_logs(logs)) == pytest.approx(direct, abs=1e-12)


def test_h_p_monotone_for_lower_sets():
    rng = np.random.default_rng(5)
    for body in (SIMPLEX, unit_box(2)):
        for _ in range(40):
            m = rng.uniform(0.0, 4.0, size=2)
            bump = rng.uniform(0.0, 1.0, size=2) * (rng.integers(0, 2, size=2))
            assert h_p(body, m + bump) >= h_p(body, m) - 1e-12


def test_h_p_on_logs_vectorized_agrees_with_scalar():
    rng = np.random.default_rng(17)
    logs = rng.uniform(-4.0, 4.0, size=(30, 2))
    vals = h_p_on_logs(QUAD, logs)
    for row, v in zip(logs, vals):
        assert v == pytest.approx(h_p(QUAD, LogPoint.from_logs(row)), abs=1e-14)


def test_make_h_function_on_complex_grid():
    h = make_h_function(SIMPLEX)
    z = np.array([[2.0 + 0j, 0.5j], [1j, 1j]])
    out = h(z)
    assert out.shape == (2,)
    assert out[0] == pytest.approx(math.log(2.0))
    assert out[1] == 0.0


def test_check_lower_bound_simplex_equality():
    chk = check_lower_bound(SIMPLEX, (5.0, 1.0), k=1)
    assert chk.lhs == pytest.approx(math.log(5.0))
    assert chk.rhs == pytest.approx(math.log(5.0))
    assert chk.ok


def test_check_lower_bound_quadrilateral_point():
    chk = check_lower_bound(QUAD, (0.1, 100.0), k=1)
    assert chk.lhs == pytest.approx(math.log(1000.0), abs=1e-12)
    assert chk.rhs == pytest.approx(math.log(100.0), abs=1e-12)
    assert chk.ok


def test_check_lower_bound_inside_polydisk():
    chk = check_lower_bound(QUAD, (0.5, 0.9), k=1)
    assert chk.lhs == 0.0 and chk.rhs == 0.0 and chk.ok


def test_check_lower_bound_k2_body():
    half_box = build_body([(0, 0), ("1/2", 0), (0, "1/2"), ("1/2", "1/2")])
    chk = check_lower_bound(half_box, (9.0, 2.0), k=2)
    assert chk.rhs == pytest.approx(math.log(9.0) / 2)
    assert chk.ok


def test_check_lower_bound_requires_hypothesis():
    steep = build_body([(0, 0), (1, 2), (0, 1)])
    with pytest.raises(ValueError):
        check_lower_bound(steep, (2.0, 2.0), k=4)


@pytest.mark.parametrize(
    "body,k", [(QUAD, 1), (SIMPLEX, 1), (build_body([(0, 0), ("1/2", 0), (0, "1/2"), ("1/2", "1/2")]), 2)]
)
def test_check_lower_bound_random_points(body, k):
    rng = np.random.default_rng(23)
    logs = rng.uniform(-6.0, 6.0, size=(10_000, 2))
    lhs = h_p_on_logs(body, logs)
    rhs = np.maximum(logs.max(axis=1), 0.0) / k
    assert np.all(lhs >= rhs - 1e-12)


def test_level_set_distance_segment_body():
    seg = build_body([(0,), (1,)])
    for big_r in (10.0, 250.0):
        out = level_set_distance(seg, LogPoint.from_moduli([big_r]), 0.5)
        assert out.estimate == pytest.approx(big_r, rel=1e-12)
        assert out.resolution == 0.0
        assert out.level == pytest.approx(math.log(big_r))
        assert out.level_far == pytest.approx(math.log(2 * big_r))


def test_level_set_distance_simplex_grows_linearly():
    vals = {}
    for big_r in (10.0, 100.0):
        out = level_set_distance(SIMPLEX, LogPoint.from_moduli([big_r, big_r]), 1 / math.e)
        vals[big_r] = out.estimate
        assert out.estimate == pytest.approx((math.e - 1) * big_r, rel=1e-9)
        assert out.resolution < 1e-6 * big_r
    assert vals[100.0] > 5 * vals[10.0]


@pytest.mark.parametrize("big_r", [10.0, 100.0, 1000.0])
def test_level_set_distance_quadrilateral_pinch(big_r):
    # the two surfaces approach within ~e^{-h} near the second axis, so the
    # distance decays like 1/R^2 while distance * e^h stays bounded below
    out = level_set_distance(QUAD, LogPoint.from_moduli([1.0, big_r]), 0.5)
    assert out.level == pytest.approx(2 * math.log(big_r))
    assert out.estimate > 0.0
    scaled = out.estimate * big_r**2
    assert 0.9 <= scaled <= 1.01
    assert out.resolution < 1e-6


def test_level_set_distance_inputs():
    with pytest.raises(UnboundedLevelSet):
        level_set_distance(QUAD, LogPoint.from_moduli([1.0, 1.0]), 0.5)
    for bad_c in (0.0, 1.0, 2.0, -0.5):
        with pytest.raises(ValueError):
            level_set_distance(QUAD, LogPoint.from_moduli([1.0, 10.0]), bad_c)


def test_level_set_distance_accepts_gridspec_search():
    spec = GridSpec(axes=(Axis("m1", 0.0, 4.0, 33), Axis("m2", 0.0, 4.0, 33)), mode="moduli")
    out = level_set_distance(SIMPLEX, LogPoint.from_moduli([10.0, 10.0]), 1 / math.e, search=spec)
    assert out.estimate == pytest.approx((math.e - 1) * 10.0, rel=1e-9)
