import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fading_dirt.bounds_binomial import inner_binomial_terms
from fading_dirt.core import ChannelParams
from fading_dirt.optimize import (EPS_BND, Box, BoundResult, NoFeasiblePoint, NonFiniteObjective, OptSpec,
                                  SignalingPoint, optimize_box, region_a_project, surface_residual)


def test_quadratic_vertex():
    arg, val, _ = optimize_box(lambda x: -(x[:, 0] - 0.3) ** 2, Box([(-1, 1)]), "max")
    assert abs(arg[0] - 0.3) < 1e-4
    assert abs(val) < 1e-8


def test_linear_boundary():
    arg, val, _ = optimize_box(lambda x: x[:, 0] + x[:, 1], Box([(0, 1), (0, 1)]), "max")
    np.testing.assert_allclose(arg, [1, 1])
    assert val == 2


def test_minimise():
    arg, val, _ = optimize_box(lambda x: (x[:, 0] + 0.5) ** 2 + 1, Box([(-1, 1)]), "min")
    assert abs(arg[0] + 0.5) < 1e-4 and abs(val - 1) < 1e-8


def test_th5_against_exhaustive_grid():
    p = ChannelParams(8, 4)

    def f(x):
        return sum(inner_binomial_terms(p, math.pi / 2, x[:, 0], x[:, 1]))

    _, val, _ = optimize_box(f, Box([(0, 1), (0, 1)]), "max")
    a = np.linspace(0, 1, 2001)
    A, B = np.meshgrid(a, a, indexing="ij")
    assert abs(val - sum(inner_binomial_terms(p, math.pi / 2, A, B)).max()) < 1e-3


def test_center_candidate():
    # a spike at the center that the coarse grid (even point count) misses
    box = Box([(-1, 1)])
    f = lambda x: np.where(np.abs(x[:, 0]) < 1e-12, 5.0, -np.abs(x[:, 0]))  # noqa: E731
    _, val, _ = optimize_box(f, box, "max", OptSpec(coarse_points_per_dim=4, refine_rounds=0))
    assert val == 5.0


def test_tie_break_lexicographic():
    arg, _, _ = optimize_box(lambda x: np.zeros(len(x)), Box([(0, 1), (0, 1)]), "min",
                             OptSpec(coarse_points_per_dim=3, refine_rounds=0))
    np.testing.assert_array_equal(arg, [0, 0])


def test_nonfinite_reports_point():
    with pytest.raises(NonFiniteObjective) as e:
        optimize_box(lambda x: np.where(x[:, 0] > 0.5, np.nan, 0.0), Box([(0, 1)]), "max")
    assert e.value.point[0] > 0.5


def test_infeasible_markers():
    f = lambda x: np.where(x[:, 0] < 0.5, -np.inf, -x[:, 0])  # noqa: E731
    with pytest.raises(NonFiniteObjective):
        optimize_box(f, Box([(0, 1)]), "max")
    arg, val, _ = optimize_box(f, Box([(0, 1)]), "max", allow_infeasible=True)
    assert abs(arg[0] - 0.5) < 1e-9
    with pytest.raises(NoFeasiblePoint):
        optimize_box(lambda x: np.full(len(x), -np.inf), Box([(0, 1)]), "max", allow_infeasible=True)


def test_spec_validation():
    for kw in [dict(coarse_points_per_dim=1), dict(refine_rounds=-1), dict(shrink_factor=1.0),
               dict(tolerance=0.0)]:
        with pytest.raises(ValueError):
            OptSpec(**kw)
    with pytest.raises(ValueError):
        Box([(1, 0)])
    with pytest.raises(ValueError):
        BoundResult(math.inf)


@settings(max_examples=30, deadline=None)
@given(st.floats(-0.9, 0.9), st.floats(-0.9, 0.9), st.floats(0.5, 3.0))
def test_refine_rounds_monotone(c1, c2, w):
    f = lambda x: -np.cos(w * x[:, 0]) * (x[:, 1] - c2) ** 2 - (x[:, 0] - c1) ** 2  # noqa: E731
    prev = -np.inf
    for r in range(5):
        _, val, _ = optimize_box(f, Box([(-1, 1), (-1, 1)]), "max", OptSpec(coarse_points_per_dim=7, refine_rounds=r))
        assert val >= prev
        prev = val


def test_region_a_examples():
    pt = region_a_project(0.8, 0.5, +1)
    assert abs(pt.rho_ux - math.sqrt(0.91)) < 1e-15
    assert region_a_project(0.6, -0.6, +1) is None
    for r in (-0.7, 0.0, 0.2, 0.95):
        assert region_a_project(r, r, +1) is None
    neg = region_a_project(0.8, 0.5, -1)
    assert neg.rho_ux == -pt.rho_ux


def test_region_a_scan_at_zero_rho_xs():
    for us in np.linspace(-0.99, 0.99, 199):
        pt = region_a_project(0.0, float(us), +1)
        if abs(us) < math.sqrt(1 - (1 - EPS_BND) ** 2) - 1e-15:
            assert pt is None
        else:
            assert pt is not None and abs(pt.rho_ux**2 - (1 - us**2)) < 1e-15


@settings(max_examples=200)
@given(st.floats(-0.999, 0.999), st.floats(-0.999, 0.999), st.sampled_from([1, -1]))
def test_projection_on_surface(xs, us, sign):
    pt = region_a_project(xs, us, sign)
    if pt is not None:
        assert abs(surface_residual(pt.rho_xs, pt.rho_us, pt.rho_ux)) <= 1e-12
        assert abs(pt.rho_ux) <= 1 - EPS_BND


def test_signaling_point_validation():
    with pytest.raises(ValueError):
        SignalingPoint(0.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        SignalingPoint(1.0, 0.0, 0.0)
    pt = SignalingPoint(0.0, 0.6, 0.8)
    np.testing.assert_allclose(pt.correlation_matrix(), [[1, 0, 0.8], [0, 1, 0.6], [0.8, 0.6, 1]])
    assert pt.is_joint_law()
    assert not region_a_project(0.5, 0.3, +1).is_joint_law()
