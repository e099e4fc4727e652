import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from condsage.conic import Expr, Model, solve
from condsage.problems import ex1, ex1_functions, ex7
from condsage.sets import (
    ConicSet,
    box,
    cone_over,
    from_posynomial_leq,
    from_signomial_constraints,
    infer_abs_bounds,
    linear_set,
    log_annulus,
    log_ball,
    log_box,
    maximize_linear,
    support_epigraph,
    support_value,
    whole_space,
)
from condsage.symbolic import Signomial


def _feasible(model):
    model.minimize(Expr.constant([0.0]))
    return solve(model.compile()).status == "optimal"


def test_whole_space_support_forces_zero_lambda():
    X = whole_space(2)
    assert X.is_whole_space
    assert support_value(X, [0.0, 0.0]) == 0.0
    assert support_value(X, [1.0, 0.0]) == np.inf


def test_whole_space_rejects_zero_dimension():
    with pytest.raises(ValueError):
        whole_space(0)


def test_box_support_is_absolute_value():
    X = box([-1.0], [1.0])
    for lam in (-2.5, -1.0, 0.0, 0.3, 4.0):
        assert support_value(X, [lam]) == pytest.approx(abs(lam), abs=1e-7)


def test_single_exp_constraint_support():
    X = from_posynomial_leq([(Signomial([[1.0]], [1.0]), 2.0)])
    assert X.count("exp") == 0 and X.rows == 1
    assert support_value(X, [1.0]) == pytest.approx(np.log(2.0), abs=1e-7)
    assert X.contains([np.log(2.0) - 1e-9]) and not X.contains([np.log(2.0) + 1e-3])


def test_two_term_posynomial_support_matches_closed_form():
    # e^x + e^{2x} <= 2 holds exactly for x <= 0
    X = from_posynomial_leq([(Signomial([[1.0], [2.0]], [1.0, 1.0]), 2.0)])
    assert X.count("exp") == 2
    assert support_value(X, [1.0]) == pytest.approx(0.0, abs=1e-6)


def test_posynomial_constraint_rejects_negative_coefficients():
    with pytest.raises(ValueError):
        from_posynomial_leq([(Signomial([[1.0], [0.0]], [1.0, -1.0]), 1.0)])


def test_signomial_constraint_needs_one_positive_term():
    g = Signomial([[1.0], [2.0], [0.0]], [1.0, 1.0, -1.0])
    with pytest.raises(ValueError):
        from_signomial_constraints([g])


def test_ex1_domain_cone_counts():
    X = ex1().spec.X
    # g1 gives three exponential factors and one linear row; bounds give six rows
    assert X.count("exp") == 3
    assert X.rows - 3 * 3 == 1 + 6


def test_ex7_domain_cone_counts():
    X = ex7().spec.X
    assert X.count("exp") == 3
    assert X.rows - 3 * 3 == 7


def test_cone_over_at_unit_scale_is_membership():
    X = box([-1.0, -1.0], [1.0, 1.0])
    for z, ok in (([0.5, -0.5], True), ([1.5, 0.0], False)):
        m = Model()
        zv = m.variable("z", 2)
        t = m.variable("t")
        m.add_zero(zv - np.array(z))
        m.add_zero(t - 1.0)
        cone_over(m, X, zv, t)
        assert _feasible(m) == ok


def test_cone_over_at_zero_scale_forces_zero_on_bounded_set():
    X = box([-1.0], [1.0])
    m = Model()
    z = m.variable("z")
    t = m.variable("t")
    m.add_zero(t)
    cone_over(m, X, z, t)
    m.maximize(z)
    sol = solve(m.compile())
    assert sol.status == "optimal"
    assert abs(z.value(sol.x)[0]) <= 1e-7


def test_cone_over_ex1_scaled_feasible_point():
    X = ex1().spec.X
    x0 = np.array([5.01063529, 3.40119660, -0.48450710])
    f, g = ex1_functions()
    assert all(gi(x0) >= -1e-6 for gi in g)
    for t0 in (0.3, 1.0, 7.0):
        m = Model()
        z = m.variable("z", 3)
        t = m.variable("t")
        m.add_zero(z - x0 * t0)
        m.add_zero(t - t0)
        cone_over(m, X, z, t)
        assert _feasible(m)


def test_log_box_for_half_unit_cube():
    D = log_box(np.full(7, 0.5))
    assert D.sign_symmetric and D.n == 7
    assert D.Y.rows == 7 and D.Y.count("exp") == 0
    assert np.allclose(D.Y.b, np.log(0.5))
    assert D.contains(np.full(7, -0.5)) and not D.contains(np.full(7, 0.51))


def test_log_annulus_bounds():
    D = log_annulus([0.1], [1.0])
    lo, hi = D.Y.coordinate_ranges()
    assert lo[0] == pytest.approx(-np.log(10.0), abs=1e-7)
    assert hi[0] == pytest.approx(0.0, abs=1e-7)


def test_unit_box_is_nonpositive_orthant():
    D = log_box(np.ones(3))
    assert D.Y.contains(np.array([-1.0, -5.0, 0.0]))
    assert not D.Y.contains(np.array([0.1, -1.0, -1.0]))


def test_log_ball_membership():
    D = log_ball(1.0, 2)
    assert D.contains(np.array([0.6, -0.7]))
    assert not D.contains(np.array([0.8, -0.7]))


def test_domain_constructors_reject_nonpositive_bounds():
    with pytest.raises(ValueError):
        log_box([0.0])
    with pytest.raises(ValueError):
        log_ball(-1.0, 2)
    with pytest.raises(ValueError):
        log_annulus([1.0], [0.0])


def test_infer_abs_bounds():
    amin, amax = infer_abs_bounds([-1.0, 0.1, -3.0], [2.0, 1.0, -0.5])
    assert amin.tolist() == [0.0, 0.1, 0.5]
    assert amax.tolist() == [2.0, 1.0, 3.0]


def test_interior_point_is_checked():
    with pytest.raises(ValueError):
        ConicSet(1, [[1.0]], [0.0], [("nonneg", 1)], interior_point=[0.0])
    X = ConicSet(1, [[1.0]], [0.0], [("nonneg", 1)], interior_point=[1.0])
    assert X.interior_point is not None


def test_translate_and_center():
    X = box([0.0, -2.0], [4.0, 6.0])
    assert np.allclose(X.center(), [2.0, 2.0], atol=1e-6)
    Xd = X.translate([2.0, 2.0])
    assert Xd.contains(np.array([-2.0, -4.0])) and not Xd.contains(np.array([2.5, 0.0]))


lam_st = st.lists(st.floats(-3, 3, allow_nan=False), min_size=2, max_size=2)


@settings(max_examples=25, deadline=None)
@given(lam_st, st.integers(0, 10 ** 6))
def test_support_epigraph_soundness(lam, seed):
    """The epigraph value bounds lam . x on sampled points of X."""
    rng = np.random.default_rng(seed)
    g = Signomial([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]], [1.0, 1.0, 0.5])
    X = from_posynomial_leq([(g, 4.0)]).intersect(box([-3.0, -3.0], [3.0, 3.0]))
    m = Model()
    val = support_epigraph(m, X, Expr.constant(np.array(lam)))
    m.minimize(val)
    sol = solve(m.compile())
    assert sol.status == "optimal"
    bound = float(val.value(sol.x)[0])
    pts = rng.uniform(-3, 3, size=(400, 2))
    inside = pts[g(pts) <= 4.0]
    assert np.all(inside @ np.array(lam) <= bound + 1e-8)
    direct, _ = maximize_linear(X, lam)
    assert bound == pytest.approx(direct, abs=1e-6)


@settings(max_examples=25, deadline=None)
@given(lam_st)
def test_support_epigraph_matches_direct_maximum_on_box(lam):
    X = box([-1.0, 0.0], [2.0, 3.0]).with_interior_point([0.5, 1.5])
    expected = sum(max(l * a, l * b) for l, a, b in zip(lam, (-1.0, 0.0), (2.0, 3.0)))
    assert support_value(X, lam) == pytest.approx(expected, abs=1e-6)


def test_linear_set_with_equalities():
    X = linear_set([[1.0, 0.0]], [0.0], equalities=([[0.0, 1.0]], [-1.0]))
    assert X.contains(np.array([2.0, 1.0]))
    assert not X.contains(np.array([2.0, 0.0]))
