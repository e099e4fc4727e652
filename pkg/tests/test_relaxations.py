import numpy as np
import pytest

from condsage.problems import ex1, ex1_functions
from condsage.relaxations import (
    HierarchyLevel,
    HierarchyTooLarge,
    ProblemSpec,
    agreement_digits,
    build_level,
    sig_lagrangian,
    sig_minimax_free,
    solve_level,
    solve_spec,
)
from condsage.sets import box, log_box, whole_space
from condsage.symbolic import Polynomial, Signomial

# e^{2x} + e^{-2x} + e^{y} + e^{-y} - 3 e^{x + y/2} - e^{x - y}: several negative terms
F2 = Signomial([[2.0, 0.0], [-2.0, 0.0], [0.0, 1.0], [0.0, -1.0], [1.0, 0.5], [1.0, -1.0]],
               [1.0, 1.0, 1.0, 1.0, -3.0, -1.0])


def _grid_min(f, lo, hi, k=401, g=()):
    a = np.linspace(lo[0], hi[0], k)
    b = np.linspace(lo[1], hi[1], k)
    P = np.stack(np.meshgrid(a, b), axis=-1).reshape(-1, 2)
    ok = np.ones(len(P), dtype=bool)
    for h in g:
        ok &= h(P) >= 0
    return float(np.min(f(P[ok])))


def _bound(spec, level, **kw):
    res = solve_spec(spec, level, **kw)
    assert res.status == "optimal"
    return res.bound


def test_level_parse_and_validation():
    assert HierarchyLevel.parse("1,2,0") == HierarchyLevel(1, 2, 0)
    assert HierarchyLevel.parse([3], minimax_free=True).ell == 3
    assert str(HierarchyLevel(0, 1, 0)) == "(0,1,0)"
    with pytest.raises(ValueError):
        HierarchyLevel(0, 0, 0)
    with pytest.raises(ValueError):
        HierarchyLevel(-1, 1, 0)


def test_spec_kind_validation():
    f = Signomial([[1.0]], [1.0])
    with pytest.raises(ValueError):
        ProblemSpec(f, X=log_box([1.0]), kind="signomial")
    with pytest.raises(ValueError):
        ProblemSpec(Polynomial([[1]], [1.0]), X=box([0.0], [1.0]), kind="polynomial")
    with pytest.raises(ValueError):
        ProblemSpec(f, kind="rational")


def test_bounds_are_monotone_in_level_and_sound():
    X = box([-1.0, -1.0], [1.0, 1.0])
    spec = ProblemSpec(F2, X=X)
    truth = _grid_min(F2, [-1, -1], [1, 1])
    bounds = [_bound(spec, HierarchyLevel(0, 0, ell, minimax_free=True)) for ell in (0, 1)]
    assert bounds[0] <= bounds[1] + 1e-6
    assert bounds[1] <= truth + 1e-6


def test_bounds_are_monotone_in_domain():
    small = ProblemSpec(F2, X=box([-0.5, -0.5], [0.5, 0.5]))
    large = ProblemSpec(F2, X=box([-1.0, -1.0], [1.0, 1.0]))
    lvl = HierarchyLevel(0, 0, 0, minimax_free=True)
    assert _bound(large, lvl) <= _bound(small, lvl) + 1e-6


def test_unconstrained_whole_space_is_weaker_than_box():
    f = Signomial([[2.0], [-2.0], [1.0]], [1.0, 1.0, -2.5])
    lvl = HierarchyLevel(0, 0, 0, minimax_free=True)
    b_box = _bound(ProblemSpec(f, X=box([-1.0], [1.0])), lvl)
    b_all = _bound(ProblemSpec(f, X=whole_space(1)), lvl)
    assert b_all <= b_box + 1e-6


def test_posynomial_bound_is_exact():
    # a posynomial minus gamma has one negative term, so the relaxation is exact
    f = Signomial([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0], [2.0, -1.0]], [1.0, 2.0, 0.5, 0.3])
    lo, hi = [-1.0, -2.0], [1.5, 0.5]
    spec = ProblemSpec(f, X=box(lo, hi))
    bound = _bound(spec, HierarchyLevel(0, 0, 0, minimax_free=True))
    truth = _grid_min(f, lo, hi, k=801)
    assert bound <= truth + 1e-6
    assert bound == pytest.approx(truth, abs=1e-3)


def test_soundness_on_ex1_samples(rng):
    case = ex1(0)
    res = solve_spec(case.spec, case.level)
    f, g = ex1_functions()
    X = case.spec.X
    lo, hi = X.coordinate_ranges()
    pts = rng.uniform(lo, hi, size=(20000, 3))
    feas = [p for p in pts if X.contains(p) and all(h(p) >= 0 for h in g)]
    assert len(feas) >= 10
    assert min(float(f(p)) for p in feas) >= res.bound - 1e-6


def test_translation_invariance():
    spec = ProblemSpec(F2, X=box([-1.0, -1.0], [1.0, 1.0]))
    lvl = HierarchyLevel(0, 0, 1, minimax_free=True)
    b0 = solve_spec(spec, lvl, center=None).bound
    b1 = solve_spec(spec, lvl, center=np.array([0.4, -0.7])).bound
    assert b1 == pytest.approx(b0, abs=1e-6 * max(1.0, abs(b0)))


def test_constrained_translation_invariance():
    g = Signomial([[0.0, 0.0], [1.0, 1.0]], [1.0, -1.0])  # x + y <= 0
    spec = ProblemSpec(F2, [g], X=box([-1.0, -1.0], [1.0, 1.0]))
    lvl = HierarchyLevel(0, 1, 0)
    b0 = solve_spec(spec, lvl, center=None).bound
    b1 = solve_spec(spec, lvl, center=np.array([-0.3, 0.2])).bound
    assert b1 == pytest.approx(b0, abs=1e-6 * max(1.0, abs(b0)))
    truth = _grid_min(F2, [-1, -1], [1, 1], g=[g])
    assert b0 <= truth + 1e-6


def test_lagrangian_without_constraints_equals_minimax_free():
    X = box([-1.0, -1.0], [1.0, 1.0])
    a = solve_level(sig_lagrangian(F2, [], [], X, 0, 1, 0)).bound
    b = solve_level(sig_minimax_free(F2, X, 0)).bound
    assert a == pytest.approx(b, abs=1e-6)


def test_minimax_free_rejects_constraints():
    g = Signomial([[0.0, 0.0], [1.0, 1.0]], [1.0, -1.0])
    spec = ProblemSpec(F2, [g], X=box([-1.0, -1.0], [1.0, 1.0]))
    with pytest.raises(ValueError):
        build_level(spec, HierarchyLevel(0, 0, 0, minimax_free=True))


def test_size_cap():
    prog = build_level(ex1(3).spec, ex1(3).level)
    with pytest.raises(HierarchyTooLarge):
        solve_level(prog, cap=10)


def test_polynomial_minimax_free_on_box():
    # x^4 - x^2 on [-1, 1]^1 has minimum -1/4 at |x| = 1/sqrt(2)
    f = Polynomial([[4], [2]], [1.0, -1.0])
    spec = ProblemSpec(f, X=log_box([1.0]), kind="polynomial")
    bound = _bound(spec, HierarchyLevel(0, 0, 0, minimax_free=True))
    assert bound == pytest.approx(-0.25, abs=1e-5)


def test_agreement_digits():
    assert agreement_digits(1.23456, 1.23459) == "1.2346"
    assert agreement_digits(2.0, 2.0).startswith("2.0")
