import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from condsage.conic import Expr, Model, solve
from condsage.problems import ex1_functions, ex10
from condsage.symbolic import (
    Polynomial,
    Signomial,
    canonicalize,
    even_lattice_mask,
    poly_eval,
    products_up_to,
    sig_eval,
    sigrep_block,
    union_basis,
)


def test_canonicalize_merges_duplicates():
    a, c = canonicalize(np.array([[1.0], [1.0]]), [2.0, 3.0])
    assert a.tolist() == [[1.0]]
    assert c.tolist() == [5.0]


def test_canonicalize_keeps_zero_rows_in_union_mode():
    a, c = canonicalize(np.array([[0.0], [1.0]]), [1.0, 0.0], keep_zeros=True)
    assert a.tolist() == [[0.0], [1.0]]
    assert c.tolist() == [1.0, 0.0]


def test_canonicalize_drops_zero_rows_by_default():
    a, c = canonicalize(np.array([[0.0], [1.0]]), [1.0, 0.0])
    assert a.tolist() == [[0.0]]


def test_canonicalize_rejects_length_mismatch():
    with pytest.raises(ValueError):
        canonicalize(np.array([[0.0], [1.0]]), [1.0])


def test_ex1_basis_union_counts_distinct_rows():
    f, g = ex1_functions()
    basis = union_basis(np.zeros((1, 3)), f.alpha, g[0].alpha)
    # the constant of g1 shares the zero row
    distinct = {tuple(r) for r in f.alpha.tolist()} | {tuple(r) for r in g[0].alpha.tolist()}
    distinct.add((0.0, 0.0, 0.0))
    assert basis.shape[0] == len(distinct) == 7


def test_sig_eval_examples():
    assert sig_eval(Signomial([[0], [1]], [1, 1]), [0.0]) == 2.0
    f, _ = ex1_functions()
    x = np.array([5.01063529, 3.40119660, -0.48450710])
    assert abs(sig_eval(f, x) + 147.66666) <= 1e-4


def test_amgm_signomial_is_nonnegative(rng):
    f = Signomial([[2, 0], [0, 2], [1, 1]], [0.5, 0.5, -1])
    X = rng.normal(size=(500, 2)) * 3
    assert np.all(f(X) >= -1e-9)


def test_sig_eval_overflow_propagates():
    f = Signomial([[1.0]], [1.0])
    with np.errstate(over="ignore"):
        assert f([1e4]) == np.inf


def test_poly_eval_examples():
    (case, _) = ex10()
    assert poly_eval(case.spec.f, [0.0, 0.0]) == 0.0
    n = 7
    terms = [(-64.0, [0 if j == i else 1 for j in range(n)]) for i in range(n)]
    f3 = Polynomial.from_terms(terms, n)
    assert poly_eval(f3, np.full(n, 0.5)) == pytest.approx(-7.0, abs=1e-12)


def test_power_zero_is_one():
    f = Signomial([[1.0, 0.0], [0.0, 2.0]], [3.0, -1.0])
    one = f ** 0
    assert one.alpha.tolist() == [[0.0, 0.0]]
    assert one.c.tolist() == [1.0]


def test_square_of_cosh_like_sum():
    f = Signomial([[1.0], [-1.0]], [1.0, 1.0])
    sq = f ** 2
    assert sq.alpha.ravel().tolist() == [-2.0, 0.0, 2.0]
    assert sq.c.tolist() == [1.0, 2.0, 1.0]


def test_modulator_square_row_count():
    f, g = ex1_functions()
    alpha = union_basis(np.zeros((1, 3)), f.alpha, g[0].alpha)
    W = Signomial(alpha, np.ones(alpha.shape[0])) ** 2
    sums = {tuple(np.round(a + b, 12)) for a, b in itertools.product(alpha, alpha)}
    assert W.m == len(sums)


def test_mul_dimension_mismatch():
    with pytest.raises(ValueError):
        Signomial([[1.0]], [1.0]) * Signomial([[1.0, 0.0]], [1.0])


def test_even_lattice_mask_examples():
    assert even_lattice_mask(np.array([[2, 0], [0, 2], [1, 1]])).tolist() == [True, True, False]
    assert even_lattice_mask(np.zeros((1, 3), dtype=int)).tolist() == [True]
    (case, _) = ex10()
    mask = even_lattice_mask(case.spec.f.alpha)
    assert mask.size == 6 and (~mask).sum() == 1
    odd_row = case.spec.f.alpha[~mask][0]
    assert odd_row.tolist() == [1, 1]


def test_even_lattice_mask_rejects_fractional():
    with pytest.raises(ValueError):
        even_lattice_mask(np.array([[0.5, 0.0]]))


def test_sigrep_all_even_is_identity():
    m = Model()
    blk = sigrep_block(m, np.array([[2, 0], [0, 2], [0, 0]]), [1.0, -2.0, 3.0])
    assert blk.hatc.constant_rows().all()
    assert blk.hatc.b.tolist() == [1.0, -2.0, 3.0]
    assert blk.dominations.size == 0


def test_sigrep_symbolic_domination():
    # c = (1, -2) with rows (even, odd): c_hat_1 = 1 and c_hat_2 <= -2
    m = Model()
    c = m.variable("c", 2)
    m.add_zero(c - np.array([1.0, -2.0]))
    blk = sigrep_block(m, np.array([[2], [1]]), c)
    m.maximize(blk.hatc[1])
    prog = m.compile()
    sol = solve(prog)
    assert sol.status == "optimal"
    hat = blk.hatc.value(sol.x)
    assert hat[0] == pytest.approx(1.0, abs=1e-7)
    assert hat[1] == pytest.approx(-2.0, abs=1e-6)


def test_translate_matches_shifted_evaluation(rng):
    f = Signomial(rng.normal(size=(5, 3)), rng.normal(size=5))
    d = rng.normal(size=3)
    x = rng.normal(size=3)
    assert f.translate(d)(x) == pytest.approx(f(x + d), rel=1e-12)
    p = Polynomial(rng.integers(0, 4, size=(5, 3)), rng.normal(size=5))
    assert p.translate(d)(x) == pytest.approx(p(np.exp(d) * x), rel=1e-12)


def test_products_up_to_counts():
    g = [Signomial([[1.0]], [1.0]), Signomial([[2.0]], [1.0]), Signomial([[3.0]], [1.0])]
    assert len(products_up_to(g, 1)) == 3
    assert len(products_up_to(g, 2)) == 3 + 6


rows = st.lists(st.lists(st.integers(-3, 3), min_size=2, max_size=2), min_size=1, max_size=5)
coefs = st.lists(st.floats(-5, 5, allow_nan=False), min_size=5, max_size=5)
points = st.lists(st.floats(-2, 2, allow_nan=False), min_size=2, max_size=2)


@settings(max_examples=60, deadline=None)
@given(rows, coefs, rows, coefs, points)
def test_product_is_evaluation_homomorphism(a1, c1, a2, c2, x):
    f = Signomial(np.array(a1, dtype=float), c1[:len(a1)])
    g = Signomial(np.array(a2, dtype=float), c2[:len(a2)])
    x = np.array(x)
    lhs = (f * g)(x)
    rhs = f(x) * g(x)
    scale = max(1.0, abs(f(x)) * abs(g(x)),
                float(np.abs(f.c).sum() * np.abs(g.c).sum() * np.exp(12)))
    assert abs(lhs - rhs) <= 1e-10 * scale


@settings(max_examples=60, deadline=None)
@given(rows, coefs)
def test_canonicalize_is_idempotent(a, c):
    a1, c1 = canonicalize(np.array(a, dtype=float), c[:len(a)])
    a2, c2 = canonicalize(a1, c1)
    assert np.array_equal(a1, a2) and np.array_equal(c1, c2)


nonneg_rows = st.lists(st.lists(st.integers(0, 4), min_size=2, max_size=2),
                       min_size=1, max_size=5)


@settings(max_examples=60, deadline=None)
@given(nonneg_rows, coefs, st.lists(st.floats(-3, 3, allow_nan=False).filter(lambda t: abs(t) > 1e-3),
                                     min_size=2, max_size=2))
def test_signomial_representative_lower_bounds_polynomial(a, c, x):
    alpha = np.array(a, dtype=np.int64)
    p = Polynomial(alpha, c[:len(a)])
    even = even_lattice_mask(p.alpha)
    chat = np.where(even, p.c, -np.abs(p.c))
    s = Signomial(p.alpha.astype(float), chat, keep_zeros=True)
    x = np.array(x)
    lhs = s(np.log(np.abs(x)))
    rhs = p(x)
    assert lhs <= rhs + 1e-9 * max(1.0, abs(rhs), float(np.abs(p.c).sum() * 3.0 ** 8))


def test_expr_constant_roundtrip():
    e = Expr.constant(np.array([1.0, 2.0]))
    assert e.constant_rows().all()
