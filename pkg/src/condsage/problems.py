"""Benchmark problems and the random sparse quartic generator.

Each ``BenchmarkCase`` bundles a problem (objective, constraints, domain and
the partition of constraints between the domain and the Lagrangian), a
hierarchy level, the expected bound and a tolerance.  Geometric-form
problems are stored as exponential-form signomials: a geometric monomial
``prod y_j ** a_j`` becomes ``exp(a . x)`` with ``x = log y``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .problemfile import ProblemFile
from .relaxations import HierarchyLevel, ProblemSpec
from .symbolic import Polynomial, Signomial


@dataclass
class BenchmarkCase:
    """A problem file with its expected bound, tolerance and reference data."""

    id: str
    problem: ProblemFile
    expected: float | None = None
    tol: float | None = None
    expected_solution: np.ndarray | None = None
    expected_objective: float | None = None
    literature: float | None = None
    suite: str = "worked-examples"
    note: str = ""

    @property
    def spec(self) -> ProblemSpec:
        return self.problem.to_spec()

    @property
    def level(self) -> HierarchyLevel:
        return self.problem.level

    @property
    def geometric(self) -> bool:
        return self.problem.geometric

    def checked_problem(self) -> ProblemSpec:
        return self.problem.checked_spec()

    def settings(self, **overrides):
        return self.problem.settings(**overrides)

    def tolerance(self) -> float:
        if self.tol is not None:
            return self.tol
        if self.expected is None:
            return 1e-3
        return 1e-2 if abs(self.expected) >= 100 else 1e-3


def _file(kind, f, ineqs=(), eqs=(), domain=None, level=None, fold=(), lagrangian=None,
          recovery=None, geometric=False) -> ProblemFile:
    domain = dict(domain or {"type": "whole_space"})
    ineqs = list(ineqs)
    if fold or lagrangian is not None:
        part = {"domain": list(fold)}
        part["lagrangian"] = (list(lagrangian) if lagrangian is not None else
                              [i for i in range(len(ineqs)) if i not in fold])
        domain["partition"] = part
    return ProblemFile(kind, f.n, f, ineqs, list(eqs), domain, level or HierarchyLevel(),
                       dict(recovery or {}), geometric)


def _log_box(lo, hi):
    return {"type": "box", "lower": [float(v) for v in np.log(lo)],
            "upper": [float(v) for v in np.log(hi)]}


def _sig(terms, n):
    return Signomial.from_terms([(c, a) for c, a in terms], n)


def _e(n, *idx, power=1.0):
    """Exponent row with ``power`` at the listed coordinates (repeats add)."""
    a = np.zeros(n)
    for i in idx:
        a[i] += power
    return a


def _poly(terms, n):
    return Polynomial.from_terms([(c, a) for c, a in terms], n)


def _xpow(n, powers: dict):
    a = np.zeros(n, dtype=int)
    for j, k in powers.items():
        a[j] += k
    return a


def _bound_sigs(n, lower=None, upper=None):
    """``exp(x_j) - l_j >= 0`` and ``u_j - exp(x_j) >= 0`` for finite positive bounds."""
    out = []
    zero = np.zeros(n)
    if lower is not None:
        for j, lo in enumerate(lower):
            if lo is not None and lo > 0:
                out.append(_sig([(1.0, _e(n, j)), (-lo, zero)], n))
    if upper is not None:
        for j, hi in enumerate(upper):
            if hi is not None and np.isfinite(hi):
                out.append(_sig([(hi, zero), (-1.0, _e(n, j))], n))
    return out


# --------------------------------------------------------------- signomials

def ex1_functions():
    n = 3
    z = np.zeros(n)
    f = _sig([(0.5, [1, -1, 0]), (-1.0, [1, 0, 0]), (-5.0, [0, -1, 0])], n)
    g1 = _sig([(100.0, z), (-1.0, [0, 1, -1]), (-1.0, [0, 1, 0]), (-0.05, [1, 0, 1])], n)
    g = [g1] + _bound_sigs(n, lower=[70, 1, 0.5]) + _bound_sigs(n, upper=[150, 30, 21])
    return f, g


def ex1(ell: int = 0) -> BenchmarkCase:
    f, g = ex1_functions()
    table = {0: -147.85713, 1: -147.67225, 2: -147.66680, 3: -147.66666}
    pf = _file("signomial", f, g, fold=range(len(g)), lagrangian=[],
               level=HierarchyLevel(0, 0, ell, minimax_free=True))
    return BenchmarkCase(
        f"Ex1_l{ell}", pf, expected=table.get(ell), tol=1e-2,
        expected_solution=np.array([5.01063529, 3.40119660, -0.48450710]),
        expected_objective=-147.66666)


def ex2_functions():
    """Structural design problem in variables (log A1, log A2, log A3, log P)."""
    n = 4
    z = np.zeros(n)
    f = _sig([(1e4, _e(n, 0)), (1e4, _e(n, 1)), (1e4, _e(n, 2))], n)
    g1 = _sig([(1e4, z), (0.01, [-1, 0, 1, 0]), (-7.0711, [-1, 0, 0, 0])], n)
    g2 = _sig([(1e4, z), (0.00854, [-1, 0, 0, 1]), (-0.60385, [-1, 0, 0, 0]),
               (-0.60385, [0, -1, 0, 0])], n)
    phi = _sig([(70.7107, [-1, 0, 0, 0]), (-1.0, [-1, 0, 0, 1]), (-1.0, [0, 0, -1, 1])], n)
    lower = [1e-8, 7.0711e-4, 1e-8, 1e-8]
    upper = [1.0, 1.0, 1.0, 1.0]
    return f, [g1, g2], [phi], lower, upper


def ex2() -> BenchmarkCase:
    f, g, phi, lo, hi = ex2_functions()
    pf = _file("signomial", f, g, phi, _log_box(lo, hi), HierarchyLevel(0, 1, 0),
               geometric=True)
    return BenchmarkCase("Ex2", pf, expected=14.1423, tol=1e-2)


def ex2_substituted_functions():
    """Ex2 with ``P = 70.7107 A3 / (A1 + A3)`` eliminated; variables log A1..A3."""
    n = 3
    z = np.zeros(n)
    f = _sig([(1e4, _e(n, 0)), (1e4, _e(n, 1)), (1e4, _e(n, 2))], n)
    g1 = _sig([(1e4, z), (0.01, [-1, 0, 1]), (-7.0711, [-1, 0, 0])], n)
    k = 0.00854 * 70.7107
    # (A1 + A3) * g2 after substitution
    g2 = _sig([(1e4, _e(n, 0)), (1e4, _e(n, 2)), (k, [-1, 0, 1]), (-0.60385, z),
               (-0.60385, [-1, 0, 1]), (-0.60385, [1, -1, 0]), (-0.60385, [0, -1, 1])], n)
    # 1e-8 <= P <= 1 after clearing A1 + A3
    p_hi = _sig([(1.0, _e(n, 0)), (1.0 - 70.7107, _e(n, 2))], n)
    p_lo = _sig([(70.7107 - 1e-8, _e(n, 2)), (-1e-8, _e(n, 0))], n)
    lower = [1e-8, 7.0711e-4, 1e-8]
    upper = [1.0, 1.0, 1.0]
    return f, [g1, g2, p_hi, p_lo], lower, upper


def ex2_substituted() -> BenchmarkCase:
    f, g, lo, hi = ex2_substituted_functions()
    pf = _file("signomial", f, g, (), _log_box(lo, hi), HierarchyLevel(0, 1, 0),
               geometric=True)
    return BenchmarkCase(
        "Ex2_sub", pf, expected=14.1423, tol=1e-2,
        expected_solution=np.log([7.0711e-4, 7.0711e-4, 1e-8]), expected_objective=14.1423)


def ex5_functions():
    n = 4
    z = np.zeros(n)
    f = _sig([(2.0, z), (-1.0, [1, 1, 1, 0])], n)
    g1 = _sig([(4.0, z), (-1.0, [0, 0, 1, 0]), (-15.0, [0, 1, 1, 0]), (-15.0, [0, 0, 1, 1])], n)
    g = [g1] + _bound_sigs(n, upper=[1, 1, 1, 2]) + _bound_sigs(n, lower=[0.1] * 4)
    phi = _sig([(1.0, _e(n, 0)), (2.0, _e(n, 1)), (2.0, _e(n, 2)), (-1.0, _e(n, 3))], n)
    return f, g, [phi]


def ex5() -> BenchmarkCase:
    f, g, phi = ex5_functions()
    pf = _file("signomial", f, g, phi, level=HierarchyLevel(1, 1, 0), fold=range(len(g)),
               lagrangian=range(len(g)))
    return BenchmarkCase("Ex5", pf, expected=1.92592593, tol=1e-4,
                         expected_objective=1.92592593, suite="yan")


def ex6_functions():
    n = 3
    z = np.zeros(n)
    f = _sig([(1.0, [0.6, 1, 0]), (1.0, [0, 1, -0.5]), (15.98, [1, 0, 0]),
              (9.0824, [0, 2, 0]), (-60.72625, [0, 0, 1])], n)
    g1 = _sig([(1.0, [0, -2, 1]), (-1.0, [1, -2, 0]), (-0.48, z)], n)
    g2 = _sig([(1.0, [0.5, 0, 2]), (-1.0, [0.25, 0, 1]), (-1.0, [0, 2, 0]), (-5.75, z)], n)
    bounds = _bound_sigs(n, lower=[0.1] * 3, upper=[1000] * 3)
    phi1 = _sig([(1.0, [2, 0, 0]), (4.0, [0, 2, 0]), (2.0, [0, 0, 2]), (-58.0, z)], n)
    phi2 = _sig([(1.0, [1, -1, 2.5]), (1.0, [0, 1, 1]), (-1.0, [0, 2, 0]), (-16.55, z)], n)
    return f, [g1, g2], bounds, [phi1, phi2]


def ex6() -> BenchmarkCase:
    f, g, bounds, phi = ex6_functions()
    every = g + bounds
    pf = _file("signomial", f, every, phi, level=HierarchyLevel(0, 1, 0),
               fold=range(len(every)), lagrangian=range(len(g)),
               recovery={"eps_ineq": 1e-8, "eps_eq": 1e-6}, geometric=True)
    return BenchmarkCase("Ex6", pf, expected=-320.722913, tol=1e-2,
                         expected_objective=-320.722913, suite="yan")


def ex7_functions():
    n = 3
    z = np.zeros(n)
    f = _sig([(0.5, [1, -1, 0]), (-1.0, [1, 0, 0]), (-5.0, [0, -1, 0])], n)
    g1 = _sig([(100.0, z), (-1.0, [0, 1, -1]), (-1.0, [1, 0, 0]), (-0.05, [1, 0, 1])], n)
    g = [g1] + _bound_sigs(n, upper=[100] * 3) + _bound_sigs(n, lower=[1] * 3)
    return f, g


def ex7(ell: int = 3) -> BenchmarkCase:
    f, g = ex7_functions()
    pf = _file("signomial", f, g, fold=range(len(g)), lagrangian=[],
               level=HierarchyLevel(0, 0, ell, minimax_free=True))
    return BenchmarkCase(f"Ex7_l{ell}", pf, expected=-83.2510 if ell == 3 else None,
                         tol=1e-2, literature=-83.06, suite="rm1978")


def ex8_functions():
    n = 10
    z = np.zeros(n)
    f = _sig([(0.05, _e(n, 0)), (0.05, _e(n, 1)), (0.05, _e(n, 2)), (1.0, _e(n, 8))], n)

    def d(*pairs):
        a = np.zeros(n)
        for j, s in pairs:
            a[j] += s
        return a

    g = [
        _sig([(1.0, z), (0.5, d((0, 1), (3, 1), (6, -1))), (-1.0, d((9, 1), (6, -1)))], n),
        _sig([(1.0, z), (0.5, d((1, 1), (4, 1), (7, -1))), (-1.0, d((6, 1), (7, -1)))], n),
        _sig([(1.0, z), (0.5, d((2, 1), (5, 1), (8, -1))), (-1.0, d((7, 1), (8, -1)))], n),
        _sig([(1.0, z), (-0.25, d((9, -1))), (-0.5, d((8, 1), (9, -1)))], n),
        _sig([(1.0, z), (-0.79681, d((3, 1), (6, -1)))], n),
        _sig([(1.0, z), (-0.79681, d((4, 1), (7, -1)))], n),
        _sig([(1.0, z), (-0.79681, d((5, 1), (8, -1)))], n),
    ]
    return f, g


def ex8() -> BenchmarkCase:
    f, g = ex8_functions()
    pf = _file("signomial", f, g, level=HierarchyLevel(1, 1, 0))
    return BenchmarkCase("Ex8", pf, expected=0.2056534, tol=1e-4, expected_objective=0.20565341,
                         suite="rm1978")


EX9_LOWER = np.array([1.0, 1, 9, 9, 9, 1, 1.0, 1, 1, 1, 50, 0.0, 1.0, 50, 50])
EX9_UPPER = np.array([8.037732, 9, 9, 9, 9, 1, 4.518866, 9, 9, 9, 100, 50, 50, 50, 50])


def ex9_functions():
    """Returns ``(f, g_domain, g_lagrangian, bound_sigs)`` in exponential form.

    The domain receives every bound constraint, the first nine inequalities
    except ``y11 - y12 <= 50`` and ``2 y7 - y1 <= 1``, and the convex
    constraint ``y6 y11 + y1 y12 - y7 y11 + y6 y12 <= 0``.
    """
    n = 15

    def m(*idx):
        return _e(n, *[i - 1 for i in idx])

    z = np.zeros(n)
    S = lambda terms: _sig(terms, n)  # noqa: E731
    f = S([(12.62626, m(12)), (-1.231059, m(1, 12)), (12.62626, m(13)),
           (-1.231059, m(2, 13)), (12.62626, m(14)), (-1.231059, m(3, 14)),
           (12.62626, m(15)), (-1.231059, m(4, 15))])
    # each h(y) <= 0 is stored as -h(y) >= 0
    first = [
        S([(1.0, m(11)), (-1.0, m(12))]),
        S([(50.0, z), (1.0, m(12)), (-1.0, m(11))]),
        S([(1.0, m(4)), (-1.0, m(10))]),
        S([(1.0, m(10)), (-1.0, m(9))]),
        S([(1.0, m(9)), (-1.0, m(8))]),
        S([(1.0, z), (1.0, m(1)), (-2.0, m(7))]),
        S([(1.0, m(4)), (-1.0, m(3))]),
        S([(1.0, m(3)), (-1.0, m(2))]),
        S([(1.0, m(2)), (-1.0, m(1))]),
    ]
    rest = [
        S([(-50.0, m(4)), (-1.0, m(10, 15)), (50.0, m(10)), (1.0, m(4, 15))]),
        S([(-50.0, m(10)), (-1.0, m(4, 5)), (-1.0, m(9, 14)), (50.0, m(9)),
           (1.0, m(3, 14)), (1.0, m(8, 15))]),
        S([(-50.0, m(7)), (-1.0, m(2, 13)), (-1.0, m(7, 12)), (50.0, m(8)),
           (1.0, m(1, 12)), (1.0, m(8, 13))]),
        S([(-50.0, m(8)), (-1.0, m(1, 12)), (-1.0, m(8, 13)), (50.0, m(7)),
           (1.0, m(2, 13)), (1.0, m(7, 12))]),
        S([(500.0, z), (-50.0, m(8)), (-50.0, m(9)), (-1.0, m(3, 14)), (-1.0, m(8, 13)),
           (1.0, m(2, 13)), (1.0, m(9, 14))]),
        # y6 y11 + y1 y12 - y7 y11 + y6 y12 <= 0: a single negative term keeps it
        # log-convex, so it can be folded into X
        S([(-1.0, m(6, 11)), (-1.0, m(1, 12)), (1.0, m(7, 11)), (-1.0, m(6, 12))]),
    ]
    for i in range(1, 6):
        rest.append(S([(-100.0, m(i + 5)), (-0.0975, m(i, i)), (3.475, m(i)),
                       (9.75, m(i, i + 5))]))
    lower = [lo if lo > 0 else None for lo in EX9_LOWER]
    bounds = _bound_sigs(n, lower=lower, upper=EX9_UPPER)
    dom = [first[k] for k in (0, 2, 3, 4, 6, 7, 8)] + [rest[5]]
    lag = [first[1], first[5]] + rest[:5] + rest[6:]
    return f, dom, lag, bounds


def ex9() -> BenchmarkCase:
    f, dom, lag, bounds = ex9_functions()
    every = dom + lag + bounds
    a, b = len(dom), len(dom) + len(lag)
    pf = _file("signomial", f, every, level=HierarchyLevel(0, 1, 0),
               fold=list(range(a)) + list(range(b, len(every))), lagrangian=range(a, b),
               recovery={"eps_ineq": 100.0}, geometric=True)
    return BenchmarkCase("Ex9", pf, expected=156.2196, tol=1e-2,
                         expected_objective=156.219629, suite="contemporary")


# -------------------------------------------------------------- polynomials

def ex3() -> BenchmarkCase:
    n = 7
    terms = []
    for i in range(n):
        a = np.ones(n, dtype=int)
        a[i] = 0
        terms.append((-64.0, a))
    f = _poly(terms, n)
    pf = _file("polynomial", f, domain={"type": "log_box", "a": 0.5},
               level=HierarchyLevel(0, 0, 0, minimax_free=True))
    return BenchmarkCase("Ex3", pf, expected=-7.0, tol=1e-3, expected_objective=-7.0,
                         suite="polys")


def _bsos_functions(n: int, d: int):
    """``P{n}_{d}``-style problem: objective and constraints g1..g10 over pairs.

    Pairs ``(x_{2k-1}, x_{2k})`` share the structure of the six-variable
    degree-six instance with the degree-``d`` powers replaced accordingly.
    """
    if n % 2:
        raise ValueError("n must be even")
    pairs = [(2 * k, 2 * k + 1) for k in range(n // 2)]
    zero = np.zeros(n, dtype=int)
    f_terms = []
    for j in range(n):
        f_terms.append((1.0 if j % 2 == 0 else -1.0, _xpow(n, {j: d})))
    f_terms += [(1.0, _xpow(n, {0: 1})), (-1.0, _xpow(n, {1: 1}))]
    f = _poly(f_terms, n)
    shapes = [  # (coef, power) for x_a, (coef, power) for x_b, cross coef
        ((2.0, d), (3.0, 2), 2.0),
        ((2.0, 2), (5.0, 2), 3.0),
        ((3.0, 2), (2.0, 2), -4.0),
        ((1.0, 2), (6.0, 2), -4.0),
        ((1.0, 2), (4.0, d), -3.0),
    ]
    g = []
    for (ca, pa), (cb, pb), cx in shapes:
        terms = []
        for a, b in pairs:
            terms += [(ca, _xpow(n, {a: pa})), (cb, _xpow(n, {b: pb})),
                      (cx, _xpow(n, {a: 1, b: 1}))]
        g.append(_poly(terms, n))
    g += [Polynomial(zero.reshape(1, -1), [1.0]) - h for h in g[:5]]
    return f, g


def ex4_functions():
    return _bsos_functions(6, 6)


def ex4(variant: str = "orthant") -> BenchmarkCase:
    """``orthant``: X = R^6_+, g_hat = g3:10; ``aggressive``: g6:7 folded into X."""
    f, g = ex4_functions()
    if variant == "orthant":
        fold, lag, expected = [], list(range(2, 10)), -0.41288
    elif variant == "aggressive":
        fold, lag, expected = [5, 6], [2, 3, 4, 7, 8, 9], -0.47121
    elif variant == "aggressive_full":
        fold, lag, expected = [5, 6], list(range(2, 10)), -0.41288
    else:
        raise ValueError(f"unknown Ex4 variant {variant!r}")
    pf = _file("polynomial", f, g, domain={"type": "orthant"}, level=HierarchyLevel(1, 1, 0),
               fold=fold, lagrangian=lag)
    return BenchmarkCase(f"Ex4_{variant}", pf, expected=expected, tol=1e-3, suite="polys")


BSOS_EXPECTED = {  # name -> (minimum, level, unrefined recovery objective, refined objective)
    "P4_4": (-0.033538, (1, 1, 0), -0.033386, -0.033538),
    "P4_6": (-0.060693, (1, 1, 1), -0.057164, -0.060693),
    "P4_8": (-0.085813, (2, 1, 0), -0.066671, -0.085813),
    "P6_4": (-0.576959, (1, 1, 0), -0.570848, -0.576959),
    "P6_6": (-0.412878, (1, 1, 0), -0.412878, -0.412878),
    "P6_8": (-0.409020, (1, 1, 0), -0.409018, -0.409020),
    "P8_4": (-0.436026, (1, 1, 0), -0.436024, -0.436026),
    "P8_6": (-0.412878, (1, 1, 0), -0.412878, -0.412878),
}


def bsos(name: str) -> BenchmarkCase:
    n, d = (int(t) for t in name[1:].split("_"))
    f, g = _bsos_functions(n, d)
    expected, level, _, refined = BSOS_EXPECTED[name]
    pf = _file("polynomial", f, g, domain={"type": "orthant"}, level=HierarchyLevel(*level),
               fold=[], lagrangian=range(2, 10))
    return BenchmarkCase(name, pf, expected=expected, tol=1e-3,
                         expected_objective=refined, suite="bsos",
                         note="structure extrapolated from the six-variable instance")


def ex10() -> tuple[BenchmarkCase, BenchmarkCase]:
    n = 2
    f = _poly([(4.0, [2, 0]), (-2.1, [4, 0]), (1 / 3, [6, 0]), (1.0, [1, 1]),
               (-4.0, [0, 2]), (4.0, [0, 4])], n)
    dom = {"type": "sign_symmetric"}
    a = BenchmarkCase("Ex10_02", _file("polynomial", f, domain=dom,
                                       level=HierarchyLevel(0, 2, 0, minimax_free=True)),
                      expected=-1.031630, tol=1e-3, suite="polys")
    b = BenchmarkCase("Ex10_30", _file("polynomial", f, domain=dom,
                                       level=HierarchyLevel(3, 0, 0, minimax_free=True)),
                      expected=-1.0317, tol=1e-3, suite="polys")
    return a, b


def _box_constraints(lower, upper):
    n = len(lower)
    zero = np.zeros(n, dtype=int)
    g = []
    for j, lo in enumerate(lower):
        g.append(_poly([(1.0, _xpow(n, {j: 1})), (-lo, zero)], n))
    for j, hi in enumerate(upper):
        g.append(_poly([(hi, zero), (-1.0, _xpow(n, {j: 1}))], n))
    return g


def ex11() -> BenchmarkCase:
    n = 4
    x = lambda **k: _xpow(n, {int(i[1:]) - 1: v for i, v in k.items()})  # noqa: E731
    f = _poly([(-1.0, x(x1=1, x3=3)), (4.0, x(x2=1, x3=2, x4=1)), (4.0, x(x1=1, x3=1, x4=2)),
               (2.0, x(x2=1, x4=3)), (4.0, x(x1=1, x3=1)), (4.0, x(x3=2)),
               (-10.0, x(x2=1, x4=1)), (-10.0, x(x4=2)), (2.0, np.zeros(n, dtype=int))], n)
    g = _box_constraints([-0.5] * 4, [0.5] * 4)
    pf = _file("polynomial", f, g, domain={"type": "log_box", "a": 0.5},
               level=HierarchyLevel(1, 2, 0))
    return BenchmarkCase("Ex11", pf, expected=-3.1176903, tol=1e-3,
                         expected_objective=-3.1176903, suite="polys")


def ex12(conditional: bool = False) -> BenchmarkCase:
    n = 6
    x = lambda **k: _xpow(n, {int(i[1:]) - 1: v for i, v in k.items()})  # noqa: E731
    f = _poly([(1.0, x(x6=1, x2=2)), (1.0, x(x5=1, x3=2)), (-1.0, x(x1=1, x4=2)),
               (1.0, x(x4=3)), (1.0, x(x4=2)), (-1 / 3, x(x1=1)), (4 / 3, x(x4=1))], n)
    lower = [-1, -0.1, -0.1, -1, -0.1, -0.1]
    upper = [0, 0.9, 0.5, -0.1, -0.05, -0.03]
    g = _box_constraints(lower, upper)
    if conditional:
        dom = {"type": "log_annulus", "lower": [0, 0, 0, 0.1, 0.05, 0.03],
               "upper": [1, 0.9, 0.5, 1, 0.1, 0.1]}
    else:
        dom = {"type": "sign_symmetric"}
    pf = _file("polynomial", f, g, domain=dom, level=HierarchyLevel(0, 3, 0))
    return BenchmarkCase("Ex12" + ("_cond" if conditional else ""), pf,
                         expected=-1.4392999, tol=1e-3, expected_objective=-1.4392999,
                         suite="polys")


# ------------------------------------------------------------ random quartic

def sample_quartic_terms(n: int, seed: int):
    """Sampled ``(alpha, c)`` of the sparse random quartic, one row per kept tuple.

    Every tuple ``t`` in ``[n]^4`` is kept independently with probability
    ``n log n / n^4``; a kept tuple contributes ``c_t x^{alpha_t}`` with
    ``c_t ~ N(0, 1)`` and ``alpha_tj = |{i : t_i = j}|``.  Randomness comes
    from numpy's PCG64 generator seeded with ``seed``; the tuples are visited
    in lexicographic order, drawing one uniform per tuple and one normal per
    kept tuple.  Rows are not merged.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    rng = np.random.Generator(np.random.PCG64(seed))
    prob = n * math.log(n) / n ** 4
    u = rng.random(n ** 4)
    kept = np.flatnonzero(u < prob)
    coeffs = rng.standard_normal(kept.size)
    tuples = np.stack(np.unravel_index(kept, (n,) * 4), axis=1)
    alpha = np.zeros((kept.size, n), dtype=int)
    for col in range(4):
        np.add.at(alpha, (np.arange(kept.size), tuples[:, col]), 1)
    return alpha, coeffs


def random_quartic_functions(n: int, seed: int):
    """Sparse random quartic (see ``sample_quartic_terms``) and the unit-ball
    constraint ``1 - x.x >= 0``."""
    alpha, coeffs = sample_quartic_terms(n, seed)
    if coeffs.size == 0:
        f = Polynomial(np.zeros((0, n), dtype=int), [])
    else:
        f = Polynomial(alpha, coeffs)
    zero = np.zeros(n, dtype=int)
    g = _poly([(1.0, zero)] + [(-1.0, _xpow(n, {j: 2})) for j in range(n)], n)
    return f, g


def random_quartic(n: int, seed: int) -> BenchmarkCase:
    f, g = random_quartic_functions(n, seed)
    pf = _file("polynomial", f, [g], domain={"type": "log_ball", "a": 1.0},
               level=HierarchyLevel(0, 2, 0))
    return BenchmarkCase(f"quartic_n{n}_s{seed}", pf, suite="quartic")


# ------------------------------------------------------------------ suites

def suite(name: str) -> list[BenchmarkCase]:
    if name == "worked-examples":
        return ([ex1(l) for l in range(4)] + [ex2(), ex2_substituted(), ex3(),
                ex4("orthant"), ex4("aggressive"), ex5(), ex7(3), ex8(), *ex10(), ex11(),
                ex12(False), ex12(True)])
    if name == "rm1978":
        return [ex7(3), ex8()]
    if name == "contemporary":
        return [ex1(0), ex9()]
    if name == "polys":
        return [ex3(), *ex10(), ex11(), ex12(False), ex12(True), ex4("orthant"),
                ex4("aggressive")]
    if name == "bsos":
        return [bsos(k) for k in ("P6_4", "P6_6", "P6_8", "P8_4", "P8_6")]
    if name == "yan":
        return [ex2(), ex2_substituted(), ex5(), ex6()]
    raise ValueError(f"unknown suite {name!r}")


SUITES = ("worked-examples", "rm1978", "contemporary", "polys", "bsos", "yan")

__all__ = ["BenchmarkCase", "SUITES", "suite", "random_quartic", "sample_quartic_terms", "bsos",
           "ex1", "ex2", "ex2_substituted", "ex3", "ex4", "ex5", "ex6", "ex7", "ex8",
           "ex9", "ex10", "ex11", "ex12"]
