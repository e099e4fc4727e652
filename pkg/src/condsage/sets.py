"""Convex sets in conic form and their use inside conic models.

A :class:`ConicSet` is ``X = {x : exists u, A [x; u] + b in K}`` where ``K``
is a product of zero, nonnegative, second-order and exponential cones and
``u`` collects auxiliary coordinates (epigraph variables of posynomial
terms).  The support function ``sigma_X(lam) = sup{lam . x : x in X}`` is
bounded through conic duality by ``b . eta`` over ``eta`` in the dual cone
with ``A^T eta + [lam; 0] = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .conic import Expr, Model, cone_distance, lin, solve
from .symbolic import Polynomial, Signomial

CONE_KINDS = ("zero", "nonneg", "soc", "exp")


class ConicSet:
    """``{x in R^n : exists u in R^n_aux, A [x; u] + b in K}``."""

    def __init__(self, n: int, A=None, b=None, cones=(), n_aux: int = 0,
                 interior_point=None, constraints=None):
        self.n = int(n)
        self.n_aux = int(n_aux)
        width = self.n + self.n_aux
        self.A = sp.csr_matrix((0, width)) if A is None else sp.csr_matrix(A)
        self.b = np.zeros(0) if b is None else np.asarray(b, dtype=float).ravel()
        self.cones = [(str(k), int(d)) for k, d in cones]
        for kind, dim in self.cones:
            if kind not in CONE_KINDS:
                raise ValueError(f"unknown cone kind {kind!r}")
            if kind == "exp" and dim != 3:
                raise ValueError("exponential factors have dimension 3")
        if self.A.shape != (self.b.size, width):
            raise ValueError(f"A has shape {self.A.shape}, expected ({self.b.size}, {width})")
        if sum(d for _, d in self.cones) != self.b.size:
            raise ValueError("cone dimensions do not match the number of rows")
        # functions g with X = {g >= 0} when the set was built from constraints
        self.constraints = list(constraints) if constraints is not None else None
        self.interior_point = None
        if interior_point is not None:
            x0 = np.asarray(interior_point, dtype=float)
            if not self.contains(x0, tol=0.0, strict=True):
                raise ValueError("interior_point is not strictly inside the set")
            self.interior_point = x0

    @property
    def rows(self) -> int:
        return self.b.size

    @property
    def is_whole_space(self) -> bool:
        return self.rows == 0

    def count(self, kind: str) -> int:
        return sum(1 for k, _ in self.cones if k == kind)

    def __repr__(self):
        parts = ", ".join(f"{k}:{self.count(k)}" for k in CONE_KINDS if self.count(k))
        return f"ConicSet(n={self.n}, aux={self.n_aux}, {parts or 'whole space'})"

    # ------------------------------------------------------------ membership
    def contains(self, x, tol: float = 1e-8, strict: bool = False) -> bool:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise ValueError(f"point has shape {x.shape}, expected ({self.n},)")
        if self.constraints is not None:
            vals = np.array([g(x) for g in self.constraints])
            return bool(np.all(vals > 0) if strict else np.all(vals >= -tol))
        if self.n_aux == 0:
            r = self.A @ x + self.b
            return self._residual_ok(r, tol, strict)
        return self._contains_by_solve(x, tol)

    def _residual_ok(self, r, tol, strict):
        if not strict:
            perm, cones = _reorder(self)
            return cone_distance(r[perm], _flatten_cones(cones)) <= tol
        pos = 0
        for kind, dim in self.cones:
            seg = r[pos:pos + dim]
            if kind == "zero" and np.any(seg != 0):
                return False
            if kind == "nonneg" and np.any(seg <= 0):
                return False
            if kind == "soc" and not seg[0] > np.linalg.norm(seg[1:]):
                return False
            if kind == "exp" and not (seg[1] > 0 and seg[1] * np.exp(seg[0] / seg[1]) < seg[2]):
                return False
            pos += dim
        return True

    def _contains_by_solve(self, x, tol):
        m = Model()
        u = m.variable("u", self.n_aux)
        e = lin(self.A[:, self.n:], u) + (self.A[:, :self.n] @ x + self.b)
        m.add_cones(e, self.cones)
        sol = solve(m.compile())
        return sol.status in ("optimal", "inaccurate") and sol.residuals["primal"] <= max(tol, 1e-7)

    # ------------------------------------------------------------ algebra
    def intersect(self, *others) -> "ConicSet":
        return intersect(self, *others)

    def with_interior_point(self, x0) -> "ConicSet":
        return ConicSet(self.n, self.A, self.b, self.cones, self.n_aux, x0, self.constraints)

    def translate(self, d) -> "ConicSet":
        """``{x : x + d in X}``."""
        d = np.asarray(d, dtype=float)
        b = self.b + self.A[:, :self.n] @ d if self.rows else self.b
        cons = None
        if self.constraints is not None:
            cons = [_translate_fn(g, d) for g in self.constraints]
        x0 = None if self.interior_point is None else self.interior_point - d
        out = ConicSet(self.n, self.A, b, self.cones, self.n_aux, None, cons)
        out.interior_point = x0
        return out

    def coordinate_ranges(self):
        """Per-coordinate ``(lower, upper)`` over X (infinite when unbounded)."""
        lo = np.full(self.n, -np.inf)
        hi = np.full(self.n, np.inf)
        if self.is_whole_space:
            return lo, hi
        for j in range(self.n):
            e = np.zeros(self.n)
            e[j] = 1.0
            hi[j] = maximize_linear(self, e)[0]
            lo[j] = -maximize_linear(self, -e)[0]
        hi[~np.isfinite(hi)] = np.inf
        lo[~np.isfinite(lo)] = -np.inf
        return lo, hi

    def center(self) -> np.ndarray:
        """Midpoint of the coordinate ranges; one-sided ranges use their finite end."""
        lo, hi = self.coordinate_ranges()
        out = np.zeros(self.n)
        both = np.isfinite(lo) & np.isfinite(hi)
        out[both] = 0.5 * (lo[both] + hi[both])
        only_lo = np.isfinite(lo) & ~np.isfinite(hi)
        only_hi = np.isfinite(hi) & ~np.isfinite(lo)
        out[only_lo] = lo[only_lo]
        out[only_hi] = hi[only_hi]
        return out


def _translate_fn(g, d):
    if hasattr(g, "translate"):
        return g.translate(d)
    return lambda x, g=g: g(np.asarray(x, dtype=float) + d)


def _flatten_cones(cones) -> dict:
    """Cone list already in standard order -> standard-form counts."""
    out = {"z": 0, "l": 0, "q": [], "ep": 0}
    for kind, dim in cones:
        if kind == "zero":
            out["z"] += dim
        elif kind == "nonneg":
            out["l"] += dim
        elif kind == "soc":
            out["q"].append(dim)
        else:
            out["ep"] += 1
    return out


def _reorder(X: ConicSet):
    """Permute rows into standard order (zero, nonneg, soc, exp)."""
    order, pos = {k: [] for k in CONE_KINDS}, 0
    for kind, dim in X.cones:
        order[kind].append(np.arange(pos, pos + dim))
        pos += dim
    idx = [i for k in CONE_KINDS for i in order[k]]
    perm = np.concatenate(idx) if idx else np.zeros(0, dtype=int)
    cones = [(k, len(i)) for k in CONE_KINDS for i in order[k]]
    return perm, cones


def whole_space(n: int) -> ConicSet:
    if n < 1:
        raise ValueError("dimension must be positive")
    return ConicSet(n, interior_point=np.zeros(n), constraints=[])


def linear_set(G, h, n: int | None = None, equalities=None) -> ConicSet:
    """``{x : G x + h >= 0}``, optionally with ``E x + f = 0`` rows."""
    G = np.atleast_2d(np.asarray(G, dtype=float))
    h = np.asarray(h, dtype=float).ravel()
    n = G.shape[1] if n is None else n
    A, b, cones = [G], [h], [("nonneg", h.size)] if h.size else []
    if equalities is not None:
        E, f = equalities
        E = np.atleast_2d(np.asarray(E, dtype=float))
        f = np.asarray(f, dtype=float).ravel()
        A, b, cones = [E] + A, [f] + b, [("zero", f.size)] + cones
    return ConicSet(n, np.vstack(A), np.concatenate(b), cones)


def box(lower, upper) -> ConicSet:
    """Coordinate box ``lower <= x <= upper`` (infinite bounds omitted)."""
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    n = lower.size
    I = np.eye(n)
    rows, rhs = [], []
    for j in range(n):
        if np.isfinite(lower[j]):
            rows.append(I[j])
            rhs.append(-lower[j])
        if np.isfinite(upper[j]):
            rows.append(-I[j])
            rhs.append(upper[j])
    if not rows:
        return whole_space(n)
    return linear_set(np.array(rows), np.array(rhs), n)


def from_posynomial_leq(constraints, n: int | None = None) -> ConicSet:
    """``{x : g_i(x) <= u_i}`` for signomials ``g_i`` with nonnegative coefficients.

    A term ``c exp(a . x)`` becomes the exponential-cone factor
    ``(a . x + log c, 1, t) in K_exp`` with ``sum t <= u`` as a linear row.
    Single-term constraints are linear: ``a . x <= log(u / c)``.
    """
    constraints = list(constraints)
    if n is None:
        n = constraints[0][0].n
    lin_rows, lin_rhs = [], []
    exp_blocks = []  # (alpha rows, log c, u)
    for g, u in constraints:
        if g.n != n:
            raise ValueError("dimension mismatch in posynomial constraint")
        if np.any(g.c < 0):
            raise ValueError("posynomial constraint has a negative coefficient")
        u = float(u)
        if u <= 0:
            raise ValueError("posynomial bound must be positive")
        a, c = g.alpha.astype(float), g.c
        keep = c > 0
        a, c = a[keep], c[keep]
        if c.size == 0:
            continue
        if c.size == 1:
            # log(u/c) - a.x >= 0
            lin_rows.append(-a[0])
            lin_rhs.append(np.log(u / c[0]))
        else:
            exp_blocks.append((a, np.log(c), u))
    n_aux = sum(a.shape[0] for a, _, _ in exp_blocks)
    width = n + n_aux
    rows, rhs, cones = [], [], []
    for r, h in zip(lin_rows, lin_rhs):
        rows.append(np.concatenate([r, np.zeros(n_aux)]))
        rhs.append(h)
    pos = n
    for a, logc, u in exp_blocks:
        k = a.shape[0]
        # u - sum t >= 0
        r = np.zeros(width)
        r[pos:pos + k] = -1.0
        rows.append(r)
        rhs.append(u)
        pos += k
    if rows:
        cones.append(("nonneg", len(rows)))
    pos = n
    for a, logc, u in exp_blocks:
        for j in range(a.shape[0]):
            rx = np.zeros(width)
            rx[:n] = a[j]
            ry = np.zeros(width)
            rt = np.zeros(width)
            rt[pos + j] = 1.0
            rows += [rx, ry, rt]
            rhs += [logc[j], 1.0, 0.0]
            cones.append(("exp", 3))
        pos += a.shape[0]
    A = np.array(rows) if rows else np.zeros((0, width))
    funcs = [u - g for g, u in constraints]
    return ConicSet(n, A, np.array(rhs), cones, n_aux=n_aux, constraints=funcs)


def posynomial_form(g: Signomial):
    """Rewrite ``g >= 0`` with one positive term as ``h <= 1`` for a posynomial ``h``."""
    pos = np.flatnonzero(g.c > 0)
    if pos.size != 1:
        raise ValueError("constraint must have exactly one positive coefficient "
                         "to be represented in conic form")
    k = pos[0]
    cp, ap = g.c[k], g.alpha[k].astype(float)
    neg = np.flatnonzero(g.c < 0)
    if neg.size == 0:
        return None
    a = g.alpha[neg].astype(float) - ap
    return Signomial(a, -g.c[neg] / cp)


def from_signomial_constraints(gs, n: int | None = None) -> ConicSet:
    """``{x : g(x) >= 0 for g in gs}`` for signomials with one positive term each."""
    gs = list(gs)
    if not gs:
        if n is None:
            raise ValueError("dimension required for an empty constraint list")
        return whole_space(n)
    n = gs[0].n if n is None else n
    posy = []
    for g in gs:
        h = posynomial_form(g)
        if h is not None:
            posy.append((h, 1.0))
    X = from_posynomial_leq(posy, n) if posy else whole_space(n)
    X.constraints = list(gs)
    return X


def intersect(*sets) -> ConicSet:
    sets = [S for S in sets if S is not None]
    n = sets[0].n
    if any(S.n != n for S in sets):
        raise ValueError("dimension mismatch in intersection")
    n_aux = sum(S.n_aux for S in sets)
    blocks, bs, cones = [], [], []
    pos = 0
    for S in sets:
        Ax = S.A[:, :S.n]
        Au = sp.csr_matrix((S.rows, n_aux))
        if S.n_aux:
            Au = sp.hstack([sp.csr_matrix((S.rows, pos)), S.A[:, S.n:],
                            sp.csr_matrix((S.rows, n_aux - pos - S.n_aux))])
        blocks.append(sp.hstack([Ax, Au]))
        bs.append(S.b)
        cones += S.cones
        pos += S.n_aux
    A = sp.vstack(blocks) if blocks else None
    cons = None
    if all(S.constraints is not None for S in sets):
        cons = [g for S in sets for g in S.constraints]
    return ConicSet(n, A, np.concatenate(bs), cones, n_aux=n_aux, constraints=cons)


# --------------------------------------------------------- model fragments

def support_epigraph(model: Model, X: ConicSet, lam: Expr):
    """Add ``eta in K*``, ``A^T eta + [lam; 0] = 0`` and return ``b . eta``.

    The returned scalar expression upper-bounds ``sigma_X(lam)`` and equals it
    when ``X`` satisfies Slater's condition.
    """
    if lam.size != X.n:
        raise ValueError("lambda has the wrong length")
    if X.is_whole_space:
        model.add_zero(lam)
        return Expr.constant([0.0])
    eta = model.variable("eta", X.rows)
    model.add_dual_cones(eta, X.cones)
    At = X.A.T.tocsr()
    model.add_zero(lin(At[:X.n], eta) + lam)
    if X.n_aux:
        model.add_zero(lin(At[X.n:], eta))
    return eta.dot(X.b)


def cone_over(model: Model, X: ConicSet, z: Expr, t: Expr):
    """Add ``A [z; w] + t b in K`` and ``t >= 0`` (closed homogenization of X)."""
    model.add_nonneg(t)
    if X.is_whole_space:
        return None
    e = lin(X.A[:, :X.n], z) + _times(X.b, t)
    w = None
    if X.n_aux:
        w = model.variable("w", X.n_aux)
        e = e + lin(X.A[:, X.n:], w)
    model.add_cones(e, X.cones)
    return w


def _times(b, t: Expr) -> Expr:
    """The column vector ``b`` times the scalar expression ``t``."""
    return lin(np.asarray(b, dtype=float).reshape(-1, 1), t)


def support_value(X: ConicSet, lam) -> float:
    """Numerical ``sigma_X(lam)`` through the dual bound (inf when unbounded)."""
    m = Model()
    lam_e = Expr.constant(np.asarray(lam, dtype=float))
    val = support_epigraph(m, X, lam_e)
    m.minimize(val)
    sol = solve(m.compile())
    if sol.status == "primal_infeasible":
        return np.inf
    return float(sol.primal_objective) + 0.0


def maximize_linear(X: ConicSet, lam):
    """``sup{lam . x : x in X}`` solved directly over X (returns value, point)."""
    m = Model()
    x = m.variable("x", X.n)
    if not X.is_whole_space:
        e = lin(X.A[:, :X.n], x) + X.b
        if X.n_aux:
            u = m.variable("u", X.n_aux)
            e = e + lin(X.A[:, X.n:], u)
        m.add_cones(e, X.cones)
    m.maximize(x.dot(np.asarray(lam, dtype=float)))
    prog = m.compile()
    sol = solve(prog)
    if sol.status == "dual_infeasible":
        return np.inf, None
    return prog.model_value(sol.primal_objective), prog.var(sol.x, "x")


# --------------------------------------------------- sign-symmetric domains

@dataclass
class SignSymmetricDomain:
    """Polynomial domain described through ``Y = {y : x = exp(y) allowed}``.

    ``nonneg_orthant`` means ``X = closure(exp(Y))`` inside the nonnegative
    orthant; ``sign_symmetric`` means ``X = closure{x : log|x| in Y}``.
    """

    Y: ConicSet
    sign_symmetric: bool = True
    nonneg_orthant: bool = False

    def __post_init__(self):
        if self.sign_symmetric == self.nonneg_orthant:
            raise ValueError("exactly one of sign_symmetric and nonneg_orthant must hold")

    @property
    def n(self) -> int:
        return self.Y.n

    def contains(self, x, tol: float = 1e-8) -> bool:
        x = np.asarray(x, dtype=float)
        if self.nonneg_orthant and np.any(x < -tol):
            return False
        ax = np.abs(x)
        if np.any(ax == 0):
            # boundary points: test a slightly shifted copy inside the closure
            ax = np.maximum(ax, 1e-300)
        return self.Y.contains(np.log(ax), tol=tol)

    def translate(self, d) -> "SignSymmetricDomain":
        """Domain of ``xhat`` where ``x = exp(d) * xhat``."""
        return SignSymmetricDomain(self.Y.translate(d), self.sign_symmetric,
                                   self.nonneg_orthant)

    def intersect(self, other: ConicSet) -> "SignSymmetricDomain":
        return SignSymmetricDomain(intersect(self.Y, other), self.sign_symmetric,
                                   self.nonneg_orthant)


def _bounds_set(lo_log, hi_log) -> ConicSet:
    return box(lo_log, hi_log)


def log_box(a, orthant: bool = False) -> SignSymmetricDomain:
    """``|x_j| <= a_j`` as ``y_j <= log a_j``."""
    a = np.atleast_1d(np.asarray(a, dtype=float))
    if np.any(a <= 0):
        raise ValueError("box half-widths must be positive")
    Y = _bounds_set(np.full(a.size, -np.inf), np.log(a))
    return SignSymmetricDomain(Y, sign_symmetric=not orthant, nonneg_orthant=orthant)


def log_annulus(lower, upper, orthant: bool = False) -> SignSymmetricDomain:
    """``lower_j <= |x_j| <= upper_j`` (use 0 / inf for missing bounds)."""
    lower = np.atleast_1d(np.asarray(lower, dtype=float))
    upper = np.atleast_1d(np.asarray(upper, dtype=float))
    if np.any(lower < 0) or np.any(upper <= 0):
        raise ValueError("bounds must be positive")
    with np.errstate(divide="ignore"):
        lo = np.log(lower)
    Y = _bounds_set(lo, np.log(upper))
    return SignSymmetricDomain(Y, sign_symmetric=not orthant, nonneg_orthant=orthant)


def log_ball(a: float, n: int, orthant: bool = False) -> SignSymmetricDomain:
    """``||x||_2 <= a`` as the posynomial constraint ``sum exp(2 y_j) <= a^2``."""
    if a <= 0:
        raise ValueError("radius must be positive")
    g = Signomial(2.0 * np.eye(n), np.ones(n))
    Y = from_posynomial_leq([(g, a * a)], n)
    return SignSymmetricDomain(Y, sign_symmetric=not orthant, nonneg_orthant=orthant)


def monomial_lower_bounds(alpha, a, n: int) -> ConicSet:
    """``a_i <= |x^alpha_i|`` as ``alpha_i . y >= log a_i``."""
    alpha = np.atleast_2d(np.asarray(alpha, dtype=float))
    a = np.atleast_1d(np.asarray(a, dtype=float))
    if np.any(a <= 0):
        raise ValueError("bounds must be positive")
    return linear_set(alpha, -np.log(a), n)


def orthant_domain(n: int, constraints=()) -> SignSymmetricDomain:
    """Nonnegative-orthant domain cut out by polynomial constraints in ``y``.

    Each polynomial constraint must have one positive coefficient so that it
    becomes a posynomial inequality after ``x = exp(y)``.
    """
    gs = [g.as_signomial() if isinstance(g, Polynomial) else g for g in constraints]
    Y = from_signomial_constraints(gs, n) if gs else whole_space(n)
    return SignSymmetricDomain(Y, sign_symmetric=False, nonneg_orthant=True)


def infer_abs_bounds(lower, upper):
    """|x|-bounds implied by a coordinate box ``lower <= x <= upper``.

    Returns ``(amin, amax)`` with ``amin_j <= |x_j| <= amax_j`` for every x in
    the box (``amin_j = 0`` when the interval contains 0).
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    amax = np.maximum(np.abs(lower), np.abs(upper))
    straddle = (lower <= 0) & (upper >= 0)
    amin = np.where(straddle, 0.0, np.minimum(np.abs(lower), np.abs(upper)))
    return amin, amax
