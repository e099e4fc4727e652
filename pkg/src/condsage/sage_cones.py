"""Conditional AGE / SAGE cones and their duals as conic model fragments.

A coefficient vector ``c`` is X-AGE at index ``k`` when ``c_j >= 0`` for
``j != k`` and there is ``nu >= 0`` with::

    sigma_X(-[alpha_j - alpha_k]^T nu) + D(nu, c_{-k}) - sum(nu) <= c_k

where ``D`` is the relative entropy.  X-SAGE vectors are sums of X-AGE
vectors.  The dual cone is the intersection over ``i`` of the sets of
``v >= 0`` admitting ``z_i`` with ``(z_i, v_i)`` in the cone over ``X`` and
``v_i log(v_j / v_i) >= (alpha_j - alpha_i) . z_i``.

Row reduction
-------------
Entries of ``c`` are often affine expressions in which some rows are fixed
numbers.  Rows fixed at zero are dropped; rows fixed at a positive value get
no witness; a row fixed at a negative value appears only in its own witness.
Every remaining (non-constant) row gets a witness supported on all rows not
fixed negative.  For fully numeric ``c`` this is the usual reduction to one
witness per negative entry supported on the positive entries.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .conic import Expr, Model, lin, solve
from .sets import ConicSet, SignSymmetricDomain, whole_space
from .symbolic import even_lattice_mask, sigrep_block


@dataclass
class SagePattern:
    """Which rows carry AGE witnesses and what each witness is supported on."""

    m: int
    keep: np.ndarray
    witnesses: np.ndarray
    supports: list
    nonneg_const: np.ndarray
    const_mask: np.ndarray
    values: np.ndarray

    @property
    def n_exp(self) -> int:
        return int(sum(s.size - 1 for s in self.supports))


def sage_pattern(c, full: bool = False) -> SagePattern:
    """Row classification of ``c`` (numeric vector or affine expression)."""
    if isinstance(c, Expr):
        const = c.constant_rows()
        vals = c.b.copy()
    else:
        vals = np.asarray(c, dtype=float).ravel()
        const = np.ones(vals.size, dtype=bool)
    m = vals.size
    if full:
        const = np.zeros(m, dtype=bool)
    zero = const & (vals == 0)
    neg = const & (vals < 0)
    pos = const & (vals > 0)
    keep = np.flatnonzero(~zero)
    witnesses = np.flatnonzero(~const | neg)
    base = np.flatnonzero(~zero & ~neg)
    supports = [np.union1d(base, [k]).astype(int) for k in witnesses]
    return SagePattern(m, keep, witnesses, supports, np.flatnonzero(pos), const, vals)


def full_pattern(m: int) -> SagePattern:
    """Pattern with a witness for every row supported on every row."""
    idx = np.arange(m)
    return SagePattern(m, idx, idx, [idx.copy() for _ in idx], np.zeros(0, dtype=int),
                       np.zeros(m, dtype=bool), np.zeros(m))


def _pairs(pattern: SagePattern):
    """Flattened (witness position, witness row, other row) triples."""
    wpos, wk, wj = [], [], []
    for p, (k, S) in enumerate(zip(pattern.witnesses, pattern.supports)):
        others = S[S != k]
        wpos.append(np.full(others.size, p))
        wk.append(np.full(others.size, k))
        wj.append(others)
    cat = (lambda a: np.concatenate(a).astype(int) if a else np.zeros(0, dtype=int))
    return cat(wpos), cat(wk), cat(wj)


@dataclass
class SageCertificate:
    """Handles to the witness variables of one SAGE membership constraint."""

    pattern: SagePattern
    alpha: np.ndarray
    c: Expr
    coff: Expr | None
    nu: Expr | None
    ckk: Expr | None
    pairs: tuple
    extra: dict = field(default_factory=dict)

    def witness_vectors(self, x) -> list:
        """Per-witness coefficient vectors evaluated at a solution ``x``."""
        pat = self.pattern
        wpos, wk, wj = self.pairs
        out = []
        coff = self.coff.value(x) if self.coff is not None else np.zeros(0)
        ckk = self.ckk.value(x) if self.ckk is not None else np.zeros(0)
        for p, k in enumerate(pat.witnesses):
            vec = np.zeros(pat.m)
            sel = wpos == p
            vec[wj[sel]] = coff[sel]
            vec[k] = ckk[p]
            out.append(vec)
        return out

    def nu_vectors(self, x) -> list:
        pat = self.pattern
        wpos, wk, wj = self.pairs
        nu = self.nu.value(x) if self.nu is not None else np.zeros(0)
        out = []
        for p in range(pat.witnesses.size):
            vec = np.zeros(pat.m)
            sel = wpos == p
            vec[wj[sel]] = nu[sel]
            out.append(vec)
        return out


def _age_blocks(model: Model, alpha, X: ConicSet, c: Expr, pattern: SagePattern):
    """Compile all AGE witnesses of ``pattern`` at once."""
    alpha = np.asarray(alpha, dtype=float)
    n = alpha.shape[1]
    K = pattern.witnesses.size
    wpos, wk, wj = _pairs(pattern)
    T = wpos.size
    if K == 0:
        return SageCertificate(pattern, alpha, c, None, None, None, (wpos, wk, wj))

    # where witness rows appear as "other" rows of other witnesses
    w_index = -np.ones(pattern.m, dtype=int)
    w_index[pattern.witnesses] = np.arange(K)
    if T:
        coff = model.variable("sage_c", T)
        nu = model.variable("sage_nu", T)
        t = model.variable("sage_t", T)
        model.add_nonneg(coff)
        model.add_exp(-t, nu, coff)
        hit = w_index[wj] >= 0
        R = sp.csr_matrix((np.ones(hit.sum()), (w_index[wj[hit]], np.flatnonzero(hit))),
                          shape=(K, T))
        ckk = c[pattern.witnesses] - lin(R, coff)
        P = pattern.nonneg_const
        if P.size:
            p_index = -np.ones(pattern.m, dtype=int)
            p_index[P] = np.arange(P.size)
            hp = p_index[wj] >= 0
            Rp = sp.csr_matrix((np.ones(hp.sum()), (p_index[wj[hp]], np.flatnonzero(hp))),
                               shape=(P.size, T))
            model.add_nonneg(c[P] - lin(Rp, coff))
        G = sp.csr_matrix((np.ones(T), (wpos, np.arange(T))), shape=(K, T))
        entropy = lin(G, t) - lin(G, nu)
        # lambda_k = -sum_j nu_kj (alpha_j - alpha_k)
        D = alpha[wj] - alpha[wk]
        rows = (wpos[:, None] * n + np.arange(n)[None, :]).ravel()
        cols = np.repeat(np.arange(T), n)
        L = sp.csr_matrix((-D.ravel(), (rows, cols)), shape=(K * n, T))
        lam = lin(L, nu)
    else:
        coff = nu = None
        ckk = c[pattern.witnesses]
        entropy = Expr.constant(np.zeros(K))
        lam = Expr.constant(np.zeros(K * n))

    if X.is_whole_space:
        if T:
            model.add_zero(lam)
        sigma = Expr.constant(np.zeros(K))
    else:
        r = X.rows
        eta = model.variable("sage_eta", K * r)
        model.add_dual_cones(eta, X.cones * K)
        At = X.A.T.tocsr()
        IK = sp.identity(K, format="csr")
        model.add_zero(lin(sp.kron(IK, At[:X.n]), eta) + lam)
        if X.n_aux:
            model.add_zero(lin(sp.kron(IK, At[X.n:]), eta))
        sigma = lin(sp.kron(IK, sp.csr_matrix(X.b.reshape(1, -1))), eta)
    model.add_nonneg(ckk - entropy - sigma)
    return SageCertificate(pattern, alpha, c, coff, nu, ckk, (wpos, wk, wj))


def age_membership(model: Model, alpha, k: int, X: ConicSet, c: Expr) -> SageCertificate:
    """Constrain ``c`` (length m) to the X-AGE cone at index ``k``.

    Entries off ``k`` must be nonnegative; they all enter the certificate.
    """
    c = c if isinstance(c, Expr) else Expr.constant(c)
    m = c.size
    if not 0 <= k < m:
        raise ValueError("AGE index out of range")
    others = np.delete(np.arange(m), k)
    model.add_nonneg(c[others])
    # one witness at k over all rows; nonneg rows are absorbed with zero slack
    pattern = SagePattern(m, np.arange(m), np.array([k]), [np.arange(m)],
                          others, np.zeros(m, dtype=bool), np.zeros(m))
    cert = _age_blocks(model, alpha, X, c, _age_only(pattern))
    # the other rows must be fully used by this single witness
    wpos, wk, wj = cert.pairs
    if cert.coff is not None:
        model.add_zero(c[wj] - cert.coff)
    return cert


def _age_only(pattern: SagePattern) -> SagePattern:
    return SagePattern(pattern.m, pattern.keep, pattern.witnesses, pattern.supports,
                       np.zeros(0, dtype=int), pattern.const_mask, pattern.values)


def sage_membership(model: Model, alpha, X: ConicSet, c, full: bool = False) -> SageCertificate:
    """Constrain ``c`` to the X-SAGE cone over ``alpha``.

    With ``full`` set every row gets a witness over every row, regardless of
    which entries are known constants.
    """
    c = c if isinstance(c, Expr) else Expr.constant(c)
    pattern = full_pattern(c.size) if full else sage_pattern(c)
    return _age_blocks(model, alpha, X, c, pattern)


@dataclass
class DualSageHandles:
    """Dual SAGE variables: the moment vector and one ``z_i`` per block."""

    pattern: SagePattern
    alpha: np.ndarray
    v: Expr
    z: Expr | None
    extra: dict = field(default_factory=dict)

    def blocks(self, x):
        """``(i, v_i, z_i)`` for every dual AGE block, evaluated at ``x``."""
        n = self.alpha.shape[1]
        v = self.v.value(x)
        if self.z is None:
            return []
        Z = self.z.value(x).reshape(-1, n)
        return [(int(i), float(v[i]), Z[p]) for p, i in enumerate(self.pattern.witnesses)]


def dual_age_constraints(model: Model, alpha, i: int, X: ConicSet, v: Expr, z=None):
    """Constrain ``v`` to the dual of the X-AGE cone at index ``i``."""
    m = v.size
    pattern = SagePattern(m, np.arange(m), np.array([i]), [np.arange(m)],
                          np.zeros(0, dtype=int), np.zeros(m, dtype=bool), np.zeros(m))
    return _dual_blocks(model, alpha, X, v, pattern, z=z)


def _dual_blocks(model: Model, alpha, X: ConicSet, v: Expr, pattern: SagePattern, z=None):
    alpha = np.asarray(alpha, dtype=float)
    n = alpha.shape[1]
    K = pattern.witnesses.size
    model.add_nonneg(v[pattern.keep])
    if K == 0:
        return DualSageHandles(pattern, alpha, v, None)
    Z = model.variable("dual_z", K * n) if z is None else z
    wpos, wk, wj = _pairs(pattern)
    T = wpos.size
    if T:
        D = alpha[wj] - alpha[wk]
        rows = np.repeat(np.arange(T), n)
        cols = (wpos[:, None] * n + np.arange(n)[None, :]).ravel()
        Dz = lin(sp.csr_matrix((D.ravel(), (rows, cols)), shape=(T, K * n)), Z)
        model.add_exp(Dz, v[wk], v[wj])
    vi = v[pattern.witnesses]
    if not X.is_whole_space:
        IK = sp.identity(K, format="csr")
        Ax = sp.kron(IK, X.A[:, :X.n])
        Bt = sp.kron(IK, sp.csr_matrix(X.b.reshape(-1, 1)))
        e = lin(Ax, Z) + lin(Bt, vi)
        if X.n_aux:
            W = model.variable("dual_w", K * X.n_aux)
            e = e + lin(sp.kron(IK, X.A[:, X.n:]), W)
        model.add_cones(e, X.cones * K)
    return DualSageHandles(pattern, alpha, v, Z)


def dual_sage_constraints(model: Model, alpha, X: ConicSet, v: Expr,
                          pattern: SagePattern | None = None) -> DualSageHandles:
    """Constrain ``v`` to the dual X-SAGE cone.

    ``pattern`` restricts the blocks to the witnesses of the matching primal
    representation; by default every index gets a block over every row.
    """
    pattern = full_pattern(v.size) if pattern is None else pattern
    return _dual_blocks(model, alpha, X, v, pattern)


# ------------------------------------------------------------- polynomials

def sigrep_pattern(alpha, c) -> tuple:
    """Constant rows and values of the signomial representative of ``c``."""
    even = even_lattice_mask(alpha)
    if isinstance(c, Expr):
        const = c.constant_rows()
        vals = c.b.copy()
    else:
        vals = np.asarray(c, dtype=float).ravel().copy()
        const = np.ones(vals.size, dtype=bool)
    vals = np.where(~even & const, -np.abs(vals), vals)
    return const, vals


def pattern_from_constants(const, vals) -> SagePattern:
    e = Expr(sp.csr_matrix((np.where(~const, 1.0, 0.0), (np.arange(const.size),
                           np.zeros(const.size, dtype=int))), shape=(const.size, 1)), vals)
    return sage_pattern(e)


def poly_sage_membership(model: Model, alpha, D: SignSymmetricDomain, c,
                         modulation=None) -> SageCertificate:
    """Constrain ``Poly(alpha, c)`` to be nonnegative on the domain ``D``.

    Orthant domains use the signomial cone over ``Y`` directly.  Sign-symmetric
    domains introduce a signomial representative ``c_hat``.  ``modulation``
    optionally maps the representative to a larger basis before the SAGE
    constraint: a pair ``(beta, Q)`` with ``Q`` sparse.
    """
    c = c if isinstance(c, Expr) else Expr.constant(c)
    alpha = np.asarray(alpha)
    if D.nonneg_orthant:
        chat = c
    else:
        chat = sigrep_block(model, alpha, c).hatc
    if modulation is not None:
        beta, Q = modulation
        cert = sage_membership(model, beta, D.Y, lin(Q, chat))
    else:
        cert = sage_membership(model, alpha, D.Y, chat)
    cert.extra["chat"] = chat
    return cert


def dual_poly_sage_constraints(model: Model, alpha, D: SignSymmetricDomain, v: Expr,
                               pattern: SagePattern | None = None, modulation=None):
    """Constrain ``v`` to the dual polynomial SAGE cone over ``D``.

    In the sign-symmetric case a companion ``v_hat`` lies in the dual signomial
    cone with ``|v| <= v_hat`` and equality on even rows.  With ``modulation``
    ``(beta, Q)`` the companion is ``Q^T w`` for ``w`` dual-SAGE over ``beta``.
    """
    alpha = np.asarray(alpha)
    m = v.size
    if modulation is not None:
        beta, Q = modulation
        w = model.variable("dual_w_mod", Q.shape[0])
        pat = full_pattern(Q.shape[0]) if pattern is None else pattern
        h = dual_sage_constraints(model, beta, D.Y, w, pat)
        # rows dropped from the pattern carry unconstrained w entries
        Qk = sp.csr_matrix(Q)[pat.keep]
        vhat = lin(Qk.T, w[pat.keep])
    else:
        if D.nonneg_orthant:
            h = dual_sage_constraints(model, alpha, D.Y, v, pattern)
            h.extra["vhat"] = v
            return h
        vhat = model.variable("vhat", m)
        h = dual_sage_constraints(model, alpha, D.Y, vhat, pattern)
    if D.nonneg_orthant:
        model.add_zero(v - vhat)
    else:
        even = even_lattice_mask(alpha)
        ev, od = np.flatnonzero(even), np.flatnonzero(~even)
        model.add_zero(v[ev] - vhat[ev])
        model.add_nonneg(vhat[od] - v[od])
        model.add_nonneg(vhat[od] + v[od])
    h.extra["vhat"] = vhat
    return h


# ----------------------------------------------------------- conveniences

def is_sage(alpha, c, X: ConicSet | None = None, full: bool = False) -> bool:
    """Numeric membership test of a fixed vector in the X-SAGE cone."""
    alpha = np.asarray(alpha, dtype=float)
    X = whole_space(alpha.shape[1]) if X is None else X
    c = np.asarray(c, dtype=float)
    if not full and np.all(c >= 0):
        return True
    m = Model()
    sage_membership(m, alpha, X, Expr.constant(c), full=full)
    m.minimize(Expr.constant([0.0]))
    sol = solve(m.compile())
    return sol.status == "optimal"


def sage_bound(alpha, c, X: ConicSet | None = None, const_row: int | None = None,
               full: bool = False) -> float:
    """``sup{gamma : c - gamma e_0 in C_SAGE(alpha, X)}`` for numeric ``c``."""
    alpha = np.asarray(alpha, dtype=float)
    X = whole_space(alpha.shape[1]) if X is None else X
    if const_row is None:
        zero = np.flatnonzero(np.all(alpha == 0, axis=1))
        if zero.size == 0:
            raise ValueError("alpha has no zero row")
        const_row = int(zero[0])
    m = Model()
    gamma = m.variable("gamma")
    e0 = np.zeros((len(c), 1))
    e0[const_row] = 1.0
    expr = Expr.constant(np.asarray(c, dtype=float)) - lin(e0, gamma)
    sage_membership(m, alpha, X, expr, full=full)
    m.maximize(gamma)
    prog = m.compile()
    sol = solve(prog)
    if sol.status != "optimal":
        return -np.inf if sol.status == "primal_infeasible" else np.nan
    return prog.model_value(sol.primal_objective)
