"""Primal and dual SAGE relaxation hierarchies.

Every hierarchy here has the shape::

    maximize    gamma
    subject to  F_i theta + g_i in C_i      (i = 1..r)

over a decision vector ``theta`` holding ``gamma``, inequality multipliers
``s_h`` and equality multipliers ``z_h``, where each ``C_i`` is a
(conditional, possibly polynomial) SAGE cone.  The dual program::

    minimize    sum_i g_i . u_i
    subject to  sum_i F_i^T u_i + e_gamma = 0,   u_i in C_i^*

is built explicitly from the dual cone constraints, so its moment vectors
and the auxiliary ``z`` variables are available to solution recovery.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .conic import Expr, Model, SolveSettings, lin, solve
from .sage_cones import (
    dual_poly_sage_constraints,
    dual_sage_constraints,
    poly_sage_membership,
    sage_membership,
    sage_pattern,
)
from .sets import ConicSet, SignSymmetricDomain, whole_space
from .symbolic import (
    Polynomial,
    Signomial,
    basis_power,
    embedding_matrix,
    multiplication_matrix,
    products_up_to,
    sigrep_block,
    union_basis,
)

log = logging.getLogger(__name__)

DEFAULT_EXP_CAP = 200_000


class HierarchyTooLarge(RuntimeError):
    pass


# ------------------------------------------------------------------ specs

@dataclass
class ProblemSpec:
    """``inf f(x)`` subject to ``g(x) >= 0``, ``phi(x) = 0``, ``x in X``."""

    f: Signomial
    g: list = field(default_factory=list)
    phi: list = field(default_factory=list)
    X: ConicSet | SignSymmetricDomain | None = None
    kind: str = "signomial"

    def __post_init__(self):
        if self.kind not in ("signomial", "polynomial"):
            raise ValueError("kind must be 'signomial' or 'polynomial'")
        n = self.f.n
        for h in list(self.g) + list(self.phi):
            if h.n != n:
                raise ValueError("all functions must share the variable count")
        if self.X is None:
            self.X = whole_space(n)
        if self.kind == "polynomial" and isinstance(self.X, ConicSet):
            raise ValueError("polynomial problems need a SignSymmetricDomain")
        if self.kind == "signomial" and isinstance(self.X, SignSymmetricDomain):
            raise ValueError("signomial problems need a ConicSet")

    @property
    def n(self) -> int:
        return self.f.n

    def basis(self) -> np.ndarray:
        mats = [self.f.alpha] + [h.alpha for h in self.g] + [h.alpha for h in self.phi]
        zero = np.zeros((1, self.n), dtype=self.f.alpha.dtype)
        return union_basis(zero, *mats)

    @property
    def log_domain(self) -> ConicSet:
        return self.X.Y if isinstance(self.X, SignSymmetricDomain) else self.X

    def translate(self, d) -> "ProblemSpec":
        """Equivalent problem in ``xhat`` with ``x = xhat + d`` (signomial) or
        ``x = exp(d) * xhat`` (polynomial).  Optimal values are unchanged."""
        d = np.asarray(d, dtype=float)
        return ProblemSpec(self.f.translate(d), [h.translate(d) for h in self.g],
                           [h.translate(d) for h in self.phi], self.X.translate(d), self.kind)

    def center(self) -> np.ndarray:
        """Log-space point used to balance monomial magnitudes before solving."""
        return self.log_domain.center()

    def map_back(self, xhat, d) -> np.ndarray:
        """Point of the original problem corresponding to ``xhat``."""
        xhat = np.asarray(xhat, dtype=float)
        d = np.asarray(d, dtype=float)
        return xhat + d if self.kind == "signomial" else np.exp(d) * xhat


@dataclass(frozen=True)
class HierarchyLevel:
    """Level ``(p, q, ell)``; ``minimax_free`` levels use ``(p, q)`` or ``(ell,)``."""

    p: int = 0
    q: int = 1
    ell: int = 0
    minimax_free: bool = False

    def __post_init__(self):
        if min(self.p, self.q, self.ell) < 0:
            raise ValueError("hierarchy parameters must be nonnegative")
        if not self.minimax_free and self.q < 1:
            raise ValueError("Lagrangian levels need q >= 1")

    @classmethod
    def parse(cls, spec, minimax_free: bool = False):
        if isinstance(spec, HierarchyLevel):
            return spec
        if isinstance(spec, str):
            spec = [int(t) for t in spec.replace(",", " ").split()]
        spec = list(spec)
        if minimax_free:
            if len(spec) == 1:
                return cls(p=0, q=0, ell=spec[0], minimax_free=True)
            return cls(p=spec[0], q=spec[1], ell=0, minimax_free=True)
        return cls(*spec)

    def __str__(self):
        if self.minimax_free:
            return f"mf({self.p},{self.q})" if self.q or self.p else f"mf(ell={self.ell})"
        return f"({self.p},{self.q},{self.ell})"


# ------------------------------------------------------------ cone blocks

@dataclass
class SageCone:
    """A SAGE-type cone: signomial over ``X`` or polynomial over ``D``."""

    alpha: np.ndarray
    X: ConicSet | None = None
    D: SignSymmetricDomain | None = None
    modulation: tuple | None = None  # (beta, Q) applied after representatives

    @property
    def polynomial(self) -> bool:
        return self.D is not None

    def primal(self, model: Model, c: Expr):
        if self.polynomial:
            return poly_sage_membership(model, self.alpha, self.D, c, self.modulation)
        return sage_membership(model, self.alpha, self.X, c)

    def pattern(self, c: Expr):
        """Row pattern of the primal representation (replicated without solving)."""
        scratch = Model()
        scratch.nvars = c.ncols
        expr = c
        if self.polynomial and self.D.sign_symmetric:
            expr = sigrep_block(scratch, self.alpha, c).hatc
        if self.modulation is not None:
            expr = lin(self.modulation[1], expr)
        return sage_pattern(expr)

    def dual(self, model: Model, u: Expr, c: Expr):
        pat = self.pattern(c)
        if self.polynomial:
            return dual_poly_sage_constraints(model, self.alpha, self.D, u, pat,
                                              self.modulation)
        return dual_sage_constraints(model, self.alpha, self.X, u, pat)

    def exp_count(self, c: Expr) -> int:
        pat = self.pattern(c)
        dom = self.D.Y if self.polynomial else self.X
        per = sum(1 for k, _ in dom.cones if k == "exp")
        return pat.n_exp + per * pat.witnesses.size


@dataclass
class ConeConstraint:
    name: str
    F: sp.csr_matrix
    g: np.ndarray
    cone: SageCone


class SageProgram:
    """``max theta[obj]`` subject to affine images of ``theta`` in SAGE cones."""

    def __init__(self):
        self.blocks: dict[str, tuple[int, int]] = {}
        self.ntheta = 0
        self.constraints: list[ConeConstraint] = []
        self.free_blocks: set[str] = set()
        self.meta: dict = {}

    def add_block(self, name: str, size: int) -> slice:
        self.blocks[name] = (self.ntheta, size)
        self.ntheta += size
        return slice(self.ntheta - size, self.ntheta)

    def add_constraint(self, name, F, g, cone: SageCone):
        F = sp.csr_matrix(F)
        self.constraints.append(ConeConstraint(name, F, np.asarray(g, dtype=float), cone))

    def _expr(self, con: ConeConstraint) -> Expr:
        F = sp.csr_matrix(con.F, shape=(con.F.shape[0], self.ntheta))
        return Expr(F, con.g)

    def exp_count(self) -> int:
        return sum(c.cone.exp_count(self._expr(c)) for c in self.constraints)

    def check_size(self, cap: int = DEFAULT_EXP_CAP):
        k = self.exp_count()
        if k > cap:
            raise HierarchyTooLarge(
                f"relaxation needs {k} exponential-cone triples, above the cap of {cap}")
        return k

    def primal(self):
        m = Model()
        theta = m.variable("theta", self.ntheta)
        certs = {}
        for con in self.constraints:
            c = lin(sp.csr_matrix(con.F, shape=(con.F.shape[0], self.ntheta)), theta) + con.g
            certs[con.name] = con.cone.primal(m, c)
        m.maximize(theta[[self.blocks["gamma"][0]]])
        return m, certs

    def dual(self):
        m = Model()
        duals, us = {}, {}
        terms = []
        obj = Expr.constant([0.0])
        for con in self.constraints:
            u = m.variable(f"u_{con.name}", con.F.shape[0])
            us[con.name] = u
            duals[con.name] = con.cone.dual(m, u, self._expr(con))
            Ft = sp.csr_matrix(con.F, shape=(con.F.shape[0], self.ntheta)).T
            terms.append(lin(Ft, u))
            obj = obj + u.dot(con.g)
        e = np.zeros(self.ntheta)
        e[self.blocks["gamma"][0]] = 1.0
        total = terms[0]
        for t in terms[1:]:
            total = total + t
        m.add_zero(total + e)
        m.minimize(obj)
        return m, duals, us


# ------------------------------------------------------------ hierarchies

def _const_index(basis) -> int:
    z = np.flatnonzero(np.all(np.asarray(basis) == 0, axis=1))
    if z.size == 0:
        raise ValueError("basis lacks the zero row")
    return int(z[0])


def _as_sig(h):
    return h.as_signomial() if isinstance(h, Polynomial) else h


def _shifted(W, shift):
    return W if shift is None else W.translate(shift)


def sig_minimax_free(f: Signomial, X: ConicSet, ell: int = 0, basis=None,
                     shift=None) -> SageProgram:
    """``sup{gamma : Sig(alpha, 1)^ell (f - gamma) is X-SAGE}``.

    ``shift`` states that ``f`` and ``X`` were translated by ``d``; the
    modulator is translated with them so the level is unchanged.
    """
    n = f.n
    alpha = basis if basis is not None else union_basis(np.zeros((1, n)), f.alpha)
    alpha = np.asarray(alpha, dtype=float)
    W = _shifted(Signomial(alpha, np.ones(alpha.shape[0])) ** ell, shift)
    beta, MW = multiplication_matrix(W, alpha)
    cf = f.coefficients_on(alpha)
    e0 = np.zeros(alpha.shape[0])
    e0[_const_index(alpha)] = 1.0
    prog = SageProgram()
    prog.add_block("gamma", 1)
    F = sp.csr_matrix(-(MW @ e0).reshape(-1, 1))
    prog.add_constraint("main", F, MW @ cf, SageCone(beta, X=X))
    prog.meta.update(kind="signomial", basis=beta, alpha=alpha, level=("mf", ell))
    return prog


def _lagrangian(f, g, phi, alpha, mult_basis, modulator, main_cone, mult_cone_fn, q):
    """Shared construction of the modulated Lagrangian program."""
    G = products_up_to(list(g), q) if g else []
    Phi = products_up_to(list(phi), q) if phi else []
    mats = []
    for h in G + Phi:
        dst, M = multiplication_matrix(h, mult_basis)
        mats.append((dst, M))
    B0 = union_basis(alpha, *[d for d, _ in mats])
    W = modulator
    beta, MW = multiplication_matrix(W, B0)
    prog = SageProgram()
    prog.add_block("gamma", 1)
    cols = [sp.csr_matrix(-(MW @ _unit(B0, _const_index(B0))).reshape(-1, 1))]
    mult_slices = []
    for i, (dst, M) in enumerate(mats):
        kind = "s" if i < len(G) else "z"
        name = f"{kind}{i if kind == 's' else i - len(G)}"
        sl = prog.add_block(name, mult_basis.shape[0])
        mult_slices.append((name, sl))
        cols.append(-(MW @ embedding_matrix(dst, B0) @ M))
    F = sp.hstack(cols, format="csr")
    cf = MW @ (embedding_matrix(f.alpha, B0) @ f.c)
    prog.add_constraint("main", F, cf, main_cone(beta))
    for name, sl in mult_slices:
        if name.startswith("s"):
            k = sl.stop - sl.start
            Fs = sp.csr_matrix((np.ones(k), (np.arange(k), np.arange(sl.start, sl.stop))),
                               shape=(k, prog.ntheta))
            prog.add_constraint(name, Fs, np.zeros(k), mult_cone_fn(mult_basis))
        else:
            prog.free_blocks.add(name)
    prog.meta.update(basis=beta, alpha=alpha, mult_basis=mult_basis,
                     products=(G, Phi), multipliers=[n for n, _ in mult_slices])
    return prog


def _unit(basis, i):
    e = np.zeros(np.asarray(basis).shape[0])
    e[i] = 1.0
    return e


def sig_lagrangian(f: Signomial, g, phi, X: ConicSet, p: int = 0, q: int = 1,
                   ell: int = 0, shift=None) -> SageProgram:
    """Lagrangian hierarchy with X-SAGE multipliers over ``alpha[p]``."""
    if q < 1:
        raise ValueError("q must be at least 1")
    spec = ProblemSpec(f, list(g), list(phi), X)
    alpha = spec.basis().astype(float)
    mult_basis = basis_power(alpha, p)
    W = _shifted(Signomial(alpha, np.ones(alpha.shape[0])) ** ell, shift)
    prog = _lagrangian(f, g, phi, alpha, mult_basis, W,
                       lambda b: SageCone(b, X=X), lambda b: SageCone(b, X=X), q)
    prog.meta.update(kind="signomial", level=(p, q, ell))
    return prog


def poly_lagrangian(f: Polynomial, g, phi, D: SignSymmetricDomain, p: int = 0,
                    q: int = 1, ell: int = 0, shift=None) -> SageProgram:
    """Polynomial Lagrangian hierarchy over a sign-symmetric or orthant domain.

    Sign-symmetric domains use multipliers over ``alpha_hat[p]`` with
    ``alpha_hat = alpha U 2 alpha`` and modulator ``Poly(2 alpha, 1)^ell``.
    Orthant domains reuse the signomial construction over ``alpha[p]``.
    """
    if q < 1:
        raise ValueError("q must be at least 1")
    spec = ProblemSpec(f, list(g), list(phi), D, kind="polynomial")
    alpha = spec.basis()
    if D.nonneg_orthant:
        mult_basis = basis_power(alpha, p)
        W = Polynomial(alpha, np.ones(alpha.shape[0])) ** ell
    else:
        ahat = union_basis(alpha, 2 * alpha)
        mult_basis = basis_power(ahat, p)
        W = Polynomial(2 * alpha, np.ones(alpha.shape[0])) ** ell
    W = _shifted(W, shift)
    prog = _lagrangian(f, g, phi, alpha, mult_basis, W,
                       lambda b: SageCone(b, D=D), lambda b: SageCone(b, D=D), q)
    prog.meta.update(kind="polynomial", level=(p, q, ell))
    return prog


def poly_minimax_free(f: Polynomial, D: SignSymmetricDomain, p: int = 0,
                      q: int = 0, shift=None) -> SageProgram:
    """``sup gamma`` with ``Sig(A,1)^q Sig(A, c_hat)`` Y-SAGE, where ``A, c``
    describe ``psi = Poly(alpha, s)^p (f - gamma)``, ``s`` the even-row indicator
    and ``c_hat`` a signomial representative of ``psi``."""
    n = f.n
    alpha = union_basis(np.zeros((1, n), dtype=np.int64), f.alpha)
    even = np.all(alpha % 2 == 0, axis=1)
    P = _shifted(Polynomial(alpha, even.astype(float)) ** p, shift)
    A, MP = multiplication_matrix(P, alpha)
    a = MP @ f.coefficients_on(alpha)
    b = MP @ _unit(alpha, _const_index(alpha))
    modulation = None
    if q > 0:
        Wq = _shifted(Polynomial(A, np.ones(A.shape[0])) ** q, shift)
        beta, Q = multiplication_matrix(Wq, A)
        modulation = (beta, Q)
    prog = SageProgram()
    prog.add_block("gamma", 1)
    prog.add_constraint("main", sp.csr_matrix(-b.reshape(-1, 1)), a,
                        SageCone(A, D=D, modulation=modulation))
    prog.meta.update(kind="polynomial", basis=A, alpha=alpha, level=("mf", p, q))
    return prog


# ------------------------------------------------------------ solving

@dataclass
class RelaxationResult:
    bound: float
    status: str
    primal_value: float
    dual_value: float
    reported: str
    primal_status: str
    dual_status: str
    program: SageProgram
    primal_solution: object = None
    dual_solution: object = None
    certificates: dict = field(default_factory=dict)
    dual_handles: dict = field(default_factory=dict)
    dual_u: dict = field(default_factory=dict)
    dual_prog: object = None
    primal_prog: object = None
    timings: dict = field(default_factory=dict)
    n_exp: int = 0
    # the problem that was actually relaxed and its log-space shift
    spec: ProblemSpec | None = None
    shift: np.ndarray | None = None

    def moments(self, name: str = "main"):
        """Dual moment data for recovery: ``(v, blocks, vhat, basis)``."""
        x = self.dual_solution.x
        h = self.dual_handles[name]
        v = self.dual_u[name].value(x)
        vhat = h.extra["vhat"].value(x) if "vhat" in h.extra else None
        cone = next(c for c in self.program.constraints if c.name == name).cone
        domain = cone.X if cone.X is not None else cone.D
        return MomentSolution(v=v, vhat=vhat, blocks=h.blocks(x), basis=h.alpha,
                              u_basis=cone.alpha, domain=domain)


@dataclass
class MomentSolution:
    """Dual moment vector with its per-block auxiliaries.

    ``blocks`` lists ``(i, v_i, z_i)`` for the dual AGE blocks over ``basis``.
    For polynomial problems ``vhat`` is the companion vector over ``basis``
    and ``v`` is indexed by ``u_basis``.
    """

    v: np.ndarray
    blocks: list
    basis: np.ndarray
    vhat: np.ndarray | None = None
    u_basis: np.ndarray | None = None
    domain: object = None


def agreement_digits(a: float, b: float, max_digits: int = 12) -> str:
    """Format the bound to the last decimal place where ``a`` and ``b`` agree."""
    if not (np.isfinite(a) and np.isfinite(b)):
        return "nan"
    best = None
    for k in range(0, max_digits + 1):
        sa, sb = f"{a:.{k}f}", f"{b:.{k}f}"
        if sa == sb:
            best = sa
        elif best is not None and k > 0:
            break
    if best is None:
        # agree only in magnitude; show both
        return f"{a:.6g}|{b:.6g}"
    return best


def solve_level(prog: SageProgram, settings: SolveSettings | None = None,
                backend: str = "clarabel", cap: int = DEFAULT_EXP_CAP,
                primal: bool = True, dual: bool = True) -> RelaxationResult:
    """Compile and solve the primal and dual programs of a hierarchy level."""
    n_exp = prog.check_size(cap)
    settings = settings or SolveSettings()
    timings = {}
    res = dict(primal_value=np.nan, dual_value=np.nan, primal_status="skipped",
               dual_status="skipped")
    certs, handles, us = {}, {}, {}
    psol = dsol = pprog = dprog = None
    if primal:
        t0 = time.perf_counter()
        mp, certs = prog.primal()
        pprog = mp.compile()
        psol = solve(pprog, settings, backend)
        timings["primal"] = time.perf_counter() - t0
        res["primal_status"] = psol.status
        if psol.status in ("optimal", "inaccurate"):
            res["primal_value"] = pprog.model_value(psol.primal_objective)
        elif psol.status == "primal_infeasible":
            res["primal_value"] = -np.inf
    if dual:
        t0 = time.perf_counter()
        md, handles, us = prog.dual()
        dprog = md.compile()
        dsol = solve(dprog, settings, backend)
        timings["dual"] = time.perf_counter() - t0
        res["dual_status"] = dsol.status
        if dsol.status in ("optimal", "inaccurate"):
            res["dual_value"] = dprog.model_value(dsol.primal_objective)
        elif dsol.status == "dual_infeasible":
            res["dual_value"] = -np.inf
    pv, dv = res["primal_value"], res["dual_value"]
    statuses = [s for s in (res["primal_status"], res["dual_status"]) if s != "skipped"]
    if all(s == "optimal" for s in statuses):
        status = "optimal"
    elif any(s in ("optimal", "inaccurate") for s in statuses):
        status = "inaccurate"
    else:
        status = statuses[0] if statuses else "failed"
    if np.isfinite(pv) and np.isfinite(dv):
        if res["primal_status"] == "optimal":
            bound = pv
        elif res["dual_status"] == "optimal":
            bound = dv
        else:
            # both sides inexact: either may overshoot, keep the smaller lower bound
            bound = min(pv, dv)
        reported = agreement_digits(pv, dv)
    else:
        bound = pv if np.isfinite(pv) else dv
        reported = f"{bound:.8g}" if np.isfinite(bound) else str(bound)
    return RelaxationResult(bound=bound, status=status, reported=reported, program=prog,
                            primal_solution=psol, dual_solution=dsol, certificates=certs,
                            dual_handles=handles, dual_u=us, dual_prog=dprog,
                            primal_prog=pprog, timings=timings, n_exp=n_exp, **res)


def build_level(spec: ProblemSpec, level: HierarchyLevel, shift=None) -> SageProgram:
    """Select the hierarchy for a problem and level.

    ``shift`` marks ``spec`` as the translate of the original problem by
    ``d``; fixed modulators are translated accordingly.
    """
    if spec.kind == "signomial":
        if level.minimax_free:
            if spec.g or spec.phi:
                raise ValueError("minimax-free levels take no explicit constraints")
            return sig_minimax_free(spec.f, spec.X, level.ell, shift=shift)
        return sig_lagrangian(spec.f, spec.g, spec.phi, spec.X, level.p, level.q,
                              level.ell, shift=shift)
    if level.minimax_free:
        if spec.g or spec.phi:
            raise ValueError("minimax-free levels take no explicit constraints")
        return poly_minimax_free(spec.f, spec.X, level.p, level.q, shift=shift)
    return poly_lagrangian(spec.f, spec.g, spec.phi, spec.X, level.p, level.q, level.ell,
                           shift=shift)


def solve_quality(res: RelaxationResult) -> float:
    """Relative primal/dual disagreement; infinite unless both sides solved."""
    if res.primal_status != "optimal" and res.dual_status != "optimal":
        return np.inf
    pv, dv = res.primal_value, res.dual_value
    if not (np.isfinite(pv) and np.isfinite(dv)):
        return np.inf
    q = abs(pv - dv) / max(1.0, abs(pv), abs(dv))
    if res.status != "optimal":
        q = max(q, 1.0e-4)
    return q


def moment_center(res: RelaxationResult, rel: float = 1e-9):
    """Log-space point fitted to the dual moments, ``beta_i x ~ log(v_i / v_0)``.

    Returned in the coordinates of the original problem, or ``None``.
    """
    if res.dual_solution is None or "main" not in res.dual_u:
        return None
    if res.dual_solution.status not in ("optimal", "inaccurate"):
        return None
    v = res.dual_u["main"].value(res.dual_solution.x)
    basis = np.asarray(res.program.constraints[0].cone.alpha, dtype=float)
    try:
        i0 = _const_index(basis)
    except ValueError:
        return None
    if not v[i0] > 0:
        return None
    ok = v > rel * np.max(np.abs(v))
    ok[i0] = False
    if not ok.any():
        return None
    x = np.linalg.lstsq(basis[ok], np.log(v[ok] / v[i0]), rcond=None)[0]
    d = np.zeros(basis.shape[1]) if res.shift is None else res.shift
    return x + d


def solve_spec(spec: ProblemSpec, level, center="auto", accept: float = 1e-6,
               **kw) -> RelaxationResult:
    """Build and solve one level of the hierarchy for ``spec``.

    The hierarchy is invariant under translating the log-space variables
    (with the modulators translated along), but the conic program is not
    equally well conditioned at every translate.  ``center`` selects:

    * ``None``: solve as given;
    * a vector ``d``: solve the translate by ``d``;
    * ``"auto"``: solve as given and, if primal and dual values disagree by
      more than ``accept`` (relative), retry at the center of the domain and
      at a point fitted to the dual moments, keeping the best agreement.

    ``result.spec`` and ``result.shift`` describe the problem actually relaxed.
    """
    level = HierarchyLevel.parse(level)
    if isinstance(center, str):
        if center != "auto":
            raise ValueError("center must be 'auto', None or a vector")
        best = _solve_at(spec, level, None, kw)
        if solve_quality(best) <= accept:
            return best
        tried = [np.zeros(spec.n)]
        proposals = [lambda: spec.center(), lambda: moment_center(best)]
        for make in proposals:
            d = make()
            if d is None or not np.all(np.isfinite(d)):
                continue
            if any(np.allclose(d, t, atol=1e-6) for t in tried):
                continue
            tried.append(d)
            res = _solve_at(spec, level, d, kw)
            if solve_quality(res) < solve_quality(best):
                best = res
            if solve_quality(best) <= accept:
                break
        return best
    return _solve_at(spec, level, None if center is None else center, kw)


def _solve_at(spec, level, d, kw) -> RelaxationResult:
    if d is not None:
        d = np.asarray(d, dtype=float).reshape(spec.n)
    shifted = d is not None and bool(np.any(d != 0))
    work = spec.translate(d) if shifted else spec
    res = solve_level(build_level(work, level, d if shifted else None), **kw)
    res.spec = work
    res.shift = d if shifted else np.zeros(spec.n)
    return res
