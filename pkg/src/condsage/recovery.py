"""Solution recovery from dual SAGE relaxations.

Signomial recovery reads candidate points ``x = z_j / v_j`` off the dual AGE
blocks and falls back to a least-squares fit of ``alpha x ~ log v``.
Polynomial recovery splits the task into magnitudes (the same idea applied to
``log|x|``) and signs (a linear system over GF(2) read off the signs of the
moment vector).  ``refine`` polishes candidates with a derivative-free local
solver.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .conic import Expr, Model, lin, solve
from .sets import ConicSet, SignSymmetricDomain
from .symbolic import Signomial

log = logging.getLogger(__name__)


@dataclass
class RecoverySettings:
    """Tolerances of the recovery algorithms.

    ``eps_ineq`` and ``eps_eq`` filter candidates by ``g >= -eps_ineq`` and
    ``|phi| <= eps_eq``.  ``eps_0`` is the zero threshold of magnitude
    recovery, ``eps_t`` guards divisions by ``v_j``, ``sign_cap`` bounds the
    number of enumerated sign vectors and ``match_tol`` is the relative
    tolerance of the ``alpha x = log v`` test.  ``sign_tol`` treats moments
    with ``|v_i| <= sign_tol * v_0`` as zero when reading signs.
    """

    eps_ineq: float = 1e-8
    eps_eq: float = 1e-8
    eps_0: float = 1e-100
    eps_t: float = 1e-12
    sign_cap: int = 4096
    heuristic: bool = True
    match_tol: float = 1e-8
    sign_tol: float = 1e-6

    def __post_init__(self):
        if min(self.eps_ineq, self.eps_eq) < 0:
            raise ValueError("infeasibility tolerances must be nonnegative")
        if not (self.eps_0 > 0 and self.eps_t > 0):
            raise ValueError("eps_0 and eps_t must be positive")
        if self.sign_cap < 1:
            raise ValueError("sign_cap must be positive")


@dataclass
class Candidate:
    x: np.ndarray
    objective: float
    ineq: np.ndarray
    eq: np.ndarray
    source: str = ""

    @property
    def violation(self) -> float:
        """Largest constraint violation ``max(-g, |phi|)`` (0 when feasible)."""
        parts = [0.0]
        if self.ineq.size:
            parts.append(float(np.max(-self.ineq)))
        if self.eq.size:
            parts.append(float(np.max(np.abs(self.eq))))
        return max(parts)


class CandidateList(list):
    """Candidates sorted by objective, ties broken by smaller violation."""

    def __init__(self, items=(), truncated: bool = False, diagnostics=None):
        super().__init__(sorted(items, key=lambda c: (c.objective, c.violation)))
        self.truncated = truncated
        self.diagnostics = list(diagnostics or [])

    @property
    def best(self) -> Candidate | None:
        return self[0] if self else None

    def table(self) -> str:
        lines = [f"{'#':>3} {'objective':>18} {'violation':>11}  x"]
        for k, c in enumerate(self):
            xs = " ".join(f"{t:.8g}" for t in c.x)
            lines.append(f"{k:>3} {c.objective:>18.10g} {c.violation:>11.3e}  [{xs}]")
        return "\n".join(lines)


def evaluate(x, f, g=(), phi=(), source: str = "") -> Candidate:
    x = np.asarray(x, dtype=float)
    with np.errstate(all="ignore"):
        return Candidate(x, float(f(x)), np.array([float(h(x)) for h in g]),
                         np.array([float(h(x)) for h in phi]), source)


def _filtered(points, f, g, phi, s: RecoverySettings, truncated=False, diagnostics=()):
    keep = []
    for x, src in points:
        if not np.all(np.isfinite(x)):
            continue
        c = evaluate(x, f, g, phi, src)
        if not np.isfinite(c.objective):
            continue
        if c.ineq.size and np.any(c.ineq < -s.eps_ineq):
            continue
        if c.eq.size and np.any(np.abs(c.eq) > s.eps_eq):
            continue
        keep.append(c)
    return CandidateList(keep, truncated, diagnostics)


# ----------------------------------------------------------- least squares

def _domain_rows(model: Model, X: ConicSet, x: Expr):
    if X.is_whole_space:
        return
    e = lin(X.A[:, :X.n], x) + X.b
    if X.n_aux:
        u = model.variable("u_aux", X.n_aux)
        e = e + lin(X.A[:, X.n:], u)
    model.add_cones(e, X.cones)


def least_squares_fit(alpha, target, X: ConicSet, upper=None):
    """``argmin ||alpha x - target||_2`` over ``x in X`` as a second-order-cone
    program.  ``upper = (A_u, b_u)`` adds ``A_u x <= b_u``.  Returns ``None``
    when the program has no solution."""
    alpha = np.asarray(alpha, dtype=float)
    m = Model()
    x = m.variable("x", X.n)
    t = m.variable("t", 1)
    if alpha.shape[0]:
        m.add_soc(Expr.vstack([t, lin(alpha, x) - np.asarray(target, dtype=float)]))
    _domain_rows(m, X, x)
    if upper is not None and np.asarray(upper[0]).shape[0]:
        Au, bu = upper
        m.add_nonneg(np.asarray(bu, dtype=float) - lin(np.asarray(Au, dtype=float), x))
    m.minimize(t)
    prog = m.compile()
    sol = solve(prog)
    if sol.status not in ("optimal", "inaccurate"):
        return None
    return prog.var(sol.x, "x")


def _matches(alpha, x, logv, tol) -> bool:
    if logv.size == 0:
        return True
    with np.errstate(all="ignore"):
        r = np.asarray(alpha, dtype=float) @ x - logv
    if not np.all(np.isfinite(r)):
        return False
    return float(np.max(np.abs(r))) <= tol * max(1.0, float(np.max(np.abs(logv))))


def _zero_row(basis) -> int | None:
    z = np.flatnonzero(np.all(np.asarray(basis) == 0, axis=1))
    return int(z[0]) if z.size else None


def _normalizer(basis, v, eps) -> float:
    """``v_0`` at the constant row (1 when absent or not positive)."""
    i0 = _zero_row(basis)
    if i0 is None or not v[i0] > eps:
        return 1.0
    return float(v[i0])


# ------------------------------------------------------------ signomials

def sig_recover(f: Signomial, g, phi, m, s: RecoverySettings | None = None,
                X: ConicSet | None = None) -> CandidateList:
    """Candidate minimizers from a signomial dual SAGE solution.

    Every dual AGE block with ``v_j > eps_t`` contributes ``z_j / v_j``; when
    no candidate reproduces the moments (``alpha x = log v`` up to
    ``match_tol``), the least-squares point over ``X`` is added.  Candidates
    are filtered by the infeasibility tolerances and sorted by ``f``.
    """
    s = s or RecoverySettings()
    X = X if X is not None else m.domain
    basis = np.asarray(m.u_basis if m.u_basis is not None else m.basis, dtype=float)
    v = np.asarray(m.v, dtype=float)
    diags = []
    if np.all(v <= s.eps_t):
        return CandidateList([], diagnostics=["all moments are numerically zero"])
    v0 = _normalizer(basis, v, s.eps_t)
    pos = v > s.eps_t
    logv = np.log(v[pos] / v0)
    points = []
    for i, vi, zi in m.blocks:
        if vi <= s.eps_t:
            diags.append(f"skipped block {i}: v_j = {vi:.3g}")
            continue
        points.append((np.asarray(zi, dtype=float) / vi, f"block {i}"))
    matched = any(_matches(basis[pos], x, logv, s.match_tol) for x, _ in points)
    if not matched:
        x = least_squares_fit(basis[pos], logv, X) if X is not None else None
        if x is None:
            diags.append("least-squares fallback failed")
        else:
            points.append((x, "least squares"))
    return _filtered(points, f, g, phi, s, diagnostics=diags)


# ------------------------------------------------------------ polynomials

def gf2_solve(A, b):
    """Solve ``A z = b`` over GF(2).

    Returns ``(z, N)``: a particular solution (``None`` when inconsistent) and
    a matrix whose rows form a basis of the null space of ``A``.
    """
    A = np.asarray(A, dtype=np.int64) % 2
    b = np.asarray(b, dtype=np.int64).ravel() % 2
    m, n = A.shape
    M = np.concatenate([A, b[:, None]], axis=1).astype(np.uint8)
    pivots = []
    r = 0
    for col in range(n):
        hits = np.flatnonzero(M[r:, col]) + r if r < m else np.zeros(0, dtype=int)
        if hits.size == 0:
            continue
        p = hits[0]
        if p != r:
            M[[r, p]] = M[[p, r]]
        others = np.flatnonzero(M[:, col])
        others = others[others != r]
        M[others] ^= M[r]
        pivots.append(col)
        r += 1
        if r == m:
            break
    if r < m and np.any(M[r:, n]):
        z = None
    else:
        z = np.zeros(n, dtype=np.int64)
        for k, col in enumerate(pivots):
            z[col] = M[k, n]
    free = [j for j in range(n) if j not in set(pivots)]
    N = np.zeros((len(free), n), dtype=np.int64)
    for t, j in enumerate(free):
        N[t, j] = 1
        for k, col in enumerate(pivots):
            N[t, col] = M[k, j]
    return z, N


def _sign_merit(alpha, v, s) -> float:
    return float(v @ np.prod(s[None, :] ** alpha, axis=1))


def greedy_signs(alpha, v) -> np.ndarray:
    """Greedy ascent on ``M(s) = v . s^alpha`` from ``s = 1`` by single flips.

    Each round flips the undecided coordinate with the largest improvement
    (lowest index on ties) if that improvement is positive; the coordinate
    leaves the undecided set either way.
    """
    alpha = np.asarray(alpha)
    n = alpha.shape[1]
    s = np.ones(n)
    undecided = list(range(n))
    cur = _sign_merit(alpha, v, s)
    while undecided:
        gains = []
        for j in undecided:
            t = s.copy()
            t[j] = -t[j]
            gains.append(_sign_merit(alpha, v, t) - cur)
        k = int(np.argmax(gains))
        j = undecided.pop(k)
        if gains[k] > 0:
            s[j] = -s[j]
            cur += gains[k]
    return s


def variable_signs(alpha, v, heuristic: bool = True, cap: int = 4096,
                   sign_tol: float = 0.0):
    """Sign vectors consistent with the signs of the polynomial moments.

    Returns ``(signs, truncated)`` where ``signs`` is a list of +-1 vectors.
    Moments with ``|v_i| <= sign_tol`` count as zero.
    """
    alpha = np.asarray(alpha, dtype=np.int64)
    v = np.asarray(v, dtype=float)
    n = alpha.shape[1]
    odd = (alpha % 2) == 1
    U = np.flatnonzero((np.abs(v) > sign_tol) & odd.any(axis=1))
    if U.size == 0:
        return [np.ones(n)], False
    W = np.flatnonzero(odd[U].any(axis=0))
    support = np.flatnonzero((alpha[U] > 0).any(axis=0))
    rhs = (v[U] < 0).astype(np.int64)
    z0, N = gf2_solve(alpha[U][:, W], rhs)
    out, truncated = [], False
    if z0 is not None:
        total = 2 ** N.shape[0] if N.shape[0] < 63 else np.inf
        truncated = total > cap
        for bits in itertools.islice(itertools.product((0, 1), repeat=N.shape[0]), cap):
            zw = (z0 + np.asarray(bits, dtype=np.int64) @ N) % 2 if N.shape[0] else z0
            z = np.zeros(n, dtype=np.int64)
            z[W] = zw
            sgn = np.ones(n)
            sel = support[z[support] == 1]
            sgn[sel] = -1.0
            out.append(sgn)
    elif heuristic:
        out.append(greedy_signs(alpha, v))
    return out, truncated


def variable_magnitudes(alpha, v, vhat, blocks, Y: ConicSet | None,
                        s: RecoverySettings | None = None):
    """Candidate magnitudes ``|x|`` from the companion moment vector.

    Each dual block with ``vhat_j > eps_t`` gives ``exp(z_j / vhat_j)``; when
    none reproduces ``|v|`` the least-squares fit over ``Y`` is appended, with
    ``alpha_i y <= log eps_0`` on rows where ``v`` vanishes.
    """
    s = s or RecoverySettings()
    alpha = np.asarray(alpha, dtype=float)
    v = np.asarray(v, dtype=float)
    if np.any(np.asarray(vhat) < -1e-9):
        raise ValueError("the companion moment vector must be nonnegative")
    out = []
    for i, vi, zi in blocks:
        if vi <= s.eps_t:
            continue
        # overflowing magnitudes become inf and are dropped by the final filter
        with np.errstate(over="ignore"):
            out.append(np.exp(np.asarray(zi, dtype=float) / vi))
    scale = _normalizer(alpha, np.abs(v), s.eps_t)
    av = np.abs(v) / scale
    nz = av > s.eps_0
    logv = np.log(av[nz])
    with np.errstate(divide="ignore"):
        matched = any(_matches(alpha[nz], np.log(x), logv, s.match_tol) for x in out)
    if not matched and Y is not None:
        upper = (alpha[~nz], np.full(int((~nz).sum()), np.log(s.eps_0)))
        y = least_squares_fit(alpha[nz], logv, Y, upper=upper)
        if y is not None:
            out.append(np.exp(y))
    return out


def poly_recover(f, g, phi, m, s: RecoverySettings | None = None,
                 D: SignSymmetricDomain | None = None) -> CandidateList:
    """Candidate minimizers from a polynomial dual SAGE solution.

    Candidates combine every recovered magnitude with every recovered sign
    pattern (only ``+1`` on orthant domains), then are filtered and sorted.
    """
    s = s or RecoverySettings()
    D = D if D is not None else m.domain
    basis = np.asarray(m.u_basis if m.u_basis is not None else m.basis)
    v = np.asarray(m.v, dtype=float)
    vhat = np.asarray(m.vhat if m.vhat is not None else np.abs(v), dtype=float)
    diags = []
    if np.any(vhat < 0):
        # an inexact solve can leave small negative companion moments
        diags.append(f"clipped negative companion moments (min {vhat.min():.2e})")
        vhat = np.maximum(vhat, 0.0)
    if np.all(vhat <= s.eps_t):
        return CandidateList([], diagnostics=["all moments are numerically zero"])
    mags = variable_magnitudes(basis, v, vhat, m.blocks, D.Y if D is not None else None, s)
    if not mags:
        diags.append("no magnitude candidates")
    signs, truncated = [np.ones(basis.shape[1])], False
    if D is None or not D.nonneg_orthant:
        v0 = _normalizer(basis, v, s.eps_t)
        found, truncated = variable_signs(basis, v, s.heuristic, s.sign_cap,
                                          sign_tol=s.sign_tol * abs(v0))
        signs = _unique([np.ones(basis.shape[1])] + found)
    points = [(mag * sg, f"magnitude {a}, signs {b}")
              for a, mag in enumerate(mags) for b, sg in enumerate(signs)]
    return _filtered(points, f, g, phi, s, truncated, diags)


def _unique(vectors):
    seen, out = set(), []
    for v in vectors:
        key = tuple(np.asarray(v).tolist())
        if key not in seen:
            seen.add(key)
            out.append(np.asarray(v, dtype=float))
    return out


# ------------------------------------------------------------- refinement

@dataclass
class RefineResult:
    x: np.ndarray
    objective: float
    violation: float
    nfev: int
    exhausted: bool
    improved: bool
    message: str = ""


def domain_constraints(X) -> list:
    """Smooth-enough inequality functions describing ``X`` where available."""
    if isinstance(X, SignSymmetricDomain):
        Y = X.Y
        out = []
        if X.nonneg_orthant:
            out += [(lambda x, j=j: float(x[j])) for j in range(Y.n)]
        if Y.is_whole_space or Y.n_aux or any(k != "nonneg" for k, _ in Y.cones):
            return out
        for a, b in zip(Y.A.toarray(), Y.b):
            # a . log|x| + b >= 0  <=>  prod |x|^(-a) <= exp(b)
            def h(x, a=a, b=b):
                with np.errstate(all="ignore"):
                    val = np.exp(b) - np.prod(np.abs(x) ** (-a))
                return float(val) if np.isfinite(val) else -1e300
            out.append(h)
        return out
    if X is None or X.is_whole_space:
        return []
    if X.constraints is not None:
        return list(X.constraints)
    if X.n_aux == 0 and all(k in ("nonneg", "zero") for k, _ in X.cones):
        A = X.A.toarray()
        out, pos = [], 0
        for kind, dim in X.cones:
            for r in range(pos, pos + dim):
                h = (lambda x, a=A[r], b=X.b[r]: float(a @ x + b))
                out.append(h)
                if kind == "zero":
                    out.append(lambda x, a=A[r], b=X.b[r]: -float(a @ x + b))
            pos += dim
        return out
    return []


def refine(x0, f, g=(), phi=(), X=None, rhobeg: float = 1.0, rhoend: float = 1e-7,
           maxfun: int = 100_000, feas_tol: float = 1e-8) -> RefineResult:
    """Local derivative-free refinement by COBYLA.

    Minimizes ``f`` subject to ``g >= 0``, ``phi = 0`` (as two inequalities)
    and the inequalities describing ``X`` when available.  The returned point
    is never worse than ``x0`` in the merit ordering (violation above
    ``feas_tol`` first, objective second).
    """
    x0 = np.asarray(x0, dtype=float)
    cons = [{"type": "ineq", "fun": h} for h in list(g) + domain_constraints(X)]
    for h in phi:
        cons.append({"type": "ineq", "fun": (lambda x, h=h: float(h(x)))})
        cons.append({"type": "ineq", "fun": (lambda x, h=h: -float(h(x)))})

    def merit(x):
        c = evaluate(x, f, g, phi)
        extra = [h(x) for h in domain_constraints(X)]
        viol = max([c.violation] + [-float(e) for e in extra])
        return max(viol - feas_tol, 0.0), c.objective, viol

    def fobj(x):
        with np.errstate(all="ignore"):
            val = float(f(x))
        return val if np.isfinite(val) else 1e300

    with np.errstate(all="ignore"):
        res = minimize(fobj, x0, method="COBYLA", constraints=cons,
                       options={"rhobeg": rhobeg, "tol": rhoend, "maxiter": int(maxfun)})
    m0, m1 = merit(x0), merit(res.x)
    better = np.all(np.isfinite(res.x)) and (m1[0], m1[1]) <= (m0[0], m0[1])
    x = res.x if better else x0
    mm = m1 if better else m0
    nfev = int(getattr(res, "nfev", 0))
    return RefineResult(np.asarray(x, dtype=float), mm[1], mm[2], nfev,
                        exhausted=nfev >= maxfun, improved=bool(better),
                        message=str(res.message))


# --------------------------------------------------------------- pipeline

def recover(result, problem, settings: RecoverySettings | None = None,
            do_refine: bool = False, refine_kw=None) -> CandidateList:
    """Recover candidates for ``problem`` from a solved relaxation.

    ``result`` comes from ``relaxations.solve_spec``; recovery runs on the
    translated problem that was relaxed and maps points back.  With
    ``do_refine`` every candidate is refined before the final filter.
    """
    s = settings or RecoverySettings()
    work = result.spec if result.spec is not None else problem
    d = result.shift if result.shift is not None else np.zeros(problem.n)
    m = result.moments("main")
    if work.kind == "signomial":
        raw = sig_recover(work.f, [], [], m, _loose(s), X=work.X)
    else:
        raw = poly_recover(work.f, [], [], m, _loose(s), D=work.X)
    f, g, phi = problem.f, list(problem.g), list(problem.phi)
    points = [(problem.map_back(c.x, d), c.source) for c in raw]
    if do_refine:
        kw = dict(refine_kw or {})
        points = [(refine(x, f, g, phi, X=problem.X, **kw).x, src + ", refined")
                  for x, src in points]
    # membership in X is checked alongside g, after the constraints of g
    gx = g + domain_constraints(problem.X)
    return _filtered(points, f, gx, phi, s, raw.truncated, raw.diagnostics)


def _loose(s: RecoverySettings) -> RecoverySettings:
    # the raw pass keeps everything; filtering happens on the original problem
    return RecoverySettings(np.inf, np.inf, s.eps_0, s.eps_t, s.sign_cap, s.heuristic,
                            s.match_tol, s.sign_tol)
