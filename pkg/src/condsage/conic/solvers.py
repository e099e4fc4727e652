"""Solver backends for standard-form conic programs.

``clarabel`` is an interior-point method and the default.  ``admm`` is a
self-contained operator-splitting method on the homogeneous self-dual
embedding: it alternates a factorized linear solve with projection onto the
cone product and reads off infeasibility certificates from the embedding.
"""

from __future__ import annotations

import logging
import time
from dataclasses import replace

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .expcone import project_exp_cone
from .program import ConicProgram, SolveSettings, Solution, residuals

log = logging.getLogger(__name__)

BACKENDS = ("clarabel", "admm")


def solve(prog: ConicProgram, settings: SolveSettings | None = None,
          backend: str = "clarabel") -> Solution:
    settings = settings or SolveSettings()
    if backend == "clarabel":
        sol = _solve_clarabel(prog, settings)
    elif backend == "admm":
        sol = _solve_admm(prog, settings)
    else:
        raise ValueError(f"unknown backend {backend!r}; choose from {BACKENDS}")
    sol.residuals = residuals(prog, sol.x, sol.s, sol.y)
    return sol


# ---------------------------------------------------------------- clarabel

_CLARABEL_STATUS = {
    "Solved": "optimal",
    "AlmostSolved": "inaccurate",
    "PrimalInfeasible": "primal_infeasible",
    "AlmostPrimalInfeasible": "primal_infeasible",
    "DualInfeasible": "dual_infeasible",
    "AlmostDualInfeasible": "dual_infeasible",
    "MaxIterations": "inaccurate",
    "MaxTime": "inaccurate",
    "NumericalError": "failed",
    "InsufficientProgress": "inaccurate",
}


# attempts tried in order when a run stalls: shorter steps often rescue
# exponential-cone programs whose solutions sit on extreme rays
_CLARABEL_RETRIES = (
    {},
    {"equilibrate": "toggle"},
    {"max_step_fraction": 0.9},
    {"max_step_fraction": 0.8, "equilibrate": "toggle"},
    {"max_step_fraction": 0.7},
)


def _solve_clarabel(prog: ConicProgram, settings: SolveSettings) -> Solution:
    """Interior-point solve, retried with damped steps or toggled scaling."""
    best = None
    elapsed = 0.0
    for opts in _CLARABEL_RETRIES:
        # the time limit bounds the whole ladder, not each attempt
        remaining = settings.time_limit - elapsed
        if best is not None and remaining <= 0:
            break
        sol = _clarabel_once(prog, replace(settings, time_limit=remaining), opts)
        elapsed += sol.solve_time
        if opts:
            log.info("clarabel retry %s: %s", opts, sol.status)
        if sol.status not in ("inaccurate", "failed"):
            best = sol
            break
        if best is None or _worse(best, sol, prog):
            best = sol
    best.solve_time = elapsed
    return best


def _residual_score(sol: Solution, prog: ConicProgram) -> float:
    if sol.status == "failed" or not np.all(np.isfinite(sol.x)):
        return np.inf
    r = residuals(prog, sol.x, sol.s, sol.y)
    return max(r["primal"], r["dual"], r["gap"])


def _worse(a: Solution, b: Solution, prog: ConicProgram) -> bool:
    """True when ``b`` is a better inconclusive iterate than ``a``."""
    return _residual_score(b, prog) < _residual_score(a, prog)


def _clarabel_once(prog: ConicProgram, settings: SolveSettings, opts: dict) -> Solution:
    import clarabel

    m, n = prog.shape
    k = prog.cones
    cones = []
    if k["z"]:
        cones.append(clarabel.ZeroConeT(k["z"]))
    if k["l"]:
        cones.append(clarabel.NonnegativeConeT(k["l"]))
    cones += [clarabel.SecondOrderConeT(d) for d in k["q"]]
    cones += [clarabel.ExponentialConeT()] * k["ep"]
    st = clarabel.DefaultSettings()
    st.verbose = settings.verbose
    st.max_iter = settings.max_iter
    st.tol_feas = settings.eps_abs
    st.tol_gap_abs = settings.eps_gap
    st.tol_gap_rel = settings.eps_rel
    scaling = settings.scaling
    if opts.get("equilibrate") == "toggle":
        scaling = not scaling
    st.equilibrate_enable = scaling
    if "max_step_fraction" in opts:
        st.max_step_fraction = opts["max_step_fraction"]
    if np.isfinite(settings.time_limit):
        st.time_limit = settings.time_limit
    P = sp.csc_matrix((n, n))
    t0 = time.perf_counter()
    solver = clarabel.DefaultSolver(P, prog.c, sp.csc_matrix(prog.A), prog.b, cones, st)
    res = solver.solve()
    elapsed = time.perf_counter() - t0
    status = _CLARABEL_STATUS.get(str(res.status), "failed")
    x, s, y = np.array(res.x), np.array(res.s), np.array(res.z)
    if status == "primal_infeasible":
        pobj, dobj = np.inf, np.inf
    elif status == "dual_infeasible":
        pobj, dobj = -np.inf, -np.inf
    else:
        pobj, dobj = float(prog.c @ x), float(-prog.b @ y)
    return Solution(status, x, s, y, pobj, dobj, iterations=int(res.iterations),
                    solve_time=elapsed, backend="clarabel")


# -------------------------------------------------------------------- admm

class _ConeProjector:
    def __init__(self, cones):
        self.cones = cones
        self.nz = cones["z"]
        self.nl = cones["l"]
        self.q = cones["q"]
        self.ep = cones["ep"]

    def dual(self, v):
        """Project onto the dual cone product (zero cone -> free)."""
        out = v.copy()
        pos = self.nz
        out[pos:pos + self.nl] = np.maximum(v[pos:pos + self.nl], 0)
        pos += self.nl
        for d in self.q:
            out[pos:pos + d] = _project_soc(v[pos:pos + d])
            pos += d
        if self.ep:
            seg = v[pos:pos + 3 * self.ep].reshape(-1, 3)
            out[pos:] = (seg + project_exp_cone(-seg)).ravel()
        return out

    def primal(self, v):
        out = v.copy()
        out[:self.nz] = 0.0
        pos = self.nz
        out[pos:pos + self.nl] = np.maximum(v[pos:pos + self.nl], 0)
        pos += self.nl
        for d in self.q:
            out[pos:pos + d] = _project_soc(v[pos:pos + d])
            pos += d
        if self.ep:
            out[pos:] = project_exp_cone(v[pos:].reshape(-1, 3)).ravel()
        return out

    def block_index(self):
        """Row groups that must share one scaling factor."""
        groups = []
        pos = self.nz + self.nl
        for d in self.q:
            groups.append(np.arange(pos, pos + d))
            pos += d
        for _ in range(self.ep):
            groups.append(np.arange(pos, pos + 3))
            pos += 3
        return groups


def _project_soc(v):
    t, x = v[0], v[1:]
    nx = np.linalg.norm(x)
    if nx <= t:
        return v.copy()
    if nx <= -t:
        return np.zeros_like(v)
    a = (nx + t) / 2
    return np.concatenate([[a], a * x / nx])


def _equilibrate(A, proj: _ConeProjector, iters=25):
    """Ruiz scaling ``D A E`` with D constant on each non-separable cone."""
    m, n = A.shape
    D = np.ones(m)
    E = np.ones(n)
    groups = proj.block_index()
    As = sp.csr_matrix(A)
    for _ in range(iters):
        Ac = abs(As)
        rn = np.sqrt(np.asarray(Ac.max(axis=1).todense()).ravel())
        cn = np.sqrt(np.asarray(Ac.max(axis=0).todense()).ravel())
        for g in groups:
            rn[g] = rn[g].max() if rn[g].size else 1.0
        rn[rn < 1e-8] = 1.0
        cn[cn < 1e-8] = 1.0
        D /= rn
        E /= cn
        As = sp.diags(1 / rn) @ As @ sp.diags(1 / cn)
    return sp.csc_matrix(As), D, E


def _solve_admm(prog: ConicProgram, settings: SolveSettings,
                alpha: float = 1.5, max_iter: int | None = None) -> Solution:
    t_start = time.perf_counter()
    m, n = prog.shape
    proj = _ConeProjector(prog.cones)
    A, b, c = prog.A, prog.b.copy(), prog.c.copy()
    if settings.scaling and m and n:
        A, D, E = _equilibrate(A, proj)
        b, c = D * b, E * c
    else:
        D, E = np.ones(m), np.ones(n)
        A = sp.csc_matrix(A)
    nb, nc = max(1.0, np.linalg.norm(b)), max(1.0, np.linalg.norm(c))
    sb, sc = 1.0 / nb, 1.0 / nc
    b, c = b * sb, c * sc

    # (I + A^T A) via the quasi-definite system [[I, A^T], [A, -I]]
    K = sp.bmat([[sp.identity(n), A.T], [A, -sp.identity(m)]], format="csc")
    lu = spla.splu(K)

    def solve_M(wx, wy):
        rhs = np.concatenate([wx - A.T @ wy, np.zeros(m)])
        zx = lu.solve(rhs)[:n]
        return zx, wy + A @ zx

    hx, hy = solve_M(c, b)
    denom = 1.0 + c @ hx + b @ hy

    u = np.zeros(n + m + 1)
    v = np.zeros(n + m + 1)
    u[-1] = v[-1] = 1.0
    iters = max_iter or max(settings.max_iter, 1) * 100
    status = "inaccurate"
    it = 0
    eps = settings.eps_abs
    for it in range(1, iters + 1):
        w = u + v
        wx, wy, wt = w[:n], w[n:n + m], w[-1]
        zx, zy = solve_M(wx, wy)
        tau_t = (wt + c @ zx + b @ zy) / denom
        ut = np.concatenate([zx - tau_t * hx, zy - tau_t * hy, [tau_t]])
        ut = alpha * ut + (1 - alpha) * u
        un = ut - v
        u = np.concatenate([un[:n], proj.dual(un[n:n + m]), [max(un[-1], 0.0)]])
        v = v - ut + u

        if it % 20 and it != iters:
            continue
        x, y, tau = u[:n], u[n:n + m], u[-1]
        s = v[n:n + m]
        if tau > 1e-12:
            xs, ys, ss = x / tau, y / tau, s / tau
            rp = np.linalg.norm((A @ xs + ss - b) / D) / sb
            rd = np.linalg.norm((A.T @ ys + c) / E) / sc
            po, do = (c @ xs) / (sb * sc), -(b @ ys) / (sb * sc)
            gap = abs(po - do)
            if (rp <= eps * (1 + nb) and rd <= eps * (1 + nc)
                    and gap <= settings.eps_gap * (1 + abs(po) + abs(do))):
                status = "optimal"
                break
        by, cx = b @ y, c @ x
        if by < -1e-12 and np.linalg.norm(A.T @ y) <= eps * -by:
            status = "primal_infeasible"
            break
        if cx < -1e-12 and np.linalg.norm(A @ x + s) <= eps * -cx:
            status = "dual_infeasible"
            break
        if time.perf_counter() - t_start > settings.time_limit:
            break

    x, y, tau = u[:n], u[n:n + m], u[-1]
    s = v[n:n + m]
    if status in ("optimal", "inaccurate") and tau > 1e-12:
        x, y, s = x / tau, y / tau, s / tau
        x = E * x / sb
        y = D * y / sc
        s = s / D / sb
        pobj, dobj = float(prog.c @ x), float(-prog.b @ y)
    elif status == "primal_infeasible":
        y = D * y / -(b @ y)
        x, s = np.full(n, np.nan), np.full(m, np.nan)
        pobj = dobj = np.inf
    elif status == "dual_infeasible":
        x = E * x / -(c @ x)
        s = s / D
        y = np.full(m, np.nan)
        pobj = dobj = -np.inf
    else:
        status = "failed"
        pobj = dobj = np.nan
    return Solution(status, x, s, y, pobj, dobj, iterations=it,
                    solve_time=time.perf_counter() - t_start, backend="admm")
