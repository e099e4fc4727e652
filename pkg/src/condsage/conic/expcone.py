"""Euclidean projection onto the exponential cone.

The cone is the closure of ``{(r, s, t) : s > 0, s exp(r / s) <= t}``.  Points
that are neither in the cone nor in its polar project onto the boundary
``s (rho, 1, exp(rho))``.  The optimality conditions pair that boundary point
with the dual-cone ray ``mu (-1, rho - 1, exp(-rho))`` and reduce to a single
monotone equation in ``rho``, solved here by bisection polished with Newton.
"""

from __future__ import annotations

import numpy as np

def _in_cone(r, s, t, tol=0.0):
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        pos = (s > 0) & (s * np.exp(r / np.where(s > 0, s, 1.0)) <= t + tol)
    edge = (s <= tol) & (s >= -tol) & (r <= tol) & (t >= -tol)
    return pos | edge


def _in_polar(r, s, t):
    # -v in the dual cone {u < 0, -u exp(v/u) <= e w} U {u = 0, v >= 0, w >= 0}
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        pos = (r > 0) & (r * np.exp(s / np.where(r > 0, r, 1.0)) <= -np.e * t)
    edge = (r == 0) & (s <= 0) & (t <= 0)
    return pos | edge


def _coeffs(rho, r0, s0):
    den = rho * rho - rho + 1.0
    s = ((rho - 1.0) * r0 + s0) / den
    mu = (r0 - rho * s0) / den
    return s, mu


def _h(rho, r0, s0, t0):
    s, mu = _coeffs(rho, r0, s0)
    with np.errstate(over="ignore", invalid="ignore"):
        return s * np.exp(rho) - mu * np.exp(-rho) - t0


def _interval(r0, s0):
    """Range of rho with both boundary coefficients positive."""
    lo = np.full(r0.shape, -np.inf)
    hi = np.full(r0.shape, np.inf)
    with np.errstate(divide="ignore", invalid="ignore"):
        rpos, rneg, rzero = r0 > 0, r0 < 0, r0 == 0
        # s > 0  <=>  (rho - 1) r0 + s0 > 0
        lo = np.where(rpos, np.maximum(lo, 1.0 - s0 / r0), lo)
        hi = np.where(rneg, np.minimum(hi, 1.0 - s0 / r0), hi)
        # mu > 0  <=>  r0 - rho s0 > 0
        hi = np.where(s0 > 0, np.minimum(hi, r0 / s0), hi)
        lo = np.where(s0 < 0, np.maximum(lo, r0 / s0), lo)
        hi = np.where(rzero & (s0 > 0), np.minimum(hi, 0.0), hi)
    return lo, hi


def _bracket(r0, s0, t0):
    lo, hi = _interval(r0, s0)
    # replace infinite ends by expanding steps until h changes sign
    for end, sign in ((lo, -1.0), (hi, 1.0)):
        inf = ~np.isfinite(end)
        other = hi if sign < 0 else lo
        base = np.where(np.isfinite(other), other, 0.0)
        width = np.ones_like(base)
        idx = np.flatnonzero(inf)
        for _ in range(2100):
            if idx.size == 0:
                break
            cand = base[idx] + sign * width[idx]
            val = _h(cand, r0[idx], s0[idx], t0[idx])
            done = (val * sign) > 0
            end[idx[done]] = cand[done]
            width[idx] *= 2.0
            idx = idx[~done]
            if np.any(~np.isfinite(width[idx])):
                end[idx] = sign * np.finfo(float).max
                break
    return lo, hi


def _solve_rho(r0, s0, t0, iters=200):
    lo, hi = _bracket(r0, s0, t0)
    for _ in range(iters):
        mid = 0.5 * lo + 0.5 * hi
        val = _h(mid, r0, s0, t0)
        up = val > 0
        hi = np.where(up, mid, hi)
        lo = np.where(up, lo, mid)
        if np.all((hi - lo) <= 4e-16 * np.maximum(np.abs(lo), np.abs(hi))):
            break
    rho = 0.5 * lo + 0.5 * hi
    # a few Newton steps kept inside the bracket
    for _ in range(3):
        f0 = _h(rho, r0, s0, t0)
        eps = 1e-7 * np.maximum(1.0, np.abs(rho))
        d = (_h(rho + eps, r0, s0, t0) - _h(rho - eps, r0, s0, t0)) / (2 * eps)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(np.isfinite(d) & (d != 0), f0 / d, 0.0)
        cand = rho - step
        ok = np.isfinite(cand) & (cand >= lo) & (cand <= hi)
        with np.errstate(invalid="ignore"):
            better = ok & (np.abs(_h(cand, r0, s0, t0)) < np.abs(f0))
        rho = np.where(better, cand, rho)
    return rho


def _kkt_merit(q, w, scale):
    """Largest violation of q in K, w - q in the polar and their orthogonality."""
    r, s, t = q[:, 0], q[:, 1], q[:, 2]
    a, b, c = (w - q).T
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        kin = np.where(s > 0, np.maximum(s * np.exp(r / np.where(s > 0, s, 1.0)) - t, 0.0),
                       np.maximum.reduce([-s, np.maximum(r, 0.0), np.maximum(-t, 0.0)]))
        pol = np.where(a > 0, np.maximum(a * np.exp(b / np.where(a > 0, a, 1.0)) + np.e * c, 0.0),
                       np.maximum.reduce([-a, np.maximum(b, 0.0), np.maximum(c, 0.0)]))
    with np.errstate(over="ignore", invalid="ignore"):
        orth = np.abs(np.sum(q * (w - q), axis=1))
    m = np.maximum.reduce([kin / scale, pol / scale, orth / scale ** 2])
    return np.where(np.isfinite(m), m, np.inf)


def project_exp_cone(v) -> np.ndarray:
    """Project each row ``(r, s, t)`` of ``v`` onto the exponential cone."""
    v = np.asarray(v, dtype=float)
    single = v.ndim == 1
    V = v.reshape(-1, 3)
    r0, s0, t0 = V[:, 0], V[:, 1], V[:, 2]
    out = np.empty_like(V)

    inside = _in_cone(r0, s0, t0)
    polar = _in_polar(r0, s0, t0) & ~inside
    corner = (r0 <= 0) & (s0 <= 0) & ~inside & ~polar
    rest = ~(inside | polar | corner)

    out[inside] = V[inside]
    out[polar] = 0.0
    out[corner, 0] = r0[corner]
    out[corner, 1] = 0.0
    out[corner, 2] = np.maximum(t0[corner], 0.0)

    if np.any(rest):
        r, s, t = r0[rest], s0[rest], t0[rest]
        w = np.stack([r, s, t], axis=1)
        rho = _solve_rho(r, s, t)
        sc, mu = _coeffs(rho, r, s)
        sc, mu = np.maximum(sc, 0.0), np.maximum(mu, 0.0)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            tc = np.where(sc > 0, np.exp(np.log(sc) + rho), 0.0)
            em = np.where(mu > 0, np.exp(np.log(mu) - rho), 0.0)
        # the scale s of the boundary point can lose digits to cancellation;
        # it is also recovered from the last coordinate, t_q = t + mu exp(-rho).
        # Candidates on the boundary and the simple feasible guess are compared
        # through the optimality conditions
        with np.errstate(over="ignore", invalid="ignore"):
            s2 = np.maximum((t + em) * np.exp(-rho), 0.0)
        cands = [
            np.stack([sc * rho, sc, tc], axis=1),
            np.stack([s2 * rho, s2, np.where(s2 > 0, t + em, 0.0)], axis=1),
            np.stack([np.minimum(r, 0.0), np.zeros_like(r), np.maximum(t, 0.0)], axis=1),
        ]
        scale = np.maximum(1.0, np.linalg.norm(w, axis=1))
        merits = np.stack([_kkt_merit(c, w, scale) for c in cands], axis=1)
        pick = np.argmin(merits, axis=1)
        out[rest] = np.stack(cands, axis=1)[np.arange(pick.size), pick]
    return out[0] if single else out.reshape(v.shape)


def project_exp_dual(v) -> np.ndarray:
    """Projection onto the dual cone via Moreau: ``v + P_K(-v)``."""
    v = np.asarray(v, dtype=float)
    return v + project_exp_cone(-v)


def in_exp_cone(v, tol: float = 1e-9) -> np.ndarray:
    V = np.asarray(v, dtype=float).reshape(-1, 3)
    return _in_cone(V[:, 0], V[:, 1], V[:, 2], tol)
