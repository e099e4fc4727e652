"""Standard-form conic programs, solutions and residual reports.

The standard form is::

    minimize    c^T x
    subject to  A x + s = b,   s in K

with ``K`` the product of a zero cone, a nonnegative orthant, second-order
cones and exponential cones, in that row order.  The associated dual is::

    maximize    -b^T y
    subject to  A^T y + c = 0,   y in K*
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp


@dataclass
class SolveSettings:
    max_iter: int = 200
    eps_abs: float = 1e-8
    eps_rel: float = 1e-8
    eps_gap: float = 1e-8
    scaling: bool = True
    verbose: bool = False
    time_limit: float = float("inf")

    def __post_init__(self):
        if min(self.eps_abs, self.eps_rel, self.eps_gap) <= 0:
            raise ValueError("tolerances must be positive")


@dataclass
class Solution:
    status: str
    x: np.ndarray
    s: np.ndarray
    y: np.ndarray
    primal_objective: float
    dual_objective: float
    iterations: int = 0
    solve_time: float = 0.0
    residuals: dict = field(default_factory=dict)
    backend: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "optimal"


class ConicProgram:
    """``min c^T x`` subject to ``A x + s = b``, ``s`` in the cone product."""

    def __init__(self, c, A, b, cones, var_names=None, offset: float = 0.0,
                 sense: float = 1.0):
        self.c = np.asarray(c, dtype=float)
        self.A = sp.csc_matrix(A)
        self.b = np.asarray(b, dtype=float)
        self.cones = {"z": int(cones.get("z", 0)), "l": int(cones.get("l", 0)),
                      "q": [int(d) for d in cones.get("q", [])],
                      "ep": int(cones.get("ep", 0))}
        self.var_names = dict(var_names or {})
        # objective of the modeled problem is sense * (c^T x + offset)
        self.offset = float(offset)
        self.sense = float(sense)
        m, n = self.A.shape
        if self.c.size != n or self.b.size != m:
            raise ValueError("inconsistent conic program dimensions")
        if self.cone_rows != m:
            raise ValueError(f"cone dimensions sum to {self.cone_rows}, A has {m} rows")

    @property
    def cone_rows(self) -> int:
        k = self.cones
        return k["z"] + k["l"] + sum(k["q"]) + 3 * k["ep"]

    @property
    def shape(self):
        return self.A.shape

    def var(self, x, name: str) -> np.ndarray:
        start, size = self.var_names[name]
        return np.asarray(x)[start:start + size]

    def model_value(self, conic_objective: float) -> float:
        return self.sense * (conic_objective + self.offset)

    def to_dict(self) -> dict:
        A = self.A.tocoo()
        return {
            "format": "conic-standard-v1",
            "objective": self.c.tolist(),
            "offset": self.offset,
            "sense": self.sense,
            "A": {"shape": list(A.shape), "rows": A.row.tolist(),
                  "cols": A.col.tolist(), "vals": A.data.tolist()},
            "b": self.b.tolist(),
            "cones": self.cones,
            "var_names": {k: list(v) for k, v in self.var_names.items()},
        }

    @classmethod
    def from_dict(cls, d: dict):
        a = d["A"]
        A = sp.coo_matrix((a["vals"], (a["rows"], a["cols"])), shape=tuple(a["shape"]))
        names = {k: tuple(v) for k, v in d.get("var_names", {}).items()}
        return cls(d["objective"], A, d["b"], d["cones"], names,
                   offset=d.get("offset", 0.0), sense=d.get("sense", 1.0))

    def dump(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def dual_program(self):
        """The dual written again in standard form.

        Variables are ``y``; the dual max ``-b^T y`` becomes ``min b^T y`` with
        ``A^T y + c = 0`` and ``y`` in the dual cone.  Exponential dual factors
        are expressed through the primal exponential cone.
        """
        from .model import Model, lin

        md = Model()
        y = md.variable("y", self.A.shape[0])
        md.add_zero(lin(self.A.T, y) + self.c)
        k = self.cones
        cones = [("zero", k["z"])] if k["z"] else []
        if k["l"]:
            cones.append(("nonneg", k["l"]))
        cones += [("soc", d) for d in k["q"]]
        cones += [("exp", 3)] * k["ep"]
        md.add_dual_cones(y, cones)
        md.minimize(y.dot(self.b))
        return md.compile()


def _soc_dist(v):
    t, x = v[0], v[1:]
    nx = np.linalg.norm(x)
    if nx <= t:
        return 0.0
    if nx <= -t:
        return float(np.linalg.norm(v))
    a = (nx + t) / 2
    return float(np.linalg.norm(v - np.concatenate([[a], a * x / nx])))


def cone_distance(v, cones, dual: bool = False) -> float:
    """Euclidean distance from ``v`` to the cone product (or its dual)."""
    from .expcone import project_exp_cone, project_exp_dual

    v = np.asarray(v, dtype=float)
    d2 = 0.0
    pos = 0
    if cones["z"]:
        if not dual:
            d2 += float(np.sum(v[:cones["z"]] ** 2))
        pos += cones["z"]
    if cones["l"]:
        seg = v[pos:pos + cones["l"]]
        d2 += float(np.sum(np.minimum(seg, 0) ** 2))
        pos += cones["l"]
    for q in cones["q"]:
        d2 += _soc_dist(v[pos:pos + q]) ** 2
        pos += q
    if cones["ep"]:
        seg = v[pos:pos + 3 * cones["ep"]].reshape(-1, 3)
        proj = project_exp_dual(seg) if dual else project_exp_cone(seg)
        d2 += float(np.sum((seg - proj) ** 2))
    return float(np.sqrt(d2))


def residuals(prog: ConicProgram, x, s, y) -> dict:
    """Recompute feasibility and gap residuals from the raw vectors."""
    x, s, y = (np.asarray(v, dtype=float) for v in (x, s, y))
    r_prim = prog.A @ x + s - prog.b
    r_dual = prog.A.T @ y + prog.c
    pobj = float(prog.c @ x)
    dobj = float(-prog.b @ y)
    return {
        "primal": float(np.linalg.norm(r_prim)),
        "dual": float(np.linalg.norm(r_dual)),
        "gap": abs(pobj - dobj),
        "complementarity": abs(float(s @ y)),
        "slack_cone": cone_distance(s, prog.cones),
        "dual_cone": cone_distance(y, prog.cones, dual=True),
        "primal_objective": pobj,
        "dual_objective": dobj,
    }
