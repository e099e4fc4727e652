"""JSON problem files.

A problem file is a JSON object::

    {
      "kind": "signomial" | "polynomial",
      "n": 3,
      "objective": [{"c": 1.0, "a": [1, 0, 0]}, ...],
      "ineqs": [[terms], ...],              # g(x) >= 0
      "eqs": [[terms], ...],                # phi(x) = 0
      "domain": {"type": "box", "lower": [...], "upper": [...],
                 "partition": {"domain": [0, 2], "lagrangian": [1]}},
      "level": [p, q, ell] | {"minimax_free": [p, q]} | {"minimax_free": [ell]},
      "recovery": {"eps_ineq": 1e-8, ...},
      "geometric": false
    }

Signomial problems are written in exponential form.  The partition lists
which inequalities are folded into the domain and which enter the
Lagrangian; by default every inequality goes to the Lagrangian.  Domain
types are ``whole_space`` and ``box`` (log-space bounds, ``null`` for
infinite) for signomials, and ``sign_symmetric``, ``orthant``, ``log_box``,
``log_annulus`` and ``log_ball`` for polynomials; only ``whole_space``,
``box`` and ``orthant`` accept folded inequalities.  ``geometric`` only
changes how points are displayed (``exp(x)``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .recovery import RecoverySettings
from .relaxations import HierarchyLevel, ProblemSpec
from .sets import (
    SignSymmetricDomain,
    box,
    from_signomial_constraints,
    intersect,
    log_annulus,
    log_ball,
    log_box,
    orthant_domain,
    whole_space,
)
from .symbolic import Polynomial, Signomial

SIG_DOMAINS = ("whole_space", "box")
POLY_DOMAINS = ("sign_symmetric", "orthant", "log_box", "log_annulus", "log_ball")
RECOVERY_KEYS = ("eps_ineq", "eps_eq", "eps_0", "eps_t", "sign_cap", "heuristic",
                 "match_tol", "sign_tol")
TOP_KEYS = ("kind", "n", "objective", "ineqs", "eqs", "domain", "level", "recovery",
            "geometric")


class ProblemFileError(ValueError):
    """Malformed or invalid problem file; ``location`` names the offending place."""

    def __init__(self, message: str, location: str = "$", offset: int | None = None):
        self.location = location
        self.offset = offset
        where = location if offset is None else f"{location} (byte offset {offset})"
        super().__init__(f"{where}: {message}")


@dataclass
class ProblemFile:
    kind: str
    n: int
    objective: Signomial
    ineqs: list = field(default_factory=list)
    eqs: list = field(default_factory=list)
    domain: dict = field(default_factory=lambda: {"type": "whole_space"})
    level: HierarchyLevel = field(default_factory=HierarchyLevel)
    recovery: dict = field(default_factory=dict)
    geometric: bool = False

    # -------------------------------------------------------- partition
    def partition(self):
        """``(domain_indices, lagrangian_indices)`` into ``ineqs``."""
        part = self.domain.get("partition") or {}
        dom = list(part.get("domain", []))
        lag = part.get("lagrangian")
        lag = [i for i in range(len(self.ineqs)) if i not in dom] if lag is None else list(lag)
        return dom, lag

    def domain_set(self):
        d = self.domain
        t = d.get("type", "whole_space")
        dom, _ = self.partition()
        folded = [self.ineqs[i] for i in dom]
        n = self.n
        if t == "whole_space":
            return from_signomial_constraints(folded, n) if folded else whole_space(n)
        if t == "box":
            lo = np.array([-np.inf if v is None else v for v in d["lower"]], dtype=float)
            hi = np.array([np.inf if v is None else v for v in d["upper"]], dtype=float)
            B = box(lo, hi)
            if not folded:
                return B
            X = intersect(B, from_signomial_constraints(folded, n))
            return X
        if t == "orthant":
            return orthant_domain(n, folded)
        if folded:
            raise ProblemFileError(f"domain type {t!r} cannot absorb inequalities",
                                   "$.domain.partition")
        orth = bool(d.get("orthant", False))
        if t == "sign_symmetric":
            return SignSymmetricDomain(whole_space(n))
        if t == "log_box":
            return log_box(np.broadcast_to(np.asarray(d["a"], dtype=float), (n,)), orth)
        if t == "log_annulus":
            return log_annulus(d["lower"], d["upper"], orth)
        if t == "log_ball":
            return log_ball(float(d["a"]), n, orth)
        raise ProblemFileError(f"unknown domain type {t!r}", "$.domain.type")

    def to_spec(self) -> ProblemSpec:
        """The problem as relaxed: Lagrangian inequalities only."""
        _, lag = self.partition()
        return ProblemSpec(self.objective, [self.ineqs[i] for i in lag], list(self.eqs),
                           self.domain_set(), self.kind)

    def checked_spec(self) -> ProblemSpec:
        """Same problem carrying every inequality, for filtering candidates."""
        s = self.to_spec()
        return ProblemSpec(s.f, list(self.ineqs), s.phi, s.X, s.kind)

    def settings(self, **overrides) -> RecoverySettings:
        kw = {k: v for k, v in self.recovery.items() if k in RECOVERY_KEYS}
        kw.update({k: v for k, v in overrides.items() if v is not None})
        return RecoverySettings(**kw)

    # ------------------------------------------------------------ JSON
    def to_dict(self) -> dict:
        lv = self.level
        if lv.minimax_free:
            level = {"minimax_free": [lv.ell] if (lv.p == 0 and lv.q == 0) else [lv.p, lv.q]}
        else:
            level = [lv.p, lv.q, lv.ell]
        return {
            "kind": self.kind,
            "n": self.n,
            "objective": _terms_out(self.objective),
            "ineqs": [_terms_out(g) for g in self.ineqs],
            "eqs": [_terms_out(h) for h in self.eqs],
            "domain": _jsonable(self.domain),
            "level": level,
            "recovery": dict(self.recovery),
            "geometric": bool(self.geometric),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=False)

    def __eq__(self, other):
        if not isinstance(other, ProblemFile):
            return NotImplemented
        return self.to_dict() == other.to_dict()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return None if not np.isfinite(obj) else float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _num(v):
    v = float(v)
    return int(v) if v.is_integer() and abs(v) < 2 ** 53 else v


def _terms_out(f: Signomial) -> list:
    return [{"c": float(c), "a": [_num(t) for t in a]} for c, a in zip(f.c, f.alpha.tolist())]


# ------------------------------------------------------------- parsing

def loads(text: str | bytes) -> ProblemFile:
    """Parse and validate a problem file."""
    if isinstance(text, bytes):
        raw = text
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as e:
            raise ProblemFileError("file is not valid UTF-8", "$", e.start) from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        offset = len(text[:e.pos].encode("utf-8"))
        raise ProblemFileError(e.msg, f"line {e.lineno} column {e.colno}", offset) from None
    return from_dict(doc)


def load(path) -> ProblemFile:
    with open(path, "rb") as fh:
        return loads(fh.read())


def from_dict(doc) -> ProblemFile:
    if not isinstance(doc, dict):
        raise ProblemFileError("top level must be an object")
    for k in doc:
        if k not in TOP_KEYS:
            raise ProblemFileError(f"unknown key {k!r}", f"$.{k}")
    kind = doc.get("kind")
    if kind not in ("signomial", "polynomial"):
        raise ProblemFileError("must be 'signomial' or 'polynomial'", "$.kind")
    n = doc.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ProblemFileError("must be a positive integer", "$.n")
    cls = Polynomial if kind == "polynomial" else Signomial
    if "objective" not in doc:
        raise ProblemFileError("missing objective", "$")
    f = _terms_in(doc["objective"], n, cls, "$.objective")
    ineqs = [_terms_in(t, n, cls, f"$.ineqs[{i}]")
             for i, t in enumerate(_list(doc.get("ineqs", []), "$.ineqs"))]
    eqs = [_terms_in(t, n, cls, f"$.eqs[{i}]")
           for i, t in enumerate(_list(doc.get("eqs", []), "$.eqs"))]
    domain = _domain_in(doc.get("domain", {"type": "whole_space"}), kind, n, len(ineqs))
    level = _level_in(doc.get("level", [0, 1, 0]))
    recovery = doc.get("recovery", {})
    if not isinstance(recovery, dict):
        raise ProblemFileError("must be an object", "$.recovery")
    for k, v in recovery.items():
        if k not in RECOVERY_KEYS:
            raise ProblemFileError(f"unknown setting {k!r}", f"$.recovery.{k}")
        if k == "heuristic":
            if not isinstance(v, bool):
                raise ProblemFileError("must be a boolean", f"$.recovery.{k}")
        elif not _is_number(v) or v < 0:
            raise ProblemFileError("must be a nonnegative number", f"$.recovery.{k}")
    geometric = doc.get("geometric", False)
    if not isinstance(geometric, bool):
        raise ProblemFileError("must be a boolean", "$.geometric")
    pf = ProblemFile(kind, n, f, ineqs, eqs, domain, level, dict(recovery), geometric)
    try:
        pf.domain_set()
        if level.minimax_free and pf.partition()[1] + list(range(len(eqs))):
            raise ProblemFileError("minimax-free levels need every inequality folded "
                                   "into the domain and no equalities", "$.level")
    except ProblemFileError:
        raise
    except (ValueError, KeyError, TypeError) as e:
        raise ProblemFileError(str(e), "$.domain") from None
    return pf


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and np.isfinite(v)


def _list(v, where):
    if not isinstance(v, list):
        raise ProblemFileError("must be a list", where)
    return v


def _terms_in(terms, n, cls, where):
    terms = _list(terms, where)
    cs, rows = [], []
    for k, t in enumerate(terms):
        loc = f"{where}[{k}]"
        if not isinstance(t, dict) or set(t) != {"c", "a"}:
            raise ProblemFileError('each term must be {"c": real, "a": [exponents]}', loc)
        if not _is_number(t["c"]):
            raise ProblemFileError("coefficient must be a finite number", loc + ".c")
        a = t["a"]
        if not isinstance(a, list) or len(a) != n or not all(_is_number(x) for x in a):
            raise ProblemFileError(f"exponent row must list {n} numbers", loc + ".a")
        if cls is Polynomial and not all(float(x).is_integer() and x >= 0 for x in a):
            raise ProblemFileError("polynomial exponents must be nonnegative integers",
                                   loc + ".a")
        cs.append(float(t["c"]))
        rows.append(a)
    if not rows:
        dtype = int if cls is Polynomial else float
        return cls(np.zeros((0, n), dtype=dtype), [])
    return cls(np.array(rows, dtype=float), cs)


def _vector(v, n, where, allow_null=False):
    v = _list(v, where)
    if len(v) != n:
        raise ProblemFileError(f"must have {n} entries", where)
    for k, x in enumerate(v):
        if x is None and allow_null:
            continue
        if not _is_number(x):
            raise ProblemFileError("must be a number" + (" or null" if allow_null else ""),
                                   f"{where}[{k}]")
    return list(v)


def _domain_in(d, kind, n, m):
    if not isinstance(d, dict):
        raise ProblemFileError("must be an object", "$.domain")
    t = d.get("type", "whole_space")
    allowed = SIG_DOMAINS if kind == "signomial" else POLY_DOMAINS
    if t not in allowed:
        raise ProblemFileError(f"type must be one of {', '.join(allowed)}", "$.domain.type")
    keys = {"type", "partition"}
    out = {"type": t}
    if t == "box":
        keys |= {"lower", "upper"}
        out["lower"] = _vector(d.get("lower"), n, "$.domain.lower", allow_null=True)
        out["upper"] = _vector(d.get("upper"), n, "$.domain.upper", allow_null=True)
    elif t in ("log_box", "log_ball"):
        keys |= {"a", "orthant"}
        a = d.get("a")
        if isinstance(a, list):
            a = _vector(a, n, "$.domain.a")
        elif not _is_number(a):
            raise ProblemFileError("must be a number or a list", "$.domain.a")
        if t == "log_ball" and isinstance(a, list):
            raise ProblemFileError("ball radius must be a number", "$.domain.a")
        out["a"] = a
    elif t == "log_annulus":
        keys |= {"lower", "upper", "orthant"}
        out["lower"] = _vector(d.get("lower"), n, "$.domain.lower")
        out["upper"] = _vector(d.get("upper"), n, "$.domain.upper")
    if "orthant" in d:
        if not isinstance(d["orthant"], bool):
            raise ProblemFileError("must be a boolean", "$.domain.orthant")
        out["orthant"] = d["orthant"]
    for k in d:
        if k not in keys:
            raise ProblemFileError(f"unknown key {k!r}", f"$.domain.{k}")
    if "partition" in d:
        p = d["partition"]
        if not isinstance(p, dict) or not set(p) <= {"domain", "lagrangian"}:
            raise ProblemFileError('must be {"domain": [...], "lagrangian": [...]}',
                                   "$.domain.partition")
        part = {}
        for k in ("domain", "lagrangian"):
            if k in p:
                idx = _list(p[k], f"$.domain.partition.{k}")
                for j, i in enumerate(idx):
                    if not isinstance(i, int) or isinstance(i, bool) or not 0 <= i < m:
                        raise ProblemFileError(f"must index one of the {m} inequalities",
                                               f"$.domain.partition.{k}[{j}]")
                part[k] = list(idx)
        out["partition"] = part
    return out


def _level_in(v):
    where = "$.level"
    try:
        if isinstance(v, dict):
            if set(v) != {"minimax_free"}:
                raise ProblemFileError('must be [p, q, ell] or {"minimax_free": [...]}', where)
            lv = _list(v["minimax_free"], where + ".minimax_free")
            if len(lv) not in (1, 2) or not all(isinstance(x, int) for x in lv):
                raise ProblemFileError("must be [p, q] or [ell]", where + ".minimax_free")
            return HierarchyLevel.parse(lv, minimax_free=True)
        lv = _list(v, where)
        if len(lv) != 3 or not all(isinstance(x, int) and not isinstance(x, bool) for x in lv):
            raise ProblemFileError("must be three integers [p, q, ell]", where)
        return HierarchyLevel(*lv)
    except ProblemFileError:
        raise
    except ValueError as e:
        raise ProblemFileError(str(e), where) from None
