"""Small affine modeling layer that compiles to standard conic form.

Expressions are affine maps ``x -> A x + b`` of a model's variable vector.
The variable vector grows as variables are created, so stored matrices may
have fewer columns than the final model; they are padded on use.
"""

from __future__ import annotations

import numbers

import numpy as np
import scipy.sparse as sp


def _csr(M, ncols=None) -> sp.csr_matrix:
    M = sp.csr_matrix(M)
    if ncols is not None and M.shape[1] < ncols:
        M = sp.csr_matrix((M.data, M.indices, M.indptr), shape=(M.shape[0], ncols))
    return M


class Expr:
    """Vector-valued affine expression ``A x + b``."""

    __array_priority__ = 100
    __array_ufunc__ = None

    def __init__(self, A, b):
        self.A = _csr(A)
        self.b = np.asarray(b, dtype=float).ravel()
        if self.A.shape[0] != self.b.size:
            raise ValueError("row mismatch in affine expression")

    @classmethod
    def constant(cls, b, ncols: int = 0):
        b = np.atleast_1d(np.asarray(b, dtype=float)).ravel()
        return cls(sp.csr_matrix((b.size, ncols)), b)

    @classmethod
    def vstack(cls, exprs):
        exprs = [e if isinstance(e, Expr) else Expr.constant(e) for e in exprs]
        ncols = max((e.A.shape[1] for e in exprs), default=0)
        A = sp.vstack([_csr(e.A, ncols) for e in exprs], format="csr")
        return cls(A, np.concatenate([e.b for e in exprs]))

    @property
    def size(self) -> int:
        return self.b.size

    def __len__(self):
        return self.b.size

    @property
    def ncols(self) -> int:
        return self.A.shape[1]

    def padded(self, ncols: int) -> sp.csr_matrix:
        return _csr(self.A, ncols)

    def constant_rows(self) -> np.ndarray:
        """Rows that do not depend on any variable."""
        A = self.A.copy()
        A.eliminate_zeros()
        return np.diff(A.indptr) == 0

    def value(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.A @ x[: self.ncols] + self.b

    def _align(self, other):
        if isinstance(other, Expr):
            return other
        if isinstance(other, numbers.Real):
            return Expr.constant(np.full(self.size, float(other)))
        other = np.asarray(other, dtype=float).ravel()
        if other.size == 1 and self.size != 1:
            other = np.full(self.size, other[0])
        return Expr.constant(other)

    def __add__(self, other):
        other = self._align(other)
        if other.size != self.size:
            if other.size == 1:
                other = other.broadcast(self.size)
            elif self.size == 1:
                return self.broadcast(other.size) + other
            else:
                raise ValueError(f"size mismatch {self.size} vs {other.size}")
        n = max(self.ncols, other.ncols)
        return Expr(self.padded(n) + other.padded(n), self.b + other.b)

    __radd__ = __add__

    def __neg__(self):
        return Expr(-self.A, -self.b)

    def __sub__(self, other):
        return self + (-self._align(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, k):
        if isinstance(k, numbers.Real):
            return Expr(self.A * float(k), self.b * float(k))
        k = np.asarray(k, dtype=float).ravel()
        if k.size not in (1, self.size):
            raise ValueError("elementwise scale has wrong length")
        D = sp.diags(np.broadcast_to(k, (self.size,)))
        return Expr(D @ self.A, k * self.b)

    __rmul__ = __mul__

    def __rmatmul__(self, M):
        if sp.issparse(M):
            M = sp.csr_matrix(M)
            return Expr(M @ self.A, M @ self.b)
        M = np.atleast_2d(np.asarray(M, dtype=float))
        return Expr(sp.csr_matrix(M) @ self.A, M @ self.b)

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            idx = np.arange(self.size)[idx]
        idx = np.atleast_1d(np.asarray(idx))
        if idx.dtype == bool:
            idx = np.flatnonzero(idx)
        return Expr(self.A[idx], self.b[idx])

    def broadcast(self, k: int):
        if self.size != 1:
            raise ValueError("only scalar expressions broadcast")
        return self[np.zeros(k, dtype=int)]

    def sum(self):
        return Expr(sp.csr_matrix(self.A.sum(axis=0)), [self.b.sum()])

    def dot(self, w):
        w = np.asarray(w, dtype=float).ravel()
        return Expr(sp.csr_matrix(w @ self.A), [w @ self.b])

    def __repr__(self):
        return f"Expr(size={self.size}, ncols={self.ncols})"


def lin(M, e: "Expr") -> "Expr":
    """``M e`` for a sparse or dense matrix ``M`` and an expression ``e``."""
    M = sp.csr_matrix(M)
    return Expr(M @ e.A, M @ e.b)


class Model:
    """Collects variables and cone constraints.

    Constraint kinds are ``zero`` (expr = 0), ``nonneg`` (expr >= 0),
    ``soc`` (expr[0] >= ||expr[1:]||) and ``exp`` (triples ``(x, y, z)`` with
    ``y exp(x / y) <= z``).
    """

    def __init__(self):
        self.nvars = 0
        self.var_names: dict[str, tuple[int, int]] = {}
        self._zero: list[Expr] = []
        self._nonneg: list[Expr] = []
        self._soc: list[Expr] = []
        self._exp: list[tuple[Expr, Expr, Expr]] = []
        self._objective: Expr | None = None
        self._sense = 1.0

    def variable(self, name: str, size: int = 1) -> Expr:
        size = int(size)
        key, i = name, 1
        while key in self.var_names:
            i += 1
            key = f"{name}#{i}"
        start = self.nvars
        self.var_names[key] = (start, size)
        self.nvars += size
        A = sp.csr_matrix((np.ones(size), (np.arange(size), start + np.arange(size))),
                          shape=(size, self.nvars))
        return Expr(A, np.zeros(size))

    def add_zero(self, e: Expr):
        if e.size:
            self._zero.append(e)

    def add_nonneg(self, e: Expr):
        if e.size:
            self._nonneg.append(e)

    def add_soc(self, e: Expr):
        if e.size < 1:
            raise ValueError("second-order cone needs at least one row")
        self._soc.append(e)

    def add_exp(self, x, y, z):
        """Add triples ``(x_i, y_i, z_i)`` to the exponential cone."""
        x, y, z = (e if isinstance(e, Expr) else Expr.constant(e) for e in (x, y, z))
        k = max(x.size, y.size, z.size)
        x, y, z = (e.broadcast(k) if e.size == 1 and k > 1 else e for e in (x, y, z))
        if not (x.size == y.size == z.size):
            raise ValueError("exponential-cone components differ in length")
        if k:
            self._exp.append((x, y, z))

    def add_cones(self, e: Expr, cones, dual: bool = False):
        """Constrain consecutive row blocks of ``e`` to a list of cone factors.

        With ``dual`` set, each block is constrained to the dual factor.
        """
        pos = 0
        exp_rows = []
        for kind, dim in cones:
            idx = np.arange(pos, pos + dim)
            if kind == "zero":
                if not dual:
                    self.add_zero(e[idx])
            elif kind == "nonneg":
                self.add_nonneg(e[idx])
            elif kind == "soc":
                self.add_soc(e[idx])
            elif kind == "exp":
                exp_rows.append(idx)
            else:
                raise ValueError(f"unknown cone kind {kind!r}")
            pos += dim
        if pos != e.size:
            raise ValueError("cone dimensions do not cover the expression")
        if exp_rows:
            r = np.array(exp_rows)
            if dual:
                # (u, v, w) in the dual cone iff (-v, -u, e*w) in the cone
                self.add_exp(-e[r[:, 1]], -e[r[:, 0]], e[r[:, 2]] * np.e)
            else:
                self.add_exp(e[r[:, 0]], e[r[:, 1]], e[r[:, 2]])

    def add_dual_cones(self, e: Expr, cones):
        self.add_cones(e, cones, dual=True)

    def minimize(self, e: Expr):
        self._objective, self._sense = e, 1.0

    def maximize(self, e: Expr):
        self._objective, self._sense = e, -1.0

    @property
    def n_exp(self) -> int:
        return sum(t[0].size for t in self._exp)

    def compile(self):
        from .program import ConicProgram

        n = self.nvars
        blocks, b = [], []

        def push(e):
            blocks.append(-e.padded(n))
            b.append(e.b)

        for e in self._zero:
            push(e)
        n_zero = sum(e.size for e in self._zero)
        for e in self._nonneg:
            push(e)
        n_nonneg = sum(e.size for e in self._nonneg)
        for e in self._soc:
            push(e)
        soc_dims = [e.size for e in self._soc]
        n_exp = 0
        if self._exp:
            X = Expr.vstack([t[0] for t in self._exp])
            Y = Expr.vstack([t[1] for t in self._exp])
            Z = Expr.vstack([t[2] for t in self._exp])
            n_exp = X.size
            E = Expr.vstack([X, Y, Z])
            perm = np.arange(3 * n_exp).reshape(3, n_exp).T.ravel()
            push(E[perm])
        A = sp.vstack(blocks, format="csc") if blocks else sp.csc_matrix((0, n))
        bvec = np.concatenate(b) if b else np.zeros(0)
        c = np.zeros(n)
        offset = 0.0
        if self._objective is not None:
            obj = self._objective
            if obj.size != 1:
                raise ValueError("objective must be scalar")
            c = self._sense * obj.padded(n).toarray().ravel()
            offset = self._sense * float(obj.b[0])
        cones = {"z": n_zero, "l": n_nonneg, "q": soc_dims, "ep": n_exp}
        return ConicProgram(c, A, bvec, cones, dict(self.var_names),
                            offset=offset, sense=self._sense)
