"""Signomials and polynomials over explicit exponent matrices.

A signomial ``Sig(alpha, c)`` takes values ``sum_i c_i exp(alpha_i . x)``; a
polynomial ``Poly(alpha, c)`` takes values ``sum_i c_i prod_j x_j**alpha_ij``.
Both store a dense ``(m, n)`` exponent matrix and a length-``m`` coefficient
vector.  Rows are kept unique and lexicographically sorted.
"""

from __future__ import annotations

import numbers
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

# real exponents closer than this are treated as the same row
EXPONENT_DECIMALS = 12


def _as_alpha(alpha, integer: bool = False) -> np.ndarray:
    a = np.asarray(alpha, dtype=float)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2:
        raise ValueError("exponent matrix must be two-dimensional")
    if integer:
        if not np.all(np.isfinite(a)) or np.any(a != np.round(a)):
            raise ValueError("polynomial exponents must be integers")
        if np.any(a < 0):
            raise ValueError("polynomial exponents must be nonnegative")
        return a.astype(np.int64)
    return np.round(a, EXPONENT_DECIMALS) + 0.0


def canonicalize(alpha, c, keep_zeros: bool = False, integer: bool | None = None):
    """Merge duplicate exponent rows and sort them lexicographically.

    Coefficients of merged rows are summed.  Rows whose merged coefficient is
    exactly zero are dropped unless ``keep_zeros`` is set (basis-union mode).
    """
    if integer is None:
        integer = np.issubdtype(np.asarray(alpha).dtype, np.integer)
    a = _as_alpha(alpha, integer=integer)
    c = np.asarray(c, dtype=float).ravel()
    if c.size != a.shape[0]:
        raise ValueError(
            f"coefficient vector has length {c.size}, exponent matrix has {a.shape[0]} rows")
    if a.shape[0] == 0:
        return a, c
    rows, inv = np.unique(a, axis=0, return_inverse=True)
    coeffs = np.bincount(inv.ravel(), weights=c, minlength=rows.shape[0])
    if not keep_zeros:
        nz = coeffs != 0
        rows, coeffs = rows[nz], coeffs[nz]
    return rows, coeffs


def union_basis(*alphas, n: int | None = None) -> np.ndarray:
    """Sorted union of the rows of several exponent matrices."""
    mats = [np.asarray(a) for a in alphas if np.asarray(a).size > 0 or np.asarray(a).ndim == 2]
    mats = [m.reshape(-1, m.shape[-1]) if m.ndim == 2 else m.reshape(-1, 1) for m in mats]
    mats = [m for m in mats if m.shape[0] > 0]
    if not mats:
        if n is None:
            raise ValueError("cannot infer dimension of an empty basis")
        return np.zeros((0, n))
    integer = all(np.issubdtype(m.dtype, np.integer) for m in mats)
    stacked = np.vstack(mats)
    a, _ = canonicalize(stacked, np.ones(stacked.shape[0]), integer=integer)
    return a


def sumset(alpha1, alpha2) -> np.ndarray:
    """All pairwise row sums, deduplicated."""
    a1, a2 = np.asarray(alpha1), np.asarray(alpha2)
    s = (a1[:, None, :] + a2[None, :, :]).reshape(-1, a1.shape[1])
    return union_basis(s)


def basis_power(alpha, p: int) -> np.ndarray:
    """Exponents of ``Sig(alpha, 1)**p``; ``p = 0`` gives the zero row."""
    alpha = np.asarray(alpha)
    out = np.zeros((1, alpha.shape[1]), dtype=alpha.dtype)
    for _ in range(p):
        out = sumset(out, alpha)
    return out


def row_lookup(alpha) -> dict:
    return {tuple(r): i for i, r in enumerate(np.asarray(alpha).tolist())}


def locate_rows(rows, basis) -> np.ndarray:
    """Index of each row of ``rows`` inside ``basis`` (KeyError if absent)."""
    table = row_lookup(basis)
    return np.array([table[tuple(r)] for r in np.asarray(rows).tolist()], dtype=int)


def even_lattice_mask(alpha) -> np.ndarray:
    """True for rows whose entries are all even integers."""
    a = np.asarray(alpha)
    if not np.issubdtype(a.dtype, np.integer):
        if np.any(a != np.round(a)):
            raise ValueError("even_lattice_mask requires integer exponents")
        a = a.astype(np.int64)
    return np.all(a % 2 == 0, axis=1)


class Signomial:
    """Immutable ``Sig(alpha, c)``."""

    _integer = False

    def __init__(self, alpha, c, keep_zeros: bool = False):
        a, cc = canonicalize(alpha, c, keep_zeros=keep_zeros, integer=self._integer)
        a.setflags(write=False)
        cc.setflags(write=False)
        self._alpha = a
        self._c = cc

    # construction helpers
    @classmethod
    def from_terms(cls, terms: Iterable, n: int | None = None):
        """Build from ``(coefficient, exponent_row)`` pairs."""
        terms = list(terms)
        if n is None:
            if not terms:
                raise ValueError("n is required for an empty term list")
            n = len(terms[0][1])
        if not terms:
            return cls(np.zeros((0, n), dtype=int if cls._integer else float), [])
        c = [float(t[0]) for t in terms]
        a = np.array([list(t[1]) for t in terms], dtype=float).reshape(len(terms), n)
        return cls(a, c)

    @classmethod
    def constant(cls, value: float, n: int):
        return cls(np.zeros((1, n), dtype=int), [value])

    @property
    def alpha(self) -> np.ndarray:
        return self._alpha

    @property
    def c(self) -> np.ndarray:
        return self._c

    @property
    def m(self) -> int:
        return self._alpha.shape[0]

    @property
    def n(self) -> int:
        return self._alpha.shape[1]

    def terms(self):
        return [(float(ci), tuple(ai)) for ci, ai in zip(self._c, self._alpha.tolist())]

    def constant_term(self) -> float:
        zero = np.all(self._alpha == 0, axis=1)
        return float(self._c[zero].sum())

    def coefficients_on(self, basis) -> np.ndarray:
        """Coefficient vector of this function relative to a larger basis."""
        out = np.zeros(np.asarray(basis).shape[0])
        if self.m:
            out[locate_rows(self._alpha, basis)] = self._c
        return out

    def prune(self, eps: float):
        keep = np.abs(self._c) > eps
        return type(self)(self._alpha[keep], self._c[keep])

    def translate(self, d):
        """``x -> f(x + d)`` for signomials, ``x -> f(exp(d) * x)`` for polynomials.

        Both are the same coefficient map ``c -> c * exp(alpha d)``.
        """
        d = np.asarray(d, dtype=float)
        return type(self)(self._alpha, self._c * np.exp(self._alpha @ d))

    # evaluation
    def _monomials(self, x: np.ndarray) -> np.ndarray:
        return np.exp(x @ self._alpha.T)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.n:
            raise ValueError(f"point has dimension {x.shape[-1]}, expected {self.n}")
        with np.errstate(over="ignore"):
            return self._monomials(x) @ self._c

    # arithmetic
    def _coerce(self, other):
        if isinstance(other, numbers.Real):
            return type(self).constant(float(other), self.n)
        if isinstance(other, Signomial):
            if other.n != self.n:
                raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")
            return other
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        kind = type(self) if type(self) is type(other) else Signomial
        return kind(np.vstack([self._alpha, other._alpha]), np.concatenate([self._c, other._c]))

    __radd__ = __add__

    def __neg__(self):
        return type(self)(self._alpha, -self._c)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        kind = type(self) if type(self) is type(other) else Signomial
        if self.m == 0 or other.m == 0:
            return kind(np.zeros((0, self.n), dtype=self._alpha.dtype), [])
        a = (self._alpha[:, None, :] + other._alpha[None, :, :]).reshape(-1, self.n)
        c = np.outer(self._c, other._c).ravel()
        return kind(a, c)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, numbers.Integral) or k < 0:
            raise ValueError("only nonnegative integer powers are supported")
        out = type(self).constant(1.0, self.n)
        for _ in range(int(k)):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, Signomial):
            return NotImplemented
        return (type(self) is type(other) and self._alpha.shape == other._alpha.shape
                and np.array_equal(self._alpha, other._alpha) and np.array_equal(self._c, other._c))

    def __hash__(self):
        return hash((type(self).__name__, self._alpha.tobytes(), self._c.tobytes()))

    def __repr__(self):
        return f"{type(self).__name__}(m={self.m}, n={self.n})"

    def to_json(self) -> list:
        return [{"c": float(ci), "a": list(ai)} for ci, ai in zip(self._c, self._alpha.tolist())]


class Polynomial(Signomial):
    """Immutable ``Poly(alpha, c)`` with nonnegative integer exponents."""

    _integer = True

    def _monomials(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.prod(x[..., None, :] ** self._alpha, axis=-1)

    def as_signomial(self) -> Signomial:
        return Signomial(self._alpha.astype(float), self._c)

    def even_mask(self) -> np.ndarray:
        return even_lattice_mask(self._alpha)


def sig_eval(f: Signomial, x) -> float:
    return Signomial.__call__(f, x) if not isinstance(f, Polynomial) else f.as_signomial()(x)


def poly_eval(f: Polynomial, x) -> float:
    return f(x)


def multiplication_matrix(g: Signomial, src, dst=None):
    """Matrix of ``coef(h) -> coef(g * h)`` for ``h`` supported on ``src``.

    Returns ``(dst, M)`` with ``M`` sparse of shape ``(len(dst), len(src))``.
    When ``dst`` is omitted it is the exact support ``src + supp(g)``.
    """
    src = np.asarray(src)
    sums = (src[:, None, :] + g.alpha[None, :, :]).reshape(-1, src.shape[1])
    if dst is None:
        dst = union_basis(sums)
    rows = locate_rows(sums, dst)
    cols = np.repeat(np.arange(src.shape[0]), g.m)
    vals = np.tile(g.c, src.shape[0])
    M = sp.csr_matrix((vals, (rows, cols)), shape=(np.asarray(dst).shape[0], src.shape[0]))
    return dst, M


def embedding_matrix(src, dst) -> sp.csr_matrix:
    """0/1 matrix placing coefficients over ``src`` into the basis ``dst``."""
    rows = locate_rows(src, dst)
    k = rows.size
    return sp.csr_matrix((np.ones(k), (rows, np.arange(k))), shape=(np.asarray(dst).shape[0], k))


def products_up_to(funcs: Sequence[Signomial], q: int) -> list:
    """All products of between 1 and ``q`` elements (with repetition)."""
    from itertools import combinations_with_replacement

    out = []
    for d in range(1, q + 1):
        for combo in combinations_with_replacement(range(len(funcs)), d):
            h = funcs[combo[0]]
            for j in combo[1:]:
                h = h * funcs[j]
            out.append(h)
    return out


def sigrep_block(model, alpha, c):
    """Signomial-representative coefficients ``c_hat`` for ``Poly(alpha, c)``.

    ``c`` may be a numeric vector or an affine expression of ``model``.  Even
    rows are tied to ``c``; the remaining rows satisfy ``c_hat_i <= -|c_i|``
    through two affine inequalities.  Rows where ``c`` is a known constant are
    fixed at ``-|c_i|``, the least restrictive admissible value.
    """
    from .conic.model import Expr, lin

    even = even_lattice_mask(alpha)
    if not isinstance(c, Expr):
        c = Expr.constant(np.asarray(c, dtype=float))
    const = c.constant_rows()
    free_odd = np.flatnonzero(~even & ~const)
    chat = c * np.where(even, 1.0, 0.0) + np.where(~even & const, -np.abs(c.b), 0.0)
    if free_odd.size:
        w = model.variable("chat", free_odd.size)
        cf = c[free_odd]
        model.add_nonneg(-cf - w)
        model.add_nonneg(cf - w)
        E = sp.csr_matrix((np.ones(free_odd.size), (free_odd, np.arange(free_odd.size))),
                          shape=(even.size, free_odd.size))
        chat = chat + lin(E, w)
    return SigRepBlock(chat, np.flatnonzero(even), np.flatnonzero(~even))


class SigRepBlock:
    """Representative coefficients plus the row partition used to build them."""

    def __init__(self, hatc, equalities, dominations):
        self.hatc = hatc
        self.equalities = np.asarray(equalities, dtype=int)
        self.dominations = np.asarray(dominations, dtype=int)

    def __repr__(self):
        return f"SigRepBlock(even={self.equalities.size}, odd={self.dominations.size})"
