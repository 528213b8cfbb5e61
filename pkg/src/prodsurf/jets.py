"""Truncated bivariate Taylor arithmetic of fixed maximum order 4.

A :class:`Jet2` carries the value of a smooth quantity at a chart point
together with all of its partial derivatives up to ``order``, stored as
Taylor coefficients ``c[i,j]`` of ``u^i v^j`` (the (i,j) partial derivative
is ``i! j! c[i,j]``).  Arithmetic and elementary functions compose jets so
that derivatives of arbitrary composite expressions are exact to roundoff;
all curvature formulas downstream rely on this.

Order 4 is a hard cap: the deepest consumer needs a Laplacian of a quantity
built from second derivatives of the immersion, which uses exactly four
derivative levels.  Coefficients are stored densely in degree-major order,
so truncation to order m just zeroes the tail of the coefficient vector.
"""

from __future__ import annotations

import math

import numpy as np

MAX_ORDER = 4

# Monomials (i, j) in degree-major order; truncating to total degree m keeps
# exactly the first _NCOEF[m] entries.
MONOMIALS: list[tuple[int, int]] = [
    (i, d - i) for d in range(MAX_ORDER + 1) for i in range(d, -1, -1)
]
_IDX = {m: k for k, m in enumerate(MONOMIALS)}
_NCOEF = [sum(d + 1 for d in range(m + 1)) for m in range(MAX_ORDER + 1)]
NCOEF = _NCOEF[MAX_ORDER]

# Sparse multiplication tables per result order: product coefficient IOUT
# accumulates IA * IB, keeping only total degree <= m (the truncation order),
# so low-order products touch far fewer triples.
def _mul_table(m: int):
    ia, ib, iout = [], [], []
    for ka, (i1, j1) in enumerate(MONOMIALS):
        for kb, (i2, j2) in enumerate(MONOMIALS):
            if i1 + i2 + j1 + j2 <= m:
                ia.append(ka)
                ib.append(kb)
                iout.append(_IDX[(i1 + i2, j1 + j2)])
    return (np.asarray(ia, dtype=np.intp), np.asarray(ib, dtype=np.intp),
            np.asarray(iout, dtype=np.intp))


_MUL_TABLES = [_mul_table(m) for m in range(MAX_ORDER + 1)]

# d/du and d/dv as (out_index, src_index, factor) scatter tables.
_DU_OUT = np.asarray([_IDX[(i - 1, j)] for (i, j) in MONOMIALS if i >= 1], dtype=np.intp)
_DU_SRC = np.asarray([_IDX[(i, j)] for (i, j) in MONOMIALS if i >= 1], dtype=np.intp)
_DU_FACT = np.asarray([float(i) for (i, j) in MONOMIALS if i >= 1])
_DV_OUT = np.asarray([_IDX[(i, j - 1)] for (i, j) in MONOMIALS if j >= 1], dtype=np.intp)
_DV_SRC = np.asarray([_IDX[(i, j)] for (i, j) in MONOMIALS if j >= 1], dtype=np.intp)
_DV_FACT = np.asarray([float(j) for (i, j) in MONOMIALS if j >= 1])

DOMAIN_TOL = 1e-12


class JetDomainError(ArithmeticError):
    """Elementary function or division applied at/over a domain boundary."""


def _check_order(order: int) -> None:
    if not 0 <= order <= MAX_ORDER:
        raise ValueError(f"jet order must be in 0..{MAX_ORDER}, got {order}")


class Jet2:
    """Bivariate truncated Taylor polynomial at a point, order <= 4."""

    __slots__ = ("c", "order")

    def __init__(self, c: np.ndarray, order: int):
        self.c = c
        self.order = order

    # -- constructors -------------------------------------------------------

    @staticmethod
    def constant(x: float, order: int = MAX_ORDER) -> "Jet2":
        _check_order(order)
        c = np.zeros(NCOEF)
        c[0] = x
        return Jet2(c, order)

    @staticmethod
    def variable(which: str, value: float, order: int = MAX_ORDER) -> "Jet2":
        """Jet of the coordinate function u or v at the point."""
        _check_order(order)
        if which not in ("u", "v"):
            raise ValueError(f"variable must be 'u' or 'v', got {which!r}")
        c = np.zeros(NCOEF)
        c[0] = value
        if order >= 1:
            c[_IDX[(1, 0)] if which == "u" else _IDX[(0, 1)]] = 1.0
        return Jet2(c, order)

    # -- accessors ----------------------------------------------------------

    @property
    def value(self) -> float:
        return self.c[0]

    @property
    def du(self) -> float:
        return self.c[1]

    @property
    def dv(self) -> float:
        return self.c[2]

    @property
    def duu(self) -> float:
        return 2.0 * self.c[3]

    @property
    def duv(self) -> float:
        return self.c[4]

    @property
    def dvv(self) -> float:
        return 2.0 * self.c[5]

    def deriv(self, i: int, j: int) -> float:
        """Partial derivative d^{i+j} / du^i dv^j at the point."""
        if i + j > self.order:
            raise ValueError(f"derivative ({i},{j}) exceeds jet order {self.order}")
        return self.c[_IDX[(i, j)]] * math.factorial(i) * math.factorial(j)

    def coeff(self, i: int, j: int) -> float:
        return self.c[_IDX[(i, j)]]

    def coeffs(self) -> dict[tuple[int, int], float]:
        """Triangular coefficient map, (order+1)(order+2)/2 entries."""
        return {m: self.c[k] for k, m in enumerate(MONOMIALS) if k < _NCOEF[self.order]}

    def truncate(self, order: int) -> "Jet2":
        _check_order(order)
        if order >= self.order:
            return Jet2(self.c.copy(), order if order <= self.order else self.order)
        c = self.c.copy()
        c[_NCOEF[order]:] = 0.0
        return Jet2(c, order)

    def __repr__(self) -> str:
        return f"Jet2(order={self.order}, value={self.c[0]!r})"

    # -- derivative jets ----------------------------------------------------

    def d_u(self) -> "Jet2":
        """Jet of the u-partial, one order lower."""
        c = np.zeros(NCOEF)
        c[_DU_OUT] = self.c[_DU_SRC] * _DU_FACT
        m = max(self.order - 1, 0)
        c[_NCOEF[m]:] = 0.0
        return Jet2(c, m)

    def d_v(self) -> "Jet2":
        c = np.zeros(NCOEF)
        c[_DV_OUT] = self.c[_DV_SRC] * _DV_FACT
        m = max(self.order - 1, 0)
        c[_NCOEF[m]:] = 0.0
        return Jet2(c, m)

    def d(self, direction: int) -> "Jet2":
        return self.d_u() if direction == 0 else self.d_v()

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Jet2):
            m = min(self.order, other.order)
            c = self.c + other.c
            if m < MAX_ORDER:
                c[_NCOEF[m]:] = 0.0
            return Jet2(c, m)
        c = self.c.copy()
        c[0] += other
        return Jet2(c, self.order)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Jet2):
            m = min(self.order, other.order)
            c = self.c - other.c
            if m < MAX_ORDER:
                c[_NCOEF[m]:] = 0.0
            return Jet2(c, m)
        c = self.c.copy()
        c[0] -= other
        return Jet2(c, self.order)

    def __rsub__(self, other):
        c = -self.c
        c[0] += other
        return Jet2(c, self.order)

    def __neg__(self):
        return Jet2(-self.c, self.order)

    def __mul__(self, other):
        if isinstance(other, Jet2):
            m = min(self.order, other.order)
            ia, ib, iout = _MUL_TABLES[m]
            c = np.bincount(iout, self.c[ia] * other.c[ib], minlength=NCOEF)
            return Jet2(c, m)
        return Jet2(self.c * other, self.order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet2):
            return self * _reciprocal(other)
        return Jet2(self.c / other, self.order)

    def __rtruediv__(self, other):
        return _reciprocal(self) * other

    def __pow__(self, n):
        if not isinstance(n, int):
            return powf(self, float(n))
        if n < 0:
            return _reciprocal(self ** (-n))
        out = Jet2.constant(1.0, self.order)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out


def _reciprocal(b: Jet2) -> Jet2:
    b0 = b.c[0]
    if abs(b0) <= DOMAIN_TOL:
        raise JetDomainError(f"division by jet with constant term {b0!r}")
    coeffs = [(-1.0) ** k / b0 ** (k + 1) for k in range(b.order + 1)]
    return _compose(b, coeffs)


def _compose(a: Jet2, coeffs: list[float]) -> Jet2:
    """Horner evaluation of sum_k coeffs[k] * (a - a0)^k."""
    w = Jet2(a.c.copy(), a.order)
    w.c[0] = 0.0
    out = Jet2.constant(coeffs[-1], a.order)
    for k in range(len(coeffs) - 2, -1, -1):
        out = out * w + coeffs[k]
    return out


# -- elementary functions ----------------------------------------------------

def sin(a: Jet2) -> Jet2:
    a0 = a.c[0]
    table = (math.sin(a0), math.cos(a0), -math.sin(a0), -math.cos(a0))
    return _compose(a, [table[k % 4] / math.factorial(k) for k in range(a.order + 1)])


def cos(a: Jet2) -> Jet2:
    a0 = a.c[0]
    table = (math.cos(a0), -math.sin(a0), -math.cos(a0), math.sin(a0))
    return _compose(a, [table[k % 4] / math.factorial(k) for k in range(a.order + 1)])


def exp(a: Jet2) -> Jet2:
    e0 = math.exp(a.c[0])
    return _compose(a, [e0 / math.factorial(k) for k in range(a.order + 1)])


def log(a: Jet2) -> Jet2:
    a0 = a.c[0]
    if a0 <= DOMAIN_TOL:
        raise JetDomainError(f"log of jet with constant term {a0!r}")
    coeffs = [math.log(a0)]
    coeffs += [(-1.0) ** (k - 1) / (k * a0 ** k) for k in range(1, a.order + 1)]
    return _compose(a, coeffs)


def sqrt(a: Jet2) -> Jet2:
    a0 = a.c[0]
    if a0 <= DOMAIN_TOL:
        raise JetDomainError(f"sqrt of jet with constant term {a0!r}")
    return powf(a, 0.5)


def powf(a: Jet2, p: float) -> Jet2:
    a0 = a.c[0]
    if a0 <= DOMAIN_TOL:
        raise JetDomainError(f"pow of jet with constant term {a0!r}")
    coeffs, binom = [], 1.0
    for k in range(a.order + 1):
        coeffs.append(binom * a0 ** (p - k))
        binom *= (p - k) / (k + 1)
    return _compose(a, coeffs)


_ELEMENTARY = {"sin": sin, "cos": cos, "exp": exp, "ln": log, "sqrt": sqrt}


# -- spec-shaped entry points -------------------------------------------------

def jet_variable(which: str, value: float, order: int) -> Jet2:
    return Jet2.variable(which, value, order)


def jet_arith(a: Jet2, b: Jet2, op: str) -> Jet2:
    ops = {"add": a.__add__, "sub": a.__sub__, "mul": a.__mul__, "div": a.__truediv__}
    if op not in ops:
        raise ValueError(f"unknown op {op!r}")
    return ops[op](b)


def jet_elementary(fn: str, a: Jet2, exponent: float | None = None) -> Jet2:
    if fn == "pow":
        if exponent is None:
            raise ValueError("pow requires an exponent")
        return powf(a, exponent)
    if fn not in _ELEMENTARY:
        raise ValueError(f"unknown elementary function {fn!r}")
    return _ELEMENTARY[fn](a)
