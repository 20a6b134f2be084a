"""Truncated multivariate Taylor arithmetic of fixed order three.

A jet in ``n`` variables stores the normalized Taylor coefficients
``coeffs[k] = d^alpha f / alpha!`` for every multi-index ``alpha`` with
``|alpha| <= 3``.  Multi-indices are laid out in graded-lex order: first the
constant term, then the ``n`` linear terms ``x0, x1, ...``, then the
quadratic terms ``x0^2, x0 x1, ...`` and finally the cubic ones.

Two containers share the same coefficient layout:

``Jet``
    a scalar jet with operator overloading, used by the expression compiler.
``Field``
    a tensor of jets (``numpy`` array whose last axis is the coefficient
    axis).  Tensor algebra on fields goes through :func:`fmul`, which is an
    ``einsum`` over tensor axes combined with the truncated Cauchy product on
    the coefficient axis.  A field also remembers up to which degree its
    coefficients are trustworthy; every partial derivative lowers that degree
    by one, and asking for more derivatives than are available raises.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement

import numpy as np

from .errors import DivisionByZeroConstantTerm, DomainError, JetOrderExhausted

ORDER = 3
_LETTERS = "abcdefghijklmnopqrstuvwxy"


def multi_indices(n: int, order: int = ORDER) -> list[tuple[int, ...]]:
    """All exponent tuples of total degree ``<= order`` in graded-lex order."""
    out = []
    for d in range(order + 1):
        block = []
        for combo in combinations_with_replacement(range(n), d):
            alpha = [0] * n
            for v in combo:
                alpha[v] += 1
            block.append(tuple(alpha))
        out.extend(sorted(block, reverse=True))
    return out


class JetSpace:
    """Index bookkeeping for order-3 jets in ``n`` variables (cached per ``n``)."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("jets need at least one variable")
        self.n = n
        self.alphas = multi_indices(n)
        self.size = len(self.alphas)
        self.position = {a: k for k, a in enumerate(self.alphas)}
        self.degree = np.array([sum(a) for a in self.alphas])
        self.factorial = np.array(
            [math.prod(math.factorial(e) for e in a) for a in self.alphas], dtype=float)

        pi, pj, pk = [], [], []
        for i, a in enumerate(self.alphas):
            for j, b in enumerate(self.alphas):
                if sum(a) + sum(b) <= ORDER:
                    pi.append(i)
                    pj.append(j)
                    pk.append(self.position[tuple(x + y for x, y in zip(a, b))])
        self.pi = np.array(pi)
        self.pj = np.array(pj)
        self.pk = np.array(pk)

        # product pairs sorted by target coefficient, per truncation degree;
        # a segmented sum over each run of equal targets gives the product
        self.pairs = {}
        for o in range(ORDER + 1):
            keep = self.degree[self.pk] <= o
            order_ = np.argsort(self.pk[keep], kind="stable")
            ti, tj, tk = self.pi[keep][order_], self.pj[keep][order_], self.pk[keep][order_]
            targets, starts = np.unique(tk, return_index=True)
            self.pairs[o] = (ti, tj, targets, starts)

        # d/dx_v:  (df)[alpha] = (alpha_v + 1) f[alpha + e_v]
        self.dsrc, self.ddst, self.dfac = [], [], []
        for v in range(n):
            src, dst, fac = [], [], []
            for k, a in enumerate(self.alphas):
                if sum(a) < ORDER:
                    b = list(a)
                    b[v] += 1
                    src.append(self.position[tuple(b)])
                    dst.append(k)
                    fac.append(b[v])
            self.dsrc.append(np.array(src))
            self.ddst.append(np.array(dst))
            self.dfac.append(np.array(fac, dtype=float))

    def index(self, alpha) -> int:
        alpha = tuple(int(a) for a in alpha)
        if len(alpha) != self.n or sum(alpha) > ORDER or min(alpha) < 0:
            raise ValueError(f"multi-index {alpha} outside an order-{ORDER} jet in {self.n} variables")
        return self.position[alpha]

    def unit(self, v: int) -> tuple[int, ...]:
        return tuple(1 if i == v else 0 for i in range(self.n))

    def product(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Truncated Cauchy product of two coefficient vectors."""
        return np.bincount(self.pk, weights=a[self.pi] * b[self.pj], minlength=self.size)


@lru_cache(maxsize=None)
def jet_space(n: int) -> JetSpace:
    return JetSpace(n)


# ---------------------------------------------------------------------------
# scalar jets
# ---------------------------------------------------------------------------

def _series(space: JetSpace, c0: float, h: np.ndarray, taylor) -> np.ndarray:
    """Compose a univariate Taylor polynomial ``sum taylor[k] t^k`` with ``h``.

    ``h`` is nilpotent (zero constant term), so powers above three vanish.
    """
    out = np.zeros(space.size)
    out[0] = taylor[0]
    hk = h
    for k in range(1, ORDER + 1):
        if taylor[k] != 0.0:
            out += taylor[k] * hk
        if k < ORDER:
            hk = space.product(hk, h)
    return out


def _reciprocal_coeffs(space: JetSpace, c: np.ndarray) -> np.ndarray:
    c0 = c[0]
    if c0 == 0.0:
        raise DivisionByZeroConstantTerm("division by a jet whose constant term is zero")
    h = c.copy()
    h[0] = 0.0
    return _series(space, 1.0 / c0, h, [1.0 / c0, -1.0 / c0**2, 1.0 / c0**3, -1.0 / c0**4])


class Jet:
    """Scalar order-3 jet.  Immutable; arithmetic returns new jets."""

    __slots__ = ("space", "coeffs")

    def __init__(self, space: JetSpace, coeffs):
        self.space = space
        self.coeffs = np.asarray(coeffs, dtype=float)
        if self.coeffs.shape != (space.size,):
            raise ValueError("coefficient vector has the wrong length")

    @classmethod
    def constant(cls, space: JetSpace, c: float) -> "Jet":
        out = np.zeros(space.size)
        out[0] = c
        return cls(space, out)

    @classmethod
    def variable(cls, space: JetSpace, i: int, x0: float) -> "Jet":
        if not 0 <= i < space.n:
            raise IndexError(f"variable index {i} out of range for {space.n} variables")
        out = np.zeros(space.size)
        out[0] = x0
        out[1 + i] = 1.0
        return cls(space, out)

    @property
    def value(self) -> float:
        return float(self.coeffs[0])

    def nilpotent(self) -> np.ndarray:
        h = self.coeffs.copy()
        h[0] = 0.0
        return h

    def partial(self, alpha) -> float:
        k = self.space.index(alpha)
        return float(self.space.factorial[k] * self.coeffs[k])

    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.space.n != self.space.n:
                raise ValueError(f"jets in {self.space.n} and {other.space.n} variables do not combine")
            return other
        return Jet.constant(self.space, float(other))

    def __add__(self, other):
        return Jet(self.space, self.coeffs + self._coerce(other).coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        return Jet(self.space, self.coeffs - self._coerce(other).coeffs)

    def __rsub__(self, other):
        return Jet(self.space, self._coerce(other).coeffs - self.coeffs)

    def __neg__(self):
        return Jet(self.space, -self.coeffs)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.space, self.coeffs * float(other))
        other = self._coerce(other)
        return Jet(self.space, self.space.product(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet":
        return Jet(self.space, _reciprocal_coeffs(self.space, self.coeffs))

    def __truediv__(self, other):
        other = self._coerce(other)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.reciprocal()

    def __pow__(self, q):
        return jet_pow(self, q)

    def __repr__(self):
        return f"Jet(n={self.space.n}, coeffs={np.array2string(self.coeffs, precision=6)})"


def jet_lift(space: JetSpace, c: float | None = None, var: int | None = None, x0=0.0) -> Jet:
    """Lift a constant (``c``) or the coordinate function ``x_var`` at the base point ``x0``.

    ``x0`` is either the full base point or just the value of ``x_var``.
    """
    if var is None:
        return Jet.constant(space, 0.0 if c is None else c)
    if not 0 <= var < space.n:
        raise IndexError(f"variable index {var} out of range for {space.n} variables")
    x0 = np.asarray(x0, dtype=float)
    return Jet.variable(space, var, float(x0[var]) if x0.ndim else float(x0))


def jet_arith(op: str, a: Jet, b: Jet) -> Jet:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown arithmetic op {op!r}")


def _elem_taylor(fn: str, a0: float):
    """Normalized Taylor coefficients f^(k)(a0)/k! for k = 0..3."""
    if fn == "sin":
        s, c = math.sin(a0), math.cos(a0)
        return [s, c, -s / 2.0, -c / 6.0]
    if fn == "cos":
        s, c = math.sin(a0), math.cos(a0)
        return [c, -s, -c / 2.0, s / 6.0]
    if fn == "tan":
        if abs(math.cos(a0)) < 1e-12:
            raise DomainError(f"tan evaluated at a pole (argument {a0!r})")
        t = math.tan(a0)
        d1 = 1.0 + t * t
        return [t, d1, t * d1, d1 * (1.0 + 3.0 * t * t) / 3.0]
    if fn == "exp":
        e = math.exp(a0)
        return [e, e, e / 2.0, e / 6.0]
    if fn == "log":
        if a0 <= 0.0:
            raise DomainError(f"log of non-positive value {a0!r}")
        return [math.log(a0), 1.0 / a0, -1.0 / (2.0 * a0**2), 1.0 / (3.0 * a0**3)]
    if fn == "sqrt":
        if a0 <= 0.0:
            raise DomainError(f"sqrt needs a positive constant term, got {a0!r}")
        s = math.sqrt(a0)
        return [s, 0.5 / s, -1.0 / (8.0 * s**3), 1.0 / (16.0 * s**5)]
    raise ValueError(f"unknown elementary function {fn!r}")


ELEMENTARY = ("sin", "cos", "tan", "exp", "log", "sqrt")


def jet_elem(fn: str, a: Jet) -> Jet:
    """Apply an elementary function by composing its Taylor series with ``a``."""
    if fn == "sqrt" and a.coeffs[0] == 0.0 and not a.coeffs.any():
        return Jet.constant(a.space, 0.0)
    taylor = _elem_taylor(fn, float(a.coeffs[0]))
    return Jet(a.space, _series(a.space, taylor[0], a.nilpotent(), taylor))


def jet_pow(a: Jet, q) -> Jet:
    """Rational power.  Non-negative integers use repeated products (exact)."""
    q = Fraction(q).limit_denominator(1 << 20) if not isinstance(q, Fraction) else q
    if q.denominator == 1:
        k = int(q)
        if k >= 0:
            out = Jet.constant(a.space, 1.0)
            for _ in range(k):
                out = out * a
            return out
        return jet_pow(a, -k).reciprocal()
    a0 = float(a.coeffs[0])
    if a0 <= 0.0:
        if a0 == 0.0 and not a.coeffs.any() and q > 0:
            return Jet.constant(a.space, 0.0)
        raise DomainError(f"fractional power {q} of non-positive value {a0!r}")
    qf = float(q)
    taylor = [a0**qf]
    binom = 1.0
    for k in range(1, ORDER + 1):
        binom *= (qf - (k - 1)) / k
        taylor.append(binom * a0 ** (qf - k))
    return Jet(a.space, _series(a.space, taylor[0], a.nilpotent(), taylor))


def jet_partial(a: Jet, alpha) -> float:
    return a.partial(alpha)


# ---------------------------------------------------------------------------
# tensor fields of jets
# ---------------------------------------------------------------------------

class Field:
    """Tensor-valued jet.  ``c`` has shape ``tensor_shape + (space.size,)``.

    ``order`` is the highest degree whose coefficients are exact.
    """

    __slots__ = ("space", "c", "order")

    def __init__(self, space: JetSpace, c: np.ndarray, order: int = ORDER):
        self.space = space
        self.c = c
        self.order = order

    @property
    def shape(self):
        return self.c.shape[:-1]

    @property
    def ndim(self):
        return self.c.ndim - 1

    @property
    def value(self) -> np.ndarray:
        return self.c[..., 0].copy()

    @classmethod
    def constant(cls, space: JetSpace, array) -> "Field":
        array = np.asarray(array, dtype=float)
        c = np.zeros(array.shape + (space.size,))
        c[..., 0] = array
        return cls(space, c, ORDER)

    @classmethod
    def from_jets(cls, space: JetSpace, jets: np.ndarray) -> "Field":
        """Stack an object array of :class:`Jet` (``None`` meaning zero)."""
        jets = np.asarray(jets, dtype=object)
        c = np.zeros(jets.shape + (space.size,))
        for idx, j in np.ndenumerate(jets):
            if j is not None:
                c[idx] = j.coeffs
        return cls(space, c, ORDER)

    def __getitem__(self, key):
        return Field(self.space, self.c[key], self.order)

    def _check(self, other):
        if not isinstance(other, Field):
            raise TypeError("fields only combine with fields; wrap arrays with Field.constant")

    def __add__(self, other):
        self._check(other)
        return Field(self.space, self.c + other.c, min(self.order, other.order))

    def __sub__(self, other):
        self._check(other)
        return Field(self.space, self.c - other.c, min(self.order, other.order))

    def __neg__(self):
        return Field(self.space, -self.c, self.order)

    def __mul__(self, k):
        if isinstance(k, Field):
            raise TypeError("use fmul for products of fields")
        return Field(self.space, self.c * float(k), self.order)

    __rmul__ = __mul__

    def __truediv__(self, k):
        return self * (1.0 / float(k))

    def transpose(self, spec: str) -> "Field":
        """Permute or trace tensor axes, e.g. ``'abc->bac'`` or ``'aab->b'``."""
        src, dst = spec.split("->")
        return Field(self.space, np.einsum(f"{src}z->{dst}z", self.c), self.order)

    def grad(self) -> "Field":
        """Partial derivatives with the derivative index placed first."""
        if self.order < 1:
            raise JetOrderExhausted("no derivative order left in this field")
        sp = self.space
        out = np.zeros((sp.n,) + self.c.shape)
        for v in range(sp.n):
            out[v][..., sp.ddst[v]] = self.c[..., sp.dsrc[v]] * sp.dfac[v]
        return Field(sp, out, self.order - 1)

    def partials(self, m: int) -> np.ndarray:
        """All ``m``-th partial derivatives at the base point, derivative axes last."""
        if m > self.order:
            raise JetOrderExhausted(f"field carries {self.order} derivative orders, asked for {m}")
        sp = self.space
        n = sp.n
        out = np.zeros(self.shape + (n,) * m)
        for dirs in np.ndindex(*(n,) * m):
            alpha = [0] * n
            for d in dirs:
                alpha[d] += 1
            k = sp.position[tuple(alpha)]
            out[(Ellipsis,) + dirs] = sp.factorial[k] * self.c[..., k]
        return out

    def truncated(self, order: int) -> "Field":
        return Field(self.space, self.c, min(order, self.order))

    def __repr__(self):
        return f"Field(shape={self.shape}, order={self.order})"


def _parse(spec: str):
    lhs, out = spec.replace(" ", "").split("->")
    return lhs.split(","), out


def _contract2(sa: str, sb: str, so: str, a: Field, b: Field) -> Field:
    sp = a.space
    order = min(a.order, b.order)
    z = next(ch for ch in _LETTERS[::-1] if ch not in sa + sb + so)
    shape = []
    for ch in so:
        if ch in sa:
            shape.append(a.c.shape[sa.index(ch)])
        else:
            shape.append(b.c.shape[sb.index(ch)])
    out = np.zeros(tuple(shape) + (sp.size,))
    ti, tj, targets, starts = sp.pairs[order]
    terms = np.einsum(f"{sa}{z},{sb}{z}->{so}{z}", a.c[..., ti], b.c[..., tj])
    out[..., targets] = np.add.reduceat(terms, starts, axis=-1)
    return Field(sp, out, order)


def fmul(spec: str, *fields: Field) -> Field:
    """Jet-aware einsum, e.g. ``fmul('ab,bc->ac', A, B)``.

    Operands are contracted left to right; intermediate results keep only the
    indices still needed by later operands or by the output.
    """
    ins, out = _parse(spec)
    if len(ins) != len(fields):
        raise ValueError("operand count does not match the subscripts")
    if len(fields) == 1:
        return fields[0].transpose(f"{ins[0]}->{out}")
    acc, sacc = fields[0], ins[0]
    for k in range(1, len(fields)):
        later = "".join(ins[k + 1:]) + out
        keep = []
        for ch in sacc + ins[k]:
            if (ch in later) and ch not in keep:
                keep.append(ch)
        stmp = "".join(keep) if k < len(fields) - 1 else out
        acc = _contract2(sacc, ins[k], stmp, acc, fields[k])
        sacc = stmp
    return acc


def finv(a: Field) -> Field:
    """Inverse of a matrix-valued field via the Neumann series of its nilpotent part."""
    sp = a.space
    a0 = a.c[..., 0]
    a0inv = np.linalg.inv(a0)
    nil = a.c.copy()
    nil[..., 0] = 0.0
    inv0 = Field.constant(sp, a0inv)
    x = -fmul("ab,bc->ac", inv0, Field(sp, nil, a.order))
    y = inv0
    for _ in range(ORDER):
        y = inv0 + fmul("ab,bc->ac", x, y)
    return y.truncated(a.order)


def frecip(a: Field) -> Field:
    """Elementwise reciprocal of a field."""
    sp = a.space
    a0 = a.c[..., 0]
    if np.any(a0 == 0.0):
        raise DivisionByZeroConstantTerm("reciprocal of a field with a zero constant term")
    h = a.c.copy()
    h[..., 0] = 0.0
    letters = _LETTERS[: a.ndim]
    spec = f"{letters},{letters}->{letters}"
    hf = Field(sp, h, a.order)
    inv0 = 1.0 / a0
    out = Field.constant(sp, inv0)
    hk = hf
    for k in range(1, ORDER + 1):
        coef = Field.constant(sp, (-1.0) ** k * inv0 ** (k + 1))
        out = out + fmul(spec, coef, hk)
        if k < ORDER:
            hk = fmul(spec, hk, hf)
    return out.truncated(a.order)


def fscalar_mul(s: Field, t: Field) -> Field:
    """Multiply a scalar field into a tensor field."""
    letters = _LETTERS[: t.ndim]
    return fmul(f",{letters}->{letters}", s, t)
