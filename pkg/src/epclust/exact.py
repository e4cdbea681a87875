"""Exact arithmetic in the real field Q(sqrt2, sqrt3).

Elements are stored as four rational coordinates on the basis
(1, sqrt2, sqrt3, sqrt6).  The field is closed under +, -, *, / and
equality is decided coordinate-wise, which is what rank and Jordan
computations on the explicit EP matrices need.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

from .errors import BackendError

# basis index of the product sqrt(a)*sqrt(b), with the rational factor it produces
# (index 0..3 -> 1, sqrt2, sqrt3, sqrt6)
_MUL = {
    (0, 0): (0, 1), (0, 1): (1, 1), (0, 2): (2, 1), (0, 3): (3, 1),
    (1, 1): (0, 2), (1, 2): (3, 1), (1, 3): (2, 2),
    (2, 2): (0, 3), (2, 3): (1, 3),
    (3, 3): (0, 6),
}
_ROOTS = (1.0, math.sqrt(2.0), math.sqrt(3.0), math.sqrt(6.0))


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise BackendError(f"cannot embed {x!r} exactly")


class ExactScalar:
    """q0 + q2*sqrt2 + q3*sqrt3 + q6*sqrt6 with rational q's."""

    __slots__ = ("_c",)

    def __init__(self, q0=0, q2=0, q3=0, q6=0):
        self._c = (_frac(q0), _frac(q2), _frac(q3), _frac(q6))

    @classmethod
    def coerce(cls, x) -> ExactScalar:
        if isinstance(x, ExactScalar):
            return x
        return cls(_frac(x))

    @property
    def coefficients(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return self._c

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other):
        try:
            o = ExactScalar.coerce(other)
        except BackendError:
            return NotImplemented
        return ExactScalar(*(a + b for a, b in zip(self._c, o._c)))

    __radd__ = __add__

    def __neg__(self):
        return ExactScalar(*(-a for a in self._c))

    def __pos__(self):
        return self

    def __sub__(self, other):
        try:
            o = ExactScalar.coerce(other)
        except BackendError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = ExactScalar.coerce(other)
        except BackendError:
            return NotImplemented
        out = [Fraction(0)] * 4
        for i, a in enumerate(self._c):
            if not a:
                continue
            for j, b in enumerate(o._c):
                if not b:
                    continue
                k, f = _MUL[(i, j) if i <= j else (j, i)]
                out[k] += f * a * b
        return ExactScalar(*out)

    __rmul__ = __mul__

    def _conj2(self):
        a, b, c, d = self._c
        return ExactScalar(a, -b, c, -d)

    def _conj3(self):
        a, b, c, d = self._c
        return ExactScalar(a, b, -c, -d)

    def inverse(self) -> ExactScalar:
        if not self:
            raise ZeroDivisionError("inverse of zero in Q(sqrt2, sqrt3)")
        # x * s3(x) lies in Q(sqrt2); multiplying by its sqrt2-conjugate lands in Q
        partial = self._conj3()
        m = self * partial
        partial = partial * m._conj2()
        norm = (m * m._conj2())._c[0]
        return ExactScalar(*(a / norm for a in partial._c))

    def __truediv__(self, other):
        try:
            o = ExactScalar.coerce(other)
        except BackendError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return ExactScalar.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out, base = ExactScalar(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- comparisons / conversions --------------------------------------
    def __eq__(self, other):
        try:
            o = ExactScalar.coerce(other)
        except BackendError:
            if isinstance(other, float):
                return self.is_rational() and float(self._c[0]) == other
            return NotImplemented
        return self._c == o._c

    def __hash__(self):
        if self.is_rational():
            return hash(self._c[0])
        return hash(self._c)

    def __bool__(self):
        return any(self._c)

    def is_rational(self) -> bool:
        return not (self._c[1] or self._c[2] or self._c[3])

    def __float__(self):
        return float(sum(float(a) * r for a, r in zip(self._c, _ROOTS)))

    def __complex__(self):
        return complex(float(self))

    def __abs__(self):
        return self if float(self) >= 0 else -self

    def __repr__(self):
        return "ExactScalar({})".format(", ".join(f"'{a}'" for a in self._c))

    def __str__(self):
        if self.is_rational():
            return str(self._c[0])
        terms = []
        for a, name in zip(self._c, ("", "√2", "√3", "√6")):
            if not a:
                continue
            if name and abs(a) == 1:
                t = name
            else:
                t = f"{abs(a)}{name}"
            terms.append(("-" if a < 0 else "+", t))
        sign, first = terms[0]
        head = ("-" if sign == "-" else "") + first
        return head + "".join(f"{s}{t}" for s, t in terms[1:])

    def to_json(self) -> list[str]:
        return [str(a) for a in self._c]

    @classmethod
    def from_json(cls, coeffs) -> ExactScalar:
        if len(coeffs) != 4:
            raise ValueError("exact entry needs four coefficients")
        return cls(*(Fraction(str(a)) for a in coeffs))


ZERO = ExactScalar(0)
ONE = ExactScalar(1)
SQRT2 = ExactScalar(0, 1)
SQRT3 = ExactScalar(0, 0, 1)
SQRT6 = ExactScalar(0, 0, 0, 1)


def _squarefree_split(m: int) -> tuple[int, int]:
    """Return (r, s) with m == r*r*s and s squarefree."""
    r, s, p = 1, 1, 2
    while p * p <= m:
        while m % (p * p) == 0:
            m //= p * p
            r *= p
        if m % p == 0:
            m //= p
            s *= p
        p += 1
    return r, s * m


def exact_sqrt(q) -> ExactScalar:
    """sqrt(q) for rational q >= 0, when it lies in Q(sqrt2, sqrt3)."""
    q = _frac(q)
    if q < 0:
        raise BackendError(f"sqrt({q}) is not real")
    if q == 0:
        return ZERO
    # sqrt(a/b) = sqrt(a*b)/b
    r, s = _squarefree_split(q.numerator * q.denominator)
    coeff = Fraction(r, q.denominator)
    slot = {1: 0, 2: 1, 3: 2, 6: 3}.get(s)
    if slot is None:
        raise BackendError(f"sqrt({q}) needs sqrt({s}), outside Q(sqrt2, sqrt3)")
    c = [0, 0, 0, 0]
    c[slot] = coeff
    return ExactScalar(*c)


def is_exact_number(x) -> bool:
    return isinstance(x, (ExactScalar, int, Fraction)) and not isinstance(x, bool)
