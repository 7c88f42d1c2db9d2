"""Exact univariate polynomials and rational functions in the indeterminate ``p``.

Coefficients are :class:`fractions.Fraction` so every intermediate expression
stays closed under division.  A :class:`RationalFunction` is always kept in a
canonical form: numerator and denominator are coprime, both have integer
coefficients with no common content, and the denominator's leading
coefficient is positive.  Two rational functions are equal iff their canonical
pairs are equal.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence, Union

Scalar = Union[int, Fraction]

__all__ = [
    "Polynomial",
    "RationalFunction",
    "rf_arith",
    "rf_eval",
    "P",
    "ONE",
    "ZERO",
]


class Polynomial:
    """Dense polynomial; ``coeffs[i]`` is the coefficient of ``p**i``.

    Trailing zeros are stripped, so the zero polynomial has ``coeffs == ()``.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Scalar] = ()):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def monomial(cls, degree: int, coeff: Scalar = 1) -> Polynomial:
        return cls([0] * degree + [coeff])

    @property
    def degree(self) -> int:
        """Degree, with ``-1`` for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Polynomial([other])
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"Polynomial({[str(c) for c in self.coeffs]})"

    def __str__(self) -> str:
        return _format_poly(self.coeffs)

    def __neg__(self) -> Polynomial:
        return Polynomial(-c for c in self.coeffs)

    def __add__(self, other: Polynomial | Scalar) -> Polynomial:
        other = _as_poly(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return Polynomial([x + (b[i] if i < len(b) else 0) for i, x in enumerate(a)])

    __radd__ = __add__

    def __sub__(self, other: Polynomial | Scalar) -> Polynomial:
        return self + (-_as_poly(other))

    def __rsub__(self, other: Scalar) -> Polynomial:
        return _as_poly(other) - self

    def __mul__(self, other: Polynomial | Scalar) -> Polynomial:
        other = _as_poly(other)
        if not self.coeffs or not other.coeffs:
            return Polynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(other.coeffs):
                    out[i + j] += x * y
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> Polynomial:
        if k < 0:
            raise ValueError("negative polynomial power")
        result = Polynomial([1])
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def divmod(self, other: Polynomial) -> tuple[Polynomial, Polynomial]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        lc = other.lc
        quot = [Fraction(0)] * max(len(rem) - dq, 0)
        for k in range(len(rem) - 1, dq - 1, -1):
            c = rem[k]
            if c:
                q = c / lc
                quot[k - dq] = q
                for j, oc in enumerate(other.coeffs):
                    rem[k - dq + j] -= q * oc
        return Polynomial(quot), Polynomial(rem[:dq] if dq > 0 else [])

    def __floordiv__(self, other: Polynomial) -> Polynomial:
        return self.divmod(other)[0]

    def __mod__(self, other: Polynomial) -> Polynomial:
        return self.divmod(other)[1]

    def monic(self) -> Polynomial:
        if self.is_zero():
            return self
        lc = self.lc
        return Polynomial(c / lc for c in self.coeffs)

    def __call__(self, x: Scalar) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def content_denominator(self) -> int:
        """Least common multiple of the coefficient denominators."""
        return reduce(_lcm, (c.denominator for c in self.coeffs), 1)

    def int_content(self) -> int:
        """gcd of the numerators (meaningful once coefficients are integral)."""
        return reduce(math.gcd, (c.numerator for c in self.coeffs), 0)


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def _as_poly(x: Polynomial | Scalar) -> Polynomial:
    if isinstance(x, Polynomial):
        return x
    if isinstance(x, (int, Fraction)):
        return Polynomial([x])
    raise TypeError(f"cannot coerce {type(x).__name__} to Polynomial")


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic gcd over the rationals (Euclid); gcd(0, 0) = 0."""
    while b:
        a, b = b, a % b
    return a.monic()


def _format_poly(coeffs: Sequence[Fraction], var: str = "p") -> str:
    if not coeffs:
        return "0"
    terms = []
    for deg in range(len(coeffs) - 1, -1, -1):
        c = coeffs[deg]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if deg == 0:
            body = str(mag)
        else:
            mono = var if deg == 1 else f"{var}^{deg}"
            body = mono if mag == 1 else f"{mag}*{mono}"
        terms.append((sign, body))
    first_sign, first_body = terms[0]
    out = ("-" if first_sign == "-" else "") + first_body
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


class RationalFunction:
    """Canonical quotient of two polynomials in ``p``."""

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial | Scalar, den: Polynomial | Scalar = 1):
        num, den = _as_poly(num), _as_poly(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            self.num, self.den = Polynomial(), Polynomial([1])
            return
        g = poly_gcd(num, den)
        if g.degree > 0:
            num, den = num // g, den // g
        # clear denominators, strip common integer content, fix the sign
        scale = _lcm(num.content_denominator(), den.content_denominator())
        num, den = num * scale, den * scale
        content = math.gcd(num.int_content(), den.int_content())
        if den.lc < 0:
            content = -content
        self.num = Polynomial(c / content for c in num.coeffs)
        self.den = Polynomial(c / content for c in den.coeffs)

    @classmethod
    def coerce(cls, x: RationalFunction | Polynomial | Scalar) -> RationalFunction:
        return x if isinstance(x, RationalFunction) else cls(x)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.degree <= 0 and self.den.degree == 0

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction, Polynomial)):
            other = RationalFunction(other)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __repr__(self) -> str:
        return f"RationalFunction({self})"

    def __str__(self) -> str:
        num, den = str(self.num), str(self.den)
        if den == "1":
            return num
        if len(self.num.coeffs) - self.num.coeffs.count(0) > 1:
            num = f"({num})"
        if len(self.den.coeffs) - self.den.coeffs.count(0) > 1:
            den = f"({den})"
        return f"{num} / {den}"

    def __neg__(self) -> RationalFunction:
        return RationalFunction(-self.num, self.den)

    def __add__(self, other) -> RationalFunction:
        if not isinstance(other, _OPERANDS):
            return NotImplemented
        other = RationalFunction.coerce(other)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other) -> RationalFunction:
        if not isinstance(other, _OPERANDS):
            return NotImplemented
        return self + (-RationalFunction.coerce(other))

    def __rsub__(self, other) -> RationalFunction:
        if not isinstance(other, _OPERANDS):
            return NotImplemented
        return RationalFunction.coerce(other) - self

    def __mul__(self, other) -> RationalFunction:
        if not isinstance(other, _OPERANDS):
            return NotImplemented
        other = RationalFunction.coerce(other)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> RationalFunction:
        if not isinstance(other, _OPERANDS):
            return NotImplemented
        other = RationalFunction.coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other) -> RationalFunction:
        if not isinstance(other, _OPERANDS):
            return NotImplemented
        return RationalFunction.coerce(other) / self

    def __pow__(self, k: int) -> RationalFunction:
        if k < 0:
            return RationalFunction(1) / (self ** (-k))
        return RationalFunction(self.num**k, self.den**k)

    def __call__(self, p: Scalar) -> Fraction:
        return rf_eval(self, p)

    def to_json(self) -> dict:
        """Ascending-degree integer coefficient arrays."""
        return {
            "numerator": [int(c) for c in self.num.coeffs],
            "denominator": [int(c) for c in self.den.coeffs],
        }

    @classmethod
    def from_json(cls, data: dict) -> RationalFunction:
        return cls(Polynomial(data["numerator"]), Polynomial(data["denominator"]))


_OPERANDS = (RationalFunction, Polynomial, int, Fraction)


def rf_arith(lhs: RationalFunction, rhs: RationalFunction, op: str) -> RationalFunction:
    """Apply ``op`` in ``{"add", "sub", "mul", "div"}``."""
    if op == "add":
        return lhs + rhs
    if op == "sub":
        return lhs - rhs
    if op == "mul":
        return lhs * rhs
    if op == "div":
        return lhs / rhs
    raise ValueError(f"unknown operation {op!r}")


def rf_eval(f: RationalFunction, p: Scalar) -> Fraction:
    """Specialize ``f`` at ``p``; raises ``ZeroDivisionError`` at a pole."""
    d = f.den(p)
    if d == 0:
        raise ZeroDivisionError(f"{f} has a pole at p = {p}")
    return f.num(p) / d


P = RationalFunction(Polynomial([0, 1]))
ONE = RationalFunction(1)
ZERO = RationalFunction(0)
