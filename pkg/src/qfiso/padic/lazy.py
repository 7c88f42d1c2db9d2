"""p-adic forms whose coefficients are exact numbers or lazily drawn digits."""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from qfiso.forms import QuadraticForm, num_coeffs
from qfiso.primes import is_prime

__all__ = ["DigitSource", "LazyCoefficient", "PAdicForm", "PrecisionError", "CHUNK_DIGITS"]

CHUNK_DIGITS = 16


class PrecisionError(ArithmeticError):
    """More p-adic digits are needed than the working precision provides."""


class DigitSource:
    """Uniform base-p digits for every coefficient of one random form.

    Digits come in chunks of :data:`CHUNK_DIGITS`.  Chunk ``c`` of all
    coefficients is drawn from a generator keyed by ``(seed, index, c)``, so a
    digit never depends on how far other coefficients were expanded, or on
    which worker draws the form.
    """

    def __init__(self, p: int, count: int, seed: int, index: int):
        self.p = p
        self.count = count
        self.seed = seed
        self.index = index
        self._chunks: list[list[int]] = []

    def _chunk(self, c: int) -> list[int]:
        while len(self._chunks) <= c:
            k = len(self._chunks)
            key = hashlib.blake2b(f"{self.seed}:{self.index}:{k}".encode(), digest_size=16).digest()
            rng = random.Random(int.from_bytes(key, "big"))
            bound = self.p**CHUNK_DIGITS
            self._chunks.append([rng.randrange(bound) for _ in range(self.count)])
        return self._chunks[c]

    def value(self, k: int, depth: int) -> int:
        """Coefficient ``k`` modulo ``p**depth``."""
        chunks = -(-depth // CHUNK_DIGITS)
        total, scale = 0, 1
        step = self.p**CHUNK_DIGITS
        for c in range(chunks):
            total += self._chunk(c)[k] * scale
            scale *= step
        return total % self.p**depth

    def digits(self, k: int, depth: int) -> list[int]:
        v = self.value(k, depth)
        out = []
        for _ in range(depth):
            v, d = divmod(v, self.p)
            out.append(d)
        return out


@dataclass(frozen=True)
class LazyCoefficient:
    source: DigitSource
    slot: int

    def value(self, depth: int) -> int:
        return self.source.value(self.slot, depth)


Coefficient = Union[int, Fraction, LazyCoefficient]


@dataclass
class PAdicForm:
    """An n-ary form over Z_p (upper-triangular, row-major coefficients)."""

    n: int
    p: int
    coeffs: tuple
    depth_limit: int = 64

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")
        if len(self.coeffs) != num_coeffs(self.n):
            raise ValueError("wrong number of coefficients")
        self.coeffs = tuple(
            c if isinstance(c, LazyCoefficient) else (int(c) if Fraction(c).denominator == 1 else Fraction(c))
            for c in self.coeffs
        )

    @classmethod
    def exact(cls, form: QuadraticForm | Sequence, p: int, n: Optional[int] = None, **kw) -> PAdicForm:
        if isinstance(form, QuadraticForm):
            return cls(form.n, p, tuple(form.coeffs), **kw)
        if n is None:
            raise ValueError("n is required with a bare coefficient list")
        return cls(n, p, tuple(form), **kw)

    @classmethod
    def random(cls, n: int, p: int, seed: int, index: int, depth_limit: int = 64) -> PAdicForm:
        src = DigitSource(p, num_coeffs(n), seed, index)
        return cls(n, p, tuple(LazyCoefficient(src, k) for k in range(num_coeffs(n))), depth_limit)

    @property
    def is_exact(self) -> bool:
        return not any(isinstance(c, LazyCoefficient) for c in self.coeffs)

    def truncated(self, depth: int) -> list[int]:
        """Lazy coefficients modulo ``p**depth``; exact ones untouched."""
        return [c.value(depth) if isinstance(c, LazyCoefficient) else c for c in self.coeffs]

    def reduction(self) -> tuple[int, ...]:
        """Residues mod p; needs integral coefficients."""
        out = []
        for c in self.coeffs:
            if isinstance(c, LazyCoefficient):
                out.append(c.value(1))
            elif isinstance(c, Fraction):
                if c.denominator % self.p == 0:
                    raise ValueError("coefficient is not p-integral")
                out.append(c.numerator * pow(c.denominator, -1, self.p) % self.p)
            else:
                out.append(c % self.p)
        return tuple(out)

    def exact_form(self) -> QuadraticForm:
        if not self.is_exact:
            raise ValueError("form has lazy coefficients")
        return QuadraticForm(self.n, tuple(self.coeffs))
