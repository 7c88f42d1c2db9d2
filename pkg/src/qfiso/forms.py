"""Quadratic forms, verdicts and the JSON form-file schema.

A form in ``n`` variables is stored as its upper-triangular coefficients
``a_ij`` (``i <= j``) in row-major order::

    a11, a12, ..., a1n, a22, ..., a2n, ..., ann

so that ``Q(x) = sum_{i<=j} a_ij x_i x_j``.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

__all__ = [
    "QuadraticForm",
    "FormFileError",
    "CaseKind",
    "CaseClass",
    "VerdictKind",
    "IsotropyVerdict",
    "triangle_index",
    "triangle_pairs",
    "num_coeffs",
    "load_form",
    "parse_form",
]


def num_coeffs(n: int) -> int:
    return n * (n + 1) // 2


@lru_cache(maxsize=None)
def triangle_pairs(n: int) -> tuple[tuple[int, int], ...]:
    """``(i, j)`` pairs (0-based, ``i <= j``) in storage order."""
    return tuple((i, j) for i in range(n) for j in range(i, n))


@lru_cache(maxsize=None)
def _index_table(n: int) -> dict[tuple[int, int], int]:
    return {pair: k for k, pair in enumerate(triangle_pairs(n))}


def triangle_index(n: int, i: int, j: int) -> int:
    if i > j:
        i, j = j, i
    return _index_table(n)[(i, j)]


class FormFileError(ValueError):
    """Malformed form file; ``field`` names the offending entry."""

    def __init__(self, message: str, field: str = ""):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field


@dataclass(frozen=True)
class QuadraticForm:
    """An n-ary quadratic form over any coefficient ring supporting + and *."""

    n: int
    coeffs: tuple

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a form needs at least one variable")
        if len(self.coeffs) != num_coeffs(self.n):
            raise ValueError(f"expected {num_coeffs(self.n)} coefficients for n={self.n}, got {len(self.coeffs)}")

    @classmethod
    def from_matrix(cls, n: int, entry) -> QuadraticForm:
        """Build from a callable ``entry(i, j)`` giving ``a_ij`` for ``i <= j``."""
        return cls(n, tuple(entry(i, j) for i, j in triangle_pairs(n)))

    @classmethod
    def diagonal(cls, values: Sequence) -> QuadraticForm:
        n = len(values)
        return cls.from_matrix(n, lambda i, j: values[i] if i == j else 0)

    def a(self, i: int, j: int):
        return self.coeffs[triangle_index(self.n, i, j)]

    def __call__(self, x: Sequence):
        total = 0
        for (i, j), c in zip(triangle_pairs(self.n), self.coeffs):
            if c:
                total += c * x[i] * x[j]
        return total

    def gradient(self, x: Sequence) -> list:
        g = [0] * self.n
        for (i, j), c in zip(triangle_pairs(self.n), self.coeffs):
            if not c:
                continue
            if i == j:
                g[i] += 2 * c * x[i]
            else:
                g[i] += c * x[j]
                g[j] += c * x[i]
        return g

    def doubled_gram(self) -> list[list]:
        """Matrix ``B`` with ``B_ii = 2 a_ii`` and ``B_ij = a_ij``; ``Q(x) = x^T B x / 2``."""
        B = [[0] * self.n for _ in range(self.n)]
        for (i, j), c in zip(triangle_pairs(self.n), self.coeffs):
            if i == j:
                B[i][i] = 2 * c
            else:
                B[i][j] = B[j][i] = c
        return B

    def discriminant(self):
        """Determinant of :meth:`doubled_gram` (exact for exact coefficients)."""
        d = self.__dict__.get("_disc")
        if d is None:
            d = _det_exact(self.doubled_gram())
            object.__setattr__(self, "_disc", d)
        return d

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def height(self) -> int:
        return max(abs(c) for c in self.coeffs)

    def scaled(self, c) -> QuadraticForm:
        return QuadraticForm(self.n, tuple(c * a for a in self.coeffs))

    def substitute(self, U: Sequence[Sequence]) -> QuadraticForm:
        """The form ``x -> Q(U x)``."""
        n = self.n
        B = self.doubled_gram()
        # U^T B U, halved on the diagonal
        BU = [[sum(B[i][k] * U[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
        M = [[sum(U[k][i] * BU[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
        out = []
        for i, j in triangle_pairs(n):
            out.append(_half(M[i][i]) if i == j else M[i][j])
        return QuadraticForm(n, tuple(out))

    def integral(self) -> QuadraticForm:
        """A positive integer multiple with integer coefficients."""
        den = 1
        for c in self.coeffs:
            den = den * Fraction(c).denominator // math.gcd(den, Fraction(c).denominator)
        return QuadraticForm(self.n, tuple(int(Fraction(c) * den) for c in self.coeffs))

    def to_json(self) -> dict:
        return {"n": self.n, "coeffs": [_coeff_to_json(c) for c in self.coeffs]}

    def __str__(self) -> str:
        terms = []
        for (i, j), c in zip(triangle_pairs(self.n), self.coeffs):
            if c == 0:
                continue
            mono = f"x{i + 1}^2" if i == j else f"x{i + 1}*x{j + 1}"
            terms.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(terms) if terms else "0"


def _half(v):
    if isinstance(v, int):
        if v % 2:
            raise ValueError("substitution produced a non-integral diagonal")
        return v // 2
    return v / 2


def _coeff_to_json(c):
    if isinstance(c, Fraction):
        return str(c) if c.denominator != 1 else int(c)
    return c


def _det_bareiss(M: list[list[int]]) -> int:
    n = len(M)
    A = [list(row) for row in M]
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if A[r][k] != 0), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        akk = A[k][k]
        for i in range(k + 1, n):
            aik = A[i][k]
            row_i, row_k = A[i], A[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * A[n - 1][n - 1]


def _det_exact(M: list[list]) -> Fraction | int:
    n = len(M)
    if all(type(x) is int for row in M for x in row):
        return _det_bareiss(M)
    A = [[Fraction(x) for x in row] for row in M]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col] != 0), None)
        if piv is None:
            return 0
        if piv != col:
            A[col], A[piv] = A[piv], A[col]
            det = -det
        det *= A[col][col]
        inv = 1 / A[col][col]
        for r in range(col + 1, n):
            f = A[r][col] * inv
            if f:
                for c in range(col, n):
                    A[r][c] -= f * A[col][c]
    return int(det) if det.denominator == 1 else det


def parse_form(data: Any) -> QuadraticForm:
    """Validate a decoded form-file object against the schema."""
    if not isinstance(data, dict):
        raise FormFileError("form file must be a JSON object")
    if "n" not in data:
        raise FormFileError("missing", "n")
    n = data["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise FormFileError("must be a positive integer", "n")
    if "coeffs" not in data:
        raise FormFileError("missing", "coeffs")
    raw = data["coeffs"]
    if not isinstance(raw, list):
        raise FormFileError("must be a list", "coeffs")
    if len(raw) != num_coeffs(n):
        raise FormFileError(f"expected {num_coeffs(n)} entries, got {len(raw)}", "coeffs")
    coeffs = []
    for k, c in enumerate(raw):
        name = f"coeffs[{k}]"
        if isinstance(c, bool):
            raise FormFileError("booleans are not coefficients", name)
        if isinstance(c, int):
            coeffs.append(c)
        elif isinstance(c, str):
            try:
                v = Fraction(c.strip())
            except (ValueError, ZeroDivisionError):
                raise FormFileError(f"not a rational number: {c!r}", name) from None
            coeffs.append(int(v) if v.denominator == 1 else v)
        else:
            raise FormFileError("must be an integer or a decimal/fraction string", name)
    return QuadraticForm(n, tuple(coeffs))


def load_form(path: str | Path) -> QuadraticForm:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormFileError(f"invalid JSON ({exc.msg} at line {exc.lineno})") from None
    return parse_form(data)


class CaseKind(enum.Enum):
    ZERO = "Zero"
    CASE_I = "CaseI"
    CASE_II = "CaseII"
    OTHER = "CaseOther"


@dataclass(frozen=True)
class CaseClass:
    """Class of a mod-p reduction.

    ``basis`` is a unimodular integer matrix ``U`` (entries in ``[0, p)``) such
    that the reduction of ``Q(U x)`` is a binary form in ``x1, x2`` (Case I)
    or a unit times ``x1^2`` (Case II).  ``factors`` holds the linear forms a
    brute-force classifier found.
    """

    kind: CaseKind
    basis: Optional[tuple[tuple[int, ...], ...]] = None
    factors: Optional[tuple] = None


class VerdictKind(enum.Enum):
    ISOTROPIC = "Isotropic"
    ANISOTROPIC = "Anisotropic"
    DEGENERATE_ISOTROPIC = "DegenerateIsotropic"
    UNDECIDED = "Undecided"


@dataclass
class IsotropyVerdict:
    kind: VerdictKind
    witness: Optional[list[int]] = None
    depth: Optional[int] = None
    trace: list[dict] = field(default_factory=list)
    certificate: dict = field(default_factory=dict)
    method: str = ""

    @property
    def isotropic(self) -> bool:
        return self.kind in (VerdictKind.ISOTROPIC, VerdictKind.DEGENERATE_ISOTROPIC)

    @property
    def decided(self) -> bool:
        return self.kind is not VerdictKind.UNDECIDED

    def to_json(self) -> dict:
        out: dict[str, Any] = {"kind": self.kind.value, "method": self.method}
        if self.witness is not None:
            out["witness"] = {"vector": [str(x) if isinstance(x, Fraction) else x for x in self.witness],
                              "depth": self.depth}
        out["trace"] = self.trace
        if self.certificate:
            out["certificate"] = self.certificate
        return out


def rational_kernel_vector(M: Sequence[Sequence]) -> Optional[list[int]]:
    """A nonzero primitive integer vector in the kernel of ``M``, or ``None``."""
    n = len(M)
    A = [[Fraction(x) for x in row] for row in M]
    pivots: list[int] = []
    row = 0
    for col in range(n):
        piv = next((r for r in range(row, n) if A[r][col] != 0), None)
        if piv is None:
            continue
        A[row], A[piv] = A[piv], A[row]
        inv = 1 / A[row][col]
        A[row] = [v * inv for v in A[row]]
        for r in range(n):
            if r != row and A[r][col] != 0:
                f = A[r][col]
                A[r] = [a - f * b for a, b in zip(A[r], A[row])]
        pivots.append(col)
        row += 1
    free = [c for c in range(n) if c not in pivots]
    if not free:
        return None
    fcol = free[0]
    v = [Fraction(0)] * n
    v[fcol] = Fraction(1)
    for r, pc in enumerate(pivots):
        v[pc] = -A[r][fcol]
    den = 1
    for x in v:
        den = den * x.denominator // math.gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    return [x // g for x in ints]


def iter_vectors(n: int, modulus: int) -> Iterable[tuple[int, ...]]:
    """All vectors in ``[0, modulus)^n`` in lexicographic order."""
    if n == 0:
        yield ()
        return
    for head in range(modulus):
        for tail in iter_vectors(n - 1, modulus):
            yield (head,) + tail
