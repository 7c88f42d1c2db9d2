"""Classical local isotropy test: diagonalize, then Hilbert symbols."""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Optional, Sequence

from qfiso.forms import IsotropyVerdict, QuadraticForm, VerdictKind, rational_kernel_vector, triangle_pairs
from qfiso.padic.lazy import PAdicForm
from qfiso.padic.modp import legendre

__all__ = ["hilbert_symbol", "decide_hasse", "diagonalize", "is_square_qp", "hasse_invariant"]


def _split(a: Fraction, p: int) -> tuple[int, Fraction]:
    """``a = p^v * u`` with ``u`` a p-adic unit."""
    num, den = a.numerator, a.denominator
    v = 0
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v, Fraction(num, den)


def _unit_mod(u: Fraction, m: int) -> int:
    return u.numerator * pow(u.denominator, -1, m) % m


def hilbert_symbol(a, b, p: int) -> int:
    """``(a, b)_p``: +1 iff ``a x^2 + b y^2 = z^2`` has a nonzero solution in Q_p."""
    a, b = Fraction(a), Fraction(b)
    if a == 0 or b == 0:
        raise ValueError("Hilbert symbol of zero")
    alpha, u = _split(a, p)
    beta, v = _split(b, p)
    if p != 2:
        eps = ((p - 1) // 2) % 2
        sign = (-1) ** (alpha * beta * eps)
        lu = legendre(_unit_mod(u, p), p)
        lv = legendre(_unit_mod(v, p), p)
        return sign * (lu**beta) * (lv**alpha)
    u8, v8 = _unit_mod(u, 8), _unit_mod(v, 8)
    e_u, e_v = (u8 - 1) // 2 % 2, (v8 - 1) // 2 % 2
    w_u, w_v = (u8 * u8 - 1) // 8 % 2, (v8 * v8 - 1) // 8 % 2
    return (-1) ** ((e_u * e_v + alpha * w_v + beta * w_u) % 2)


def is_square_qp(a, p: int) -> bool:
    a = Fraction(a)
    if a == 0:
        return True
    v, u = _split(a, p)
    if v % 2:
        return False
    if p == 2:
        return _unit_mod(u, 8) == 1
    return legendre(_unit_mod(u, p), p) == 1


def diagonalize(form: QuadraticForm) -> list[Fraction]:
    """Diagonal entries of a form equivalent to ``form`` over Q.

    Symmetric elimination on the Gram matrix; a zero pivot with a nonzero
    off-diagonal entry is repaired by adding one basis vector to another.
    """
    n = form.n
    G = [[Fraction(0)] * n for _ in range(n)]
    for (i, j), c in zip(triangle_pairs(n), form.coeffs):
        c = Fraction(c)
        if i == j:
            G[i][i] = c
        else:
            G[i][j] = G[j][i] = c / 2
    out: list[Fraction] = []
    size = n
    while size:
        piv = next((k for k in range(size) if G[k][k] != 0), None)
        if piv is None:
            pair = next(((k, l) for k in range(size) for l in range(k + 1, size) if G[k][l] != 0), None)
            if pair is None:
                out.extend([Fraction(0)] * size)
                break
            k, l = pair
            # e_k <- e_k + e_l
            for t in range(size):
                G[k][t] += G[l][t]
            for t in range(size):
                G[t][k] += G[t][l]
            piv = k
        # move pivot to the end and eliminate
        last = size - 1
        G[piv], G[last] = G[last], G[piv]
        for row in G:
            row[piv], row[last] = row[last], row[piv]
        d = G[last][last]
        for r in range(last):
            f = G[r][last] / d
            if f:
                for c in range(last):
                    G[r][c] -= f * G[last][c]
        out.append(d)
        G = [row[:last] for row in G[:last]]
        size = last
    return out


def hasse_invariant(diag: Sequence[Fraction], p: int) -> int:
    h = 1
    for a, b in itertools.combinations(diag, 2):
        h *= hilbert_symbol(a, b, p)
    return h


def _small_witness(form: QuadraticForm, p: int, budget: int = 20000) -> Optional[tuple[list[int], int]]:
    """Brute-force search for a Hensel-certified primitive point mod p^k."""
    n = form.n
    for i in range(n):
        if form.a(i, i) == 0:
            return [int(k == i) for k in range(n)], 1
    tried = 0
    for k in (1, 2, 3):
        mod = p**k
        if mod**n > budget * 50 and k > 1:
            break
        for x in itertools.product(range(mod), repeat=n):
            tried += 1
            if tried > budget:
                return None
            if all(v % p == 0 for v in x):
                continue
            val = form(x)
            if val == 0:
                return list(x), k
            g = [int(v) for v in form.gradient(x)]
            gv = min((_split(Fraction(v), p)[0] for v in g if v), default=None)
            if gv is None:
                continue
            if _split(Fraction(val), p)[0] > 2 * gv:
                return list(x), k
    return None


def decide_hasse(f: PAdicForm | QuadraticForm, p: Optional[int] = None, *, find_witness: bool = True) -> IsotropyVerdict:
    """Isotropy over Q_p from the discriminant and the Hasse invariant."""
    if isinstance(f, PAdicForm):
        form, p = f.exact_form(), f.p
    else:
        form = f
        if p is None:
            raise ValueError("p is required for a bare QuadraticForm")
    n = form.n
    if form.is_zero():
        raise ValueError("decide_hasse needs a nonzero form")
    if form.discriminant() == 0:
        w = rational_kernel_vector(form.doubled_gram())
        return IsotropyVerdict(VerdictKind.DEGENERATE_ISOTROPIC, w, None, [], {"kernel_vector": True}, "hasse")
    diag = diagonalize(form)
    d = Fraction(1)
    for a in diag:
        d *= a
    h = hasse_invariant(diag, p)
    cert = {"diagonal": [str(a) for a in diag], "discriminant": str(d), "hasse_invariant": h}
    if n == 1:
        iso = False
    elif n == 2:
        iso = is_square_qp(-d, p)
    elif n == 3:
        iso = h == hilbert_symbol(-1, -d, p)
    elif n == 4:
        iso = (not is_square_qp(d, p)) or h == hilbert_symbol(-1, -1, p)
    else:
        iso = True
    if not iso:
        return IsotropyVerdict(VerdictKind.ANISOTROPIC, None, None, [], cert, "hasse")
    verdict = IsotropyVerdict(VerdictKind.ISOTROPIC, None, None, [], cert, "hasse")
    if find_witness:
        found = _small_witness(form.integral(), p)
        if found is not None:
            verdict.witness, verdict.depth = found
    return verdict
