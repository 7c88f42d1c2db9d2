"""Linear algebra and quadratic-form classification over F_p."""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Optional, Sequence

from qfiso.forms import CaseKind, triangle_pairs

Matrix = tuple[tuple[int, ...], ...]


def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def sqrt_mod(a: int, p: int) -> int:
    """A square root of a quadratic residue modulo an odd prime (Tonelli-Shanks)."""
    a %= p
    if a == 0:
        return 0
    if p % 4 == 3:
        r = pow(a, (p + 1) // 4, p)
    else:
        q, s = p - 1, 0
        while q % 2 == 0:
            q //= 2
            s += 1
        z = 2
        while legendre(z, p) != -1:
            z += 1
        m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
        while t != 1:
            i, tt = 0, t
            while tt != 1:
                tt = tt * tt % p
                i += 1
            b = pow(c, 1 << (m - i - 1), p)
            m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    if r * r % p != a:
        raise ValueError(f"{a} is not a square mod {p}")
    return r


def identity(n: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def mat_inv_mod(M: Sequence[Sequence[int]], p: int) -> Matrix:
    n = len(M)
    A = [[M[i][j] % p for j in range(n)] + [int(i == j) for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col]), None)
        if piv is None:
            raise ValueError("matrix is singular mod p")
        A[col], A[piv] = A[piv], A[col]
        inv = pow(A[col][col], -1, p)
        A[col] = [v * inv % p for v in A[col]]
        for r in range(n):
            if r != col and A[r][col]:
                f = A[r][col]
                A[r] = [(a - f * b) % p for a, b in zip(A[r], A[col])]
    return tuple(tuple(row[n:]) for row in A)


def rank_mod(rows: Sequence[Sequence[int]], p: int) -> int:
    A = [[v % p for v in row] for row in rows]
    rank, ncols = 0, len(A[0]) if A else 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(A)) if A[r][col]), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        inv = pow(A[rank][col], -1, p)
        for r in range(len(A)):
            if r != rank and A[r][col]:
                f = A[r][col] * inv % p
                A[r] = [(a - f * b) % p for a, b in zip(A[r], A[rank])]
        rank += 1
    return rank


def kernel_basis_mod(M: Sequence[Sequence[int]], p: int) -> list[list[int]]:
    n = len(M[0])
    A = [[v % p for v in row] for row in M]
    pivots: list[int] = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, len(A)) if A[i][col]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = pow(A[r][col], -1, p)
        A[r] = [v * inv % p for v in A[r]]
        for i in range(len(A)):
            if i != r and A[i][col]:
                f = A[i][col]
                A[i] = [(a - f * b) % p for a, b in zip(A[i], A[r])]
        pivots.append(col)
        r += 1
    basis = []
    for free in (c for c in range(n) if c not in pivots):
        v = [0] * n
        v[free] = 1
        for i, pc in enumerate(pivots):
            v[pc] = -A[i][free] % p
        basis.append(v)
    return basis


def complete_rows(rows: list[list[int]], n: int, p: int) -> list[list[int]]:
    """Extend independent rows to a basis of F_p^n with standard vectors."""
    out = [list(r) for r in rows]
    for k in range(n):
        if len(out) == n:
            break
        e = [int(i == k) for i in range(n)]
        if rank_mod(out + [e], p) > len(out):
            out.append(e)
    return out


def eval_mod(coeffs: Sequence[int], n: int, x: Sequence[int], p: int) -> int:
    total = 0
    for (i, j), c in zip(triangle_pairs(n), coeffs):
        if c:
            total += c * x[i] * x[j]
    return total % p


def grad_mod(coeffs: Sequence[int], n: int, x: Sequence[int], p: int) -> list[int]:
    g = [0] * n
    for (i, j), c in zip(triangle_pairs(n), coeffs):
        if not c:
            continue
        if i == j:
            g[i] += 2 * c * x[i]
        else:
            g[i] += c * x[j]
            g[j] += c * x[i]
    return [v % p for v in g]


def _gram_diagonalize(coeffs: Sequence[int], n: int, p: int) -> tuple[list[int], list[list[int]]]:
    """Orthogonal basis for the Gram form of an odd-characteristic reduction.

    Returns ``(d, cols)`` with ``G(cols[k], cols[k]) = d[k]`` and the columns
    pairwise orthogonal; nonzero ``d`` come first.
    """
    half = pow(2, -1, p)
    G = [[0] * n for _ in range(n)]
    for (i, j), c in zip(triangle_pairs(n), coeffs):
        if i == j:
            G[i][i] = c % p
        else:
            G[i][j] = G[j][i] = c * half % p

    def bil(u, v):
        t = 0
        for ui, row in zip(u, G):
            if ui:
                t += ui * sum(g * x for g, x in zip(row, v))
        return t % p

    remaining = [[int(i == j) for i in range(n)] for j in range(n)]
    chosen: list[list[int]] = []
    diag: list[int] = []
    while remaining:
        pick = None
        for k, v in enumerate(remaining):
            if bil(v, v):
                pick = k
                break
        if pick is None:
            pair = next(
                ((a, b) for a in range(len(remaining)) for b in range(a + 1, len(remaining))
                 if bil(remaining[a], remaining[b])),
                None,
            )
            if pair is None:
                break
            a, b = pair
            remaining[a] = [(x + y) % p for x, y in zip(remaining[a], remaining[b])]
            pick = a
        v = remaining.pop(pick)
        dv = bil(v, v)
        inv = pow(dv, -1, p)
        remaining = [
            [(w_i - bil(w, v) * inv * v_i) % p for w_i, v_i in zip(w, v)] for w in remaining
        ]
        chosen.append(v)
        diag.append(dv)
    return diag, chosen + remaining


def _cols_to_matrix(cols: list[list[int]], n: int) -> Matrix:
    return tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))


@lru_cache(maxsize=1 << 18)
def classify_residues(p: int, n: int, red: tuple[int, ...]) -> tuple[CaseKind, Optional[Matrix]]:
    """Case of a reduction (residues in ``[0, p)``) and the normalizing basis.

    The basis ``U`` is such that ``Q(U x)`` reduces to a binary form in
    ``x1, x2`` (Case I) or to a unit times ``x1^2`` (Case II).
    """
    if not any(red):
        return CaseKind.ZERO, None
    if p == 2:
        return _classify_char2(n, red)
    diag, cols = _gram_diagonalize(red, n, p)
    r = len(diag)
    U = _cols_to_matrix(cols, n)
    if r == 1:
        return CaseKind.CASE_II, U
    if r == 2 and legendre(-diag[0] * diag[1], p) == -1:
        return CaseKind.CASE_I, U
    return CaseKind.OTHER, None


def _classify_char2(n: int, red: tuple[int, ...]) -> tuple[CaseKind, Optional[Matrix]]:
    A = [[0] * n for _ in range(n)]
    diag = [0] * n
    odd_pair = None
    for (i, j), c in zip(triangle_pairs(n), red):
        if i == j:
            diag[i] = c
        elif c:
            A[i][j] = A[j][i] = 1
            if odd_pair is None:
                odd_pair = (i, j)
    if odd_pair is None:
        # every diagonal form is the square of sum of the x_i with odd a_ii
        ell = diag
        V = complete_rows([ell], n, 2)
        return CaseKind.CASE_II, mat_inv_mod(V, 2)
    if rank_mod(A, 2) > 2:
        return CaseKind.OTHER, None
    for r in kernel_basis_mod(A, 2):
        if eval_mod(red, n, r, 2):
            return CaseKind.OTHER, None
    i, j = odd_pair
    if not (diag[i] and diag[j]):
        return CaseKind.OTHER, None
    lam1 = [A[k][j] for k in range(n)]
    lam2 = [A[i][k] for k in range(n)]
    V = complete_rows([lam1, lam2], n, 2)
    return CaseKind.CASE_I, mat_inv_mod(V, 2)


@lru_cache(maxsize=1 << 16)
def smooth_zero(p: int, n: int, red: tuple[int, ...]) -> Optional[tuple[int, ...]]:
    """A vector with ``Q = 0`` and nonzero gradient mod p, or ``None``."""
    if p == 2:
        for x in itertools.product((0, 1), repeat=n):
            if any(x) and eval_mod(red, n, x, 2) == 0 and any(grad_mod(red, n, x, 2)):
                return x
        return None
    diag, cols = _gram_diagonalize(red, n, p)
    r = len(diag)
    y = None
    if r == 2 and legendre(-diag[0] * diag[1], p) == 1:
        s = sqrt_mod(-diag[0] * pow(diag[1], -1, p), p)
        y = [1, s] + [0] * (n - 2)
    elif r >= 3:
        d1, d2, d3 = diag[:3]
        inv3 = pow(d3, -1, p)
        for t in range(p):
            target = -(d1 * t * t + d2) * inv3 % p
            if legendre(target, p) >= 0:
                y = [t, 1, sqrt_mod(target, p)] + [0] * (n - 3)
                break
    if y is None:
        return None
    x = tuple(sum(cols[k][i] * y[k] for k in range(n)) % p for i in range(n))
    if eval_mod(red, n, x, p) or not any(grad_mod(red, n, x, p)):
        raise AssertionError("constructed point is not a smooth zero")
    return x
