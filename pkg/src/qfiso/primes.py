"""Primes: sieve, primality and factorization with a bounded effort."""

from __future__ import annotations

import math
from bisect import bisect_right

__all__ = ["primes_up_to", "is_prime", "factorize", "FactorizationError", "next_prime"]

# witnesses that make Miller-Rabin deterministic below 3.3e24
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)

_small_cache: list[int] = []


class FactorizationError(RuntimeError):
    """Raised when the configured effort is exhausted; carries the cofactor."""

    def __init__(self, composite: int, message: str = ""):
        super().__init__(message or f"could not factor {composite}")
        self.composite = composite


def primes_up_to(n: int) -> list[int]:
    """Sieve of Eratosthenes, inclusive."""
    global _small_cache
    if _small_cache and _small_cache[-1] >= n:
        return _small_cache[: bisect_right(_small_cache, n)]
    if n < 2:
        return []
    sieve = bytearray(b"\x01") * (n + 1)
    sieve[:2] = b"\x00\x00"
    for i in range(2, math.isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytes(len(range(i * i, n + 1, i)))
    out = [i for i, flag in enumerate(sieve) if flag]
    if n <= 2_000_000 and (not _small_cache or n > _small_cache[-1]):
        _small_cache = out
    return out


def is_prime(n: int) -> bool:
    if not isinstance(n, int) or n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(n: int) -> int:
    k = max(n + 1, 2)
    while not is_prime(k):
        k += 1
    return k


def _brent(n: int, c: int, max_iter: int) -> int | None:
    y, m, g, r, q = 2, 128, 1, 1, 1
    x = ys = y
    f = lambda v: (v * v + c) % n
    iters = 0
    while g == 1:
        x = y
        for _ in range(r):
            y = f(y)
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = f(y)
                q = q * abs(x - y) % n
            g = math.gcd(q, n)
            k += m
        r *= 2
        iters += r
        if iters > max_iter:
            return None
    if g == n:
        while True:
            ys = f(ys)
            g = math.gcd(abs(x - ys), n)
            if g > 1:
                break
    return g if g != n else None


def factorize(n: int, trial_limit: int = 10**6, rho_iterations: int = 2_000_000) -> dict[int, int]:
    """Prime factorization of ``|n|`` (``n != 0``).

    Trial division up to ``trial_limit``, then Pollard-Brent rho.  Raises
    :class:`FactorizationError` if a composite cofactor survives the budget.
    """
    n = abs(n)
    if n == 0:
        raise ValueError("cannot factor 0")
    out: dict[int, int] = {}
    bound = min(trial_limit, math.isqrt(n) + 1)
    for q in primes_up_to(bound):
        if q * q > n:
            break
        if n % q == 0:
            e = 0
            while n % q == 0:
                n //= q
                e += 1
            out[q] = e
    if n == 1:
        return out
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        r = math.isqrt(m)
        if r * r == m:
            stack += [r, r]
            continue
        for c in range(1, 20):
            d = _brent(m, c, rho_iterations)
            if d is not None and 1 < d < m:
                stack += [d, m // d]
                break
        else:
            raise FactorizationError(m)
    return dict(sorted(out.items()))
