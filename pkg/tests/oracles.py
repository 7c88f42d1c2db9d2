"""Reference values written down independently of the package's recursion.

Closed forms are transcribed from the published statements and assembled
with plain rational-function arithmetic; brute-force helpers search small
boxes directly.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from qfiso.symbolic import ONE, P, RationalFunction

p = P


def theorem1(n: int) -> RationalFunction:
    if n == 1:
        return RationalFunction(0)
    if n == 2:
        return RationalFunction(Fraction(1, 2))
    if n == 3:
        return ONE - p / (2 * (p + 1) ** 2)
    if n == 4:
        return ONE - p**3 / (4 * (p + 1) ** 2 * (p**4 + p**3 + p**2 + p + 1))
    return ONE


UNDEF = "-"

# rows n = 2, 3, 4 and n >= 5 of the beta/gamma table
BETA_GAMMA = {
    2: (UNDEF, UNDEF, UNDEF, RationalFunction(0)),
    3: (UNDEF, RationalFunction(0), RationalFunction(0), RationalFunction(Fraction(1, 2))),
    4: (
        RationalFunction(0),
        (2 * p + 1) / (2 * p + 2),
        (p + 2) / (2 * p + 2),
        ONE - p / (4 * (p**2 + p + 1)),
    ),
}

ALPHA = {
    2: (RationalFunction(0), ONE / (2 * p + 2)),
    3: (ONE / (p + 1), (p + 2) / (2 * p + 2)),
    4: (
        ONE - p**3 / (2 * (p + 1) * (p**2 + p + 1)),
        ONE - p**3 / (4 * (p + 1) * (p**3 + p**2 + p + 1)),
    ),
}


def lemma31(n: int):
    """(xi1, xi2, eta1, eta2, nu1, nu2) from the closed forms."""
    N = n * (n + 1) // 2
    xi1 = (p**n - 1) * (p**n - p) / (2 * (p + 1) * p**N)
    xi2 = (p**n - 1) / p**N
    eta1 = (p ** (n - 1) - 1) / (2 * p ** (n * (n - 1) // 2))
    eta2 = ONE / p ** (n * (n - 1) // 2)
    nu1 = ONE / p ** ((n - 1) * (n - 2) // 2) if n >= 2 else None
    return xi1, xi2, eta1, eta2, nu1, RationalFunction(0)


def form_value(n, coeffs, x):
    total = 0
    k = 0
    for i in range(n):
        for j in range(i, n):
            total += coeffs[k] * x[i] * x[j]
            k += 1
    return total


def vp(x: int, q: int) -> int:
    if x == 0:
        return 10**9
    v = 0
    while x % q == 0:
        x //= q
        v += 1
    return v


def liftable_zero_mod(n, coeffs, q, k):
    """Search primitive x mod q^k with v(Q(x)) > 2 v(grad Q(x)); None if absent.

    Only a sufficient test for isotropy, used for positive confirmation.
    """
    mod = q**k
    for x in itertools.product(range(mod), repeat=n):
        if all(t % q == 0 for t in x):
            continue
        val = form_value(n, coeffs, x)
        grad = []
        idx = 0
        g = [0] * n
        for i in range(n):
            for j in range(i, n):
                c = coeffs[idx]
                idx += 1
                if i == j:
                    g[i] += 2 * c * x[i]
                else:
                    g[i] += c * x[j]
                    g[j] += c * x[i]
        gv = min(vp(t, q) for t in g)
        if gv < 10**9 and vp(val, q) > 2 * gv and 2 * gv < k:
            return list(x)
    return None


def small_rational_zero(n, coeffs, bound):
    for x in itertools.product(range(-bound, bound + 1), repeat=n):
        if any(x) and form_value(n, coeffs, x) == 0:
            return list(x)
    return None
