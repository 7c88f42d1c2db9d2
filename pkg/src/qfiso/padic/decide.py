"""Recursive isotropy decision over Z_p with certificates.

The decider follows the reduction steps that underlie the local density
recursion.  A working form is in one of three contexts:

``Fresh``
    Arbitrary.  Made primitive, then classified mod p.  Case Other has a smooth
    zero mod p and is isotropic.  Case I (resp. II) is rotated so the reduction
    lives on ``x1, x2`` (resp. ``x1``); those variables are scaled by ``p`` and
    the form divided by ``p``.
``AfterCaseI``
    Rows 1-2 divisible by ``p`` and ``Q(x1, x2, 0, ...)/p`` irreducible mod p.
``AfterCaseII``
    ``v(a11) = 1`` and row 1 divisible by ``p``.

In the two "After" contexts the reduction is a form ``R`` in the remaining
variables.  ``R = 0`` sends the form (divided by ``p``) back to ``Fresh``; a
Case I or II ``R`` either hits one of six anisotropic base cases or is moved
by a monomial substitution into one of the "After" contexts again.

Witnesses are smooth zeros mod p, Hensel lifted on the working form and mapped
back through the recorded substitutions, then re-verified on the input form.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from qfiso.forms import (
    CaseClass,
    CaseKind,
    IsotropyVerdict,
    QuadraticForm,
    VerdictKind,
    num_coeffs,
    rational_kernel_vector,
    triangle_index,
    triangle_pairs,
)
from qfiso.padic.lazy import CHUNK_DIGITS, LazyCoefficient, PAdicForm, PrecisionError
from qfiso.padic.modp import classify_residues, identity, smooth_zero

__all__ = [
    "Context",
    "DecisionState",
    "BudgetExhausted",
    "classify_mod_p",
    "decide_recursive",
    "verify_witness",
    "witness_data",
    "valuation",
    "BASE_CASES",
]

BASE_CASES = ("alpha1(2)", "alpha2(1)", "beta1(4)", "beta2(3)", "gamma1(3)", "gamma2(2)")


class Context(enum.Enum):
    FRESH = "Fresh"
    AFTER_CASE_I = "AfterCaseI"
    AFTER_CASE_II = "AfterCaseII"


class BudgetExhausted(RuntimeError):
    pass


def valuation(x: int, p: int) -> Optional[int]:
    """p-adic valuation of an integer; ``None`` for zero."""
    if x == 0:
        return None
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def _val_fraction(x: Fraction, p: int) -> Optional[int]:
    if x == 0:
        return None
    return valuation(x.numerator, p) - valuation(x.denominator, p)


def classify_mod_p(f: PAdicForm) -> CaseClass:
    """Case of the mod-p reduction of ``f`` with its normalizing basis."""
    kind, U = classify_residues(f.p, f.n, f.reduction())
    return CaseClass(kind, U)


@dataclass
class DecisionState:
    """Mutable working form of one decision run."""

    n: int
    p: int
    coeffs: list[int]
    prec: Optional[int]  # None: exact
    context: Context = Context.FRESH
    step_count: int = 0
    budget: int = 0
    divisions: int = 0
    stack: list = field(default_factory=list)
    trace: list[dict] = field(default_factory=list)
    valuation_pattern: dict = field(default_factory=dict)

    # -- basic facts --------------------------------------------------------
    def residues(self, start: int = 0) -> tuple[int, ...]:
        if self.prec is not None and self.prec < 1:
            raise PrecisionError("no digits left")
        p = self.p
        n = self.n
        return tuple(
            self.coeffs[triangle_index(n, i, j)] % p
            for i in range(start, n)
            for j in range(i, n)
        )

    def _val(self, c: int) -> int:
        """Valuation of a coefficient, exact or as far as the precision allows."""
        if self.prec is None:
            v = valuation(c, self.p)
            return math.inf if v is None else v
        if c % self.p**self.prec == 0:
            return math.inf
        return valuation(c, self.p)

    def tick(self) -> None:
        self.step_count += 1
        if self.step_count > self.budget:
            raise BudgetExhausted(f"step budget {self.budget} exhausted")

    # -- moves --------------------------------------------------------------
    def divide(self, k: int) -> None:
        if k <= 0:
            return
        pk = self.p**k
        for idx, c in enumerate(self.coeffs):
            q, r = divmod(c, pk)
            if r:
                raise AssertionError("division by p^k of a non-divisible form")
            self.coeffs[idx] = q
        self.divisions += k
        if self.prec is not None:
            self.prec -= k
            self._truncate()

    def _truncate(self) -> None:
        if self.prec is not None:
            if self.prec < 1:
                raise PrecisionError("precision exhausted")
            m = self.p**self.prec
            self.coeffs = [c % m for c in self.coeffs]

    def make_primitive(self) -> int:
        vals = [self._val(c) for c in self.coeffs]
        v = min(vals)
        if v == math.inf:
            if self.prec is None:
                raise AssertionError("zero form reached the decider")
            raise PrecisionError("form vanishes to the working precision")
        self.divide(v)
        return v

    def change_basis(self, U: Sequence[Sequence[int]], start: int = 0) -> None:
        """Replace ``Q(x)`` by ``Q(U' x)``, ``U'`` = ``U`` on variables ``start..n-1``."""
        n = self.n
        m = n - start
        if U == identity(m):
            return
        full = [[int(i == j) for j in range(n)] for i in range(n)]
        for i in range(m):
            for j in range(m):
                full[start + i][start + j] = U[i][j]
        pairs = triangle_pairs(n)
        new = [0] * len(pairs)
        for (i, j), a in zip(pairs, self.coeffs):
            if not a:
                continue
            Ui, Uj = full[i], full[j]
            for k, (s, t) in enumerate(pairs):
                if s == t:
                    term = Ui[s] * Uj[s]
                else:
                    term = Ui[s] * Uj[t] + Uj[s] * Ui[t]
                if term:
                    new[k] += a * term
        self.coeffs = new
        self._truncate()
        self.stack.append(("basis", tuple(tuple(r) for r in full)))

    def monomial(self, moves: dict[int, tuple[int, int]]) -> None:
        """``Q(y) = Q(x)/p`` with ``x_old = p^e * y_new`` for ``old -> (new, e)``."""
        n, p = self.n, self.p
        dest = list(range(n))
        exps = [0] * n
        for old, (new, e) in moves.items():
            dest[old] = new
            exps[old] = e
        if sorted(dest) != list(range(n)):
            raise AssertionError("monomial move is not a permutation")
        new_c = [0] * num_coeffs(n)
        for (i, j), a in zip(triangle_pairs(n), self.coeffs):
            q, r = divmod(a * p ** (exps[i] + exps[j]), p)
            if r:
                raise AssertionError("monomial move broke integrality")
            new_c[triangle_index(n, dest[i], dest[j])] = q
        self.coeffs = new_c
        self.divisions += 1
        if self.prec is not None:
            self.prec -= 1
            self._truncate()
        self.stack.append(("monomial", tuple(dest), tuple(exps)))

    # -- valuation patterns -------------------------------------------------
    def record_pattern(self) -> None:
        n = self.n
        pat: dict[tuple[int, int], tuple[str, int]] = {}
        if self.context is Context.AFTER_CASE_I:
            for i in (0, 1):
                for j in range(i, n):
                    pat[(i, j)] = (">=", 1)
        elif self.context is Context.AFTER_CASE_II:
            pat[(0, 0)] = ("==", 1)
            for j in range(1, n):
                pat[(0, j)] = (">=", 1)
        self.valuation_pattern = pat

    def check_pattern(self) -> None:
        for (i, j), (op, bound) in self.valuation_pattern.items():
            v = self._val(self.coeffs[triangle_index(self.n, i, j)])
            ok = v >= bound if op == ">=" else v == bound
            if not ok:
                raise AssertionError(f"valuation pattern violated at ({i + 1},{j + 1}): v={v}, want {op} {bound}")
        if self.context is Context.AFTER_CASE_I:
            p = self.p
            red = tuple(self.coeffs[triangle_index(self.n, i, j)] // p % p for i, j in ((0, 0), (0, 1), (1, 1)))
            kind, _ = classify_residues(p, 2, red)
            if kind is not CaseKind.CASE_I:
                raise AssertionError("line condition lost after a Case I step")

    def map_back(self, y: Sequence[int]) -> list[int]:
        x = list(y)
        for entry in reversed(self.stack):
            if entry[0] == "basis":
                U = entry[1]
                x = [sum(U[i][j] * x[j] for j in range(self.n)) for i in range(self.n)]
            else:
                _, dest, exps = entry
                x = [self.p ** exps[i] * x[dest[i]] for i in range(self.n)]
        return x


_AFTER_I_MOVES = {
    # Case I: (1/p) Q(p x1, p x2, x3, ...)
    "fresh": {0: (0, 1), 1: (1, 1)},
    # R in Case I: (1/p) Q(x3, x4, p x1, p x2, x5, ...)
    "beta1": {0: (2, 0), 1: (3, 0), 2: (0, 1), 3: (1, 1)},
    # R in Case I after Case II: (1/p) Q(x3, p x1, p x2, x4, ...)
    "gamma1": {0: (2, 0), 1: (0, 1), 2: (1, 1)},
}
_AFTER_II_MOVES = {
    # Case II: (1/p) Q(p x1, x2, ...)
    "fresh": {0: (0, 1)},
    # R in Case II after Case I: (1/p) Q(x2, x3, p x1, x4, ...)
    "beta2": {0: (1, 0), 1: (2, 0), 2: (0, 1)},
    # R in Case II after Case II: (1/p) Q(x2, p x1, x3, ...)
    "gamma2": {0: (1, 0), 1: (0, 1)},
}

_SUBSTITUTION_TEXT = {
    "fresh_I": "Q <- Q(p x1, p x2, x3, ...)/p",
    "fresh_II": "Q <- Q(p x1, x2, ...)/p",
    "beta1": "Q <- Q(x3, x4, p x1, p x2, x5, ...)/p",
    "beta2": "Q <- Q(x2, x3, p x1, x4, ...)/p",
    "gamma1": "Q <- Q(x3, p x1, p x2, x4, ...)/p",
    "gamma2": "Q <- Q(x2, p x1, x3, ...)/p",
    "divide": "Q <- Q/p",
}


@dataclass
class _Outcome:
    kind: VerdictKind
    point: Optional[tuple[int, ...]] = None  # smooth zero mod p of the working form
    base_case: Optional[str] = None


def _run(state: DecisionState, check: bool) -> _Outcome:
    n = state.n
    while True:
        state.tick()
        ctx = state.context
        if ctx is Context.FRESH:
            k = state.make_primitive()
            red = state.residues()
            kind, U = classify_residues(state.p, n, red)
            step = {"n": n, "context": ctx.value, "case": kind.value}
            if k:
                step["primitive_division"] = k
            if kind is CaseKind.OTHER:
                state.trace.append(step)
                return _Outcome(VerdictKind.ISOTROPIC, point=_embed(smooth_zero(state.p, n, red), n, 0))
            if kind is CaseKind.CASE_I:
                if n == 2:
                    step["base_case"] = "alpha1(2)"
                    state.trace.append(step)
                    return _Outcome(VerdictKind.ANISOTROPIC, base_case="alpha1(2)")
                state.change_basis(U)
                state.monomial(_AFTER_I_MOVES["fresh"])
                state.context = Context.AFTER_CASE_I
                step["substitution"] = _SUBSTITUTION_TEXT["fresh_I"]
            else:  # Case II
                if n == 1:
                    step["base_case"] = "alpha2(1)"
                    state.trace.append(step)
                    return _Outcome(VerdictKind.ANISOTROPIC, base_case="alpha2(1)")
                state.change_basis(U)
                state.monomial(_AFTER_II_MOVES["fresh"])
                state.context = Context.AFTER_CASE_II
                step["substitution"] = _SUBSTITUTION_TEXT["fresh_II"]
            state.trace.append(step)
            state.record_pattern()
            if check:
                state.check_pattern()
            continue

        start = 2 if ctx is Context.AFTER_CASE_I else 1
        m = n - start
        red = state.residues(start)
        kind, U = classify_residues(state.p, m, red)
        step = {"n": n, "context": ctx.value, "case": kind.value}
        if kind is CaseKind.ZERO:
            state.divide(1)
            state.context = Context.FRESH
            step["substitution"] = _SUBSTITUTION_TEXT["divide"]
            state.trace.append(step)
            state.valuation_pattern = {}
            continue
        if kind is CaseKind.OTHER:
            state.trace.append(step)
            return _Outcome(VerdictKind.ISOTROPIC, point=_embed(smooth_zero(state.p, m, red), n, start))

        state.change_basis(U, start)
        if ctx is Context.AFTER_CASE_I:
            if kind is CaseKind.CASE_I:
                base, name, moves, nxt = n == 4, "beta1", _AFTER_I_MOVES["beta1"], Context.AFTER_CASE_I
                base_name = "beta1(4)"
            else:
                base, name, moves, nxt = n == 3, "beta2", _AFTER_II_MOVES["beta2"], Context.AFTER_CASE_II
                base_name = "beta2(3)"
        else:
            if kind is CaseKind.CASE_I:
                base, name, moves, nxt = n == 3, "gamma1", _AFTER_I_MOVES["gamma1"], Context.AFTER_CASE_I
                base_name = "gamma1(3)"
            else:
                base, name, moves, nxt = n == 2, "gamma2", _AFTER_II_MOVES["gamma2"], Context.AFTER_CASE_II
                base_name = "gamma2(2)"
        if base:
            step["base_case"] = base_name
            state.trace.append(step)
            return _Outcome(VerdictKind.ANISOTROPIC, base_case=base_name)
        state.monomial(moves)
        state.context = nxt
        step["substitution"] = _SUBSTITUTION_TEXT[name]
        state.trace.append(step)
        state.record_pattern()
        if check:
            state.check_pattern()


def _embed(z: Optional[Sequence[int]], n: int, start: int) -> tuple[int, ...]:
    if z is None:
        raise AssertionError("Case Other reduction without a smooth zero")
    return (0,) * start + tuple(z)


def _eval(coeffs: Sequence[int], n: int, x: Sequence[int]) -> int:
    total = 0
    for (i, j), c in zip(triangle_pairs(n), coeffs):
        if c:
            total += c * x[i] * x[j]
    return total


def _grad(coeffs: Sequence[int], n: int, x: Sequence[int]) -> list[int]:
    g = [0] * n
    for (i, j), c in zip(triangle_pairs(n), coeffs):
        if not c:
            continue
        if i == j:
            g[i] += 2 * c * x[i]
        else:
            g[i] += c * x[j]
            g[j] += c * x[i]
    return g


def _hensel_lift(coeffs: Sequence[int], n: int, p: int, y: Sequence[int], digits: int) -> list[int]:
    """Newton steps in one coordinate with a unit partial derivative."""
    y = list(y)
    g = _grad(coeffs, n, y)
    i = next(k for k, v in enumerate(g) if v % p)
    mod = p**digits
    for _ in range(2 * digits.bit_length() + 4):
        val = _eval(coeffs, n, y)
        if val % mod == 0:
            return y
        d = _grad(coeffs, n, y)[i]
        y[i] = (y[i] - val * pow(d, -1, mod)) % mod
    raise AssertionError("Hensel iteration did not converge")


def _strip_p(x: list[int], p: int) -> list[int]:
    while all(v % p == 0 for v in x) and any(x):
        x = [v // p for v in x]
    return x


def _integral_scale(coeffs: Sequence) -> list[int]:
    den = 1
    for c in coeffs:
        d = Fraction(c).denominator
        den = den * d // math.gcd(den, d)
    return [int(Fraction(c) * den) for c in coeffs]


def witness_data(coeffs: Sequence[int], n: int, p: int, w: Sequence[int], depth: Optional[int] = None) -> dict:
    """Valuations of ``Q(w)`` and of the gradient.

    With ``depth`` the coefficients are only known mod ``p**depth``: a value
    divisible by ``p**depth`` has valuation ``>= depth`` (reported as
    ``depth`` with ``value_exact = False``).
    """
    val = _eval(coeffs, n, w)
    grads = _grad(coeffs, n, w)
    gv = min((valuation(g, p) for g in grads if g), default=None)
    if depth is not None:
        if gv is not None and gv >= depth:
            gv = None
        mod = p**depth
        if val % mod == 0:
            return {"value_valuation": depth, "value_exact": False, "gradient_valuation": gv}
    vq = valuation(val, p)
    return {"value_valuation": vq, "value_exact": True, "gradient_valuation": gv, "exact_zero": val == 0}


def verify_witness(f: PAdicForm, w: Sequence[int]) -> bool:
    """Certificate check: ``Q(w) = 0`` or ``v(Q(w)) > 2 v(grad Q(w))``.

    ``w`` must be primitive mod p.  Lazy coefficients are read to
    ``f.depth_limit`` digits and the inequality must be decidable there.
    """
    p = f.p
    if all(x % p == 0 for x in w):
        return False
    if f.is_exact:
        coeffs = _integral_scale(f.coeffs)
        data = witness_data(coeffs, f.n, p, w)
        if data["exact_zero"]:
            return True
        gv = data["gradient_valuation"]
        return gv is not None and data["value_valuation"] > 2 * gv
    depth = f.depth_limit
    coeffs = f.truncated(depth)
    data = witness_data(coeffs, f.n, p, w, depth)
    gv = data["gradient_valuation"]
    if gv is None or 2 * gv >= depth:
        return False
    return data["value_valuation"] > 2 * gv


def _initial_budget(f: PAdicForm, coeffs: Sequence[int]) -> int:
    n = f.n
    if f.is_exact:
        disc = QuadraticForm(n, tuple(coeffs)).discriminant()
        return valuation(int(disc), f.p) + 8 * (n + 2)
    return f.depth_limit + 8 * (n + 2)


def decide_recursive(
    f: PAdicForm,
    *,
    witness: bool = True,
    check: bool = False,
    budget: Optional[int] = None,
) -> IsotropyVerdict:
    """Decide isotropy of ``f`` over Q_p.

    ``witness=False`` skips certificate construction (the verdict kind is
    unaffected).  ``check=True`` re-verifies the valuation pattern after
    every substitution.
    """
    n, p = f.n, f.p
    if f.is_exact:
        coeffs = _integral_scale(f.coeffs)
        qf = QuadraticForm(n, tuple(coeffs))
        if qf.is_zero():
            w = [1] + [0] * (n - 1)
            return IsotropyVerdict(VerdictKind.DEGENERATE_ISOTROPIC, w, None, [{"n": n, "case": "ZeroForm"}],
                                   {"exact_zero": True}, "recursive")
        if qf.discriminant() == 0:
            w = rational_kernel_vector(qf.doubled_gram())
            return IsotropyVerdict(VerdictKind.DEGENERATE_ISOTROPIC, w, None, [{"n": n, "case": "Degenerate"}],
                                   {"exact_zero": True, "kernel_vector": True}, "recursive")
        for i in range(n):
            if coeffs[triangle_index(n, i, i)] == 0:
                w = [int(k == i) for k in range(n)]
                return IsotropyVerdict(VerdictKind.ISOTROPIC, w, None,
                                       [{"n": n, "case": "ExplicitZero", "coordinate": i + 1}],
                                       {"exact_zero": True}, "recursive")
        depths = [None]
    else:
        coeffs = None
        depths = []
        d = CHUNK_DIGITS
        while d < f.depth_limit:
            depths.append(d)
            d *= 2
        depths.append(f.depth_limit)

    last_trace: list[dict] = []
    for depth in depths:
        work = coeffs if depth is None else f.truncated(depth)
        state = DecisionState(n, p, list(work), depth)
        state.budget = budget if budget is not None else _initial_budget(f, work)
        try:
            out = _run(state, check)
            if out.kind is VerdictKind.ANISOTROPIC:
                return IsotropyVerdict(VerdictKind.ANISOTROPIC, None, None, state.trace,
                                       {"base_case": out.base_case, "steps": state.step_count}, "recursive")
            if not witness:
                return IsotropyVerdict(VerdictKind.ISOTROPIC, None, None, state.trace,
                                       {"steps": state.step_count}, "recursive")
            return _certify(f, state, out.point, work, depth)
        except PrecisionError:
            last_trace = state.trace
            continue
        except BudgetExhausted as exc:
            return IsotropyVerdict(VerdictKind.UNDECIDED, None, None, state.trace,
                                   {"reason": str(exc), "depth": depth}, "recursive")
    return IsotropyVerdict(VerdictKind.UNDECIDED, None, None, last_trace,
                           {"reason": f"depth limit {f.depth_limit} reached"}, "recursive")


def _certify(f: PAdicForm, state: DecisionState, point, work, depth) -> IsotropyVerdict:
    n, p = f.n, f.p
    lift_digits = state.divisions + 2
    if state.prec is not None and state.prec < lift_digits:
        raise PrecisionError("not enough digits to lift the witness")
    y = _hensel_lift(state.coeffs, n, p, point, lift_digits)
    x = _strip_p(state.map_back(y), p)
    data = witness_data(work, n, p, x, depth)
    gv = data["gradient_valuation"]
    if gv is None:
        raise PrecisionError("gradient valuation beyond the working precision")
    if depth is not None and 2 * gv >= depth:
        raise PrecisionError("Hensel inequality not decidable at this depth")
    if not data.get("exact_zero") and not data["value_valuation"] > 2 * gv:
        raise AssertionError("mapped witness fails the Hensel condition")
    k = 2 * gv + 1
    mod = p**k
    w = x if data.get("exact_zero") else [v % mod for v in x]
    if not data.get("exact_zero"):
        data = witness_data(work, n, p, w, depth)
    if not verify_witness(f, w):
        raise AssertionError("witness failed re-verification on the input form")
    return IsotropyVerdict(VerdictKind.ISOTROPIC, w, None if data.get("exact_zero") else k, state.trace,
                           dict(data, steps=state.step_count), "recursive")
