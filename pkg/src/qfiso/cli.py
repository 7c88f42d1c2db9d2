"""Command-line interface.

Exit codes: 0 on a definitive answer, 1 on usage, parse or consistency
errors, 2 when a decision is Undecided.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import secrets
import sys
from fractions import Fraction
from typing import Optional, Sequence

from qfiso.estimate import DEFAULT_SEED

EXIT_OK, EXIT_ERROR, EXIT_UNDECIDED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _seed(text: str) -> int:
    if text == "random":
        return secrets.randbits(63)
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer or 'random', got {text!r}") from None


def _positive(kind):
    def conv(text):
        try:
            v = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v

    return conv


def _samples(text: str) -> int:
    # accept 1e6 as well as 1000000
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if v != int(v) or v < 1:
        raise argparse.ArgumentTypeError(f"samples must be a positive integer, got {text}")
    return int(v)


def _prime(text: str) -> int:
    from qfiso.primes import is_prime

    p = _positive(int)(text)
    if not is_prime(p):
        raise argparse.ArgumentTypeError(f"{p} is not prime")
    return p


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=False, default=str))


def _fmt(rf) -> str:
    from qfiso.localdensity import UNDEFINED

    if rf is None or rf is UNDEFINED:
        return "-"
    if len(rf.num.coeffs) <= 1 and len(rf.den.coeffs) <= 1:
        num = rf.num.coeffs[0] if rf.num.coeffs else 0
        return str(Fraction(num) / Fraction(rf.den.coeffs[0]))
    return str(rf)


# subcommands


def cmd_density_local(a) -> int:
    from qfiso.localdensity import rho_local, rho_local_at

    if a.p is None:
        rf = rho_local(a.n)
        _emit({"n": a.n, "rho": _fmt(rf), "rational_function": rf.to_json()})
        return EXIT_OK
    q = rho_local_at(a.n, a.p)
    _emit({"n": a.n, "p": a.p, "rational": str(q), "decimal": f"{float(q):.12f}"})
    return EXIT_OK


def cmd_density_real(a) -> int:
    from qfiso.realdensity import estimate_rho_infinity

    _emit(estimate_rho_infinity(a.n, a.dist, a.samples, a.seed).to_json())
    return EXIT_OK


def cmd_euler(a) -> int:
    from qfiso.globaldensity import euler_product

    out = euler_product(a.n, a.tol).to_json()
    out.update({"n": a.n, "tol": a.tol})
    _emit(out)
    return EXIT_OK


def cmd_density_global(a) -> int:
    from qfiso.globaldensity import rho_n_combined

    _emit(rho_n_combined(a.n, a.dist, a.samples, a.tol, a.seed).to_json())
    return EXIT_OK


def _verdict_code(*verdicts) -> int:
    from qfiso.forms import VerdictKind

    return EXIT_UNDECIDED if any(v.kind is VerdictKind.UNDECIDED for v in verdicts) else EXIT_OK


def cmd_isotropy_local(a) -> int:
    from qfiso.forms import load_form
    from qfiso.padic import PAdicForm, decide_hasse, decide_recursive

    form = load_form(a.input)
    out = {"n": form.n, "p": a.p}
    verdicts = []
    if a.method in ("recursive", "both"):
        v = decide_recursive(PAdicForm.exact(form, a.p, depth_limit=a.depth))
        out["recursive"] = v.to_json()
        verdicts.append(v)
    if a.method in ("hasse", "both"):
        if form.is_zero():
            from qfiso.forms import IsotropyVerdict, VerdictKind

            h = IsotropyVerdict(VerdictKind.DEGENERATE_ISOTROPIC, [1] + [0] * (form.n - 1), None, [], {}, "hasse")
        else:
            h = decide_hasse(form, a.p)
        out["hasse"] = h.to_json()
        verdicts.append(h)
    if a.method == "both":
        agree = verdicts[0].kind is verdicts[1].kind
        out["agree"] = agree
        _emit(out)
        if not agree:
            print("error: recursive and Hasse verdicts disagree", file=sys.stderr)
            return EXIT_ERROR
    else:
        _emit(out)
    return _verdict_code(*verdicts)


def cmd_isotropy_global(a) -> int:
    from qfiso.forms import load_form
    from qfiso.globaldensity import decide_global

    form = load_form(a.input).integral()
    v = decide_global(form)
    out = {"n": form.n}
    out.update(v.to_json())
    _emit(out)
    return _verdict_code(v)


def cmd_experiment_local(a) -> int:
    from qfiso.localdensity import rho_local_at
    from qfiso.padic import sample_local_density

    est = sample_local_density(a.n, a.p, a.samples, a.seed, a.depth, a.condition)
    out = est.to_json()
    if a.condition == "none":
        exact = rho_local_at(a.n, a.p)
        out["exact"] = str(exact)
        out["z_score"] = (est.estimate - float(exact)) / est.stderr if est.stderr else None
    _emit(out)
    return EXIT_OK


def cmd_experiment_global(a) -> int:
    from qfiso.globaldensity import empirical_global

    _emit(empirical_global(a.n, a.height, a.samples, a.seed).to_json())
    return EXIT_OK


def cmd_count_ff(a) -> int:
    from qfiso.fforacle import GuardError, compare_with_lemma, enumerate_counts

    try:
        counts = enumerate_counts(a.p, a.n)
    except GuardError as exc:
        raise UsageError(str(exc)) from None
    cmp = compare_with_lemma(counts)
    passed = all(c["pass"] for c in cmp.values())
    _emit({"counts": counts.to_json(), "lemma": cmp, "result": "pass" if passed else "fail"})
    return EXIT_OK if passed else EXIT_ERROR


def _table_rows(a) -> tuple[list[str], list[list[str]]]:
    from qfiso.localdensity import rho_local, solve_alpha, solve_beta_gamma

    ns = range(1, a.max_n + 1)
    if a.which == "theorem1":
        return ["n", "rho_n(p)"], [[str(n), _fmt(rho_local(n))] for n in ns]
    if a.which == "betagamma":
        head = ["n", "beta1", "beta2", "gamma1", "gamma2"]
        rows = []
        for n in range(2, a.max_n + 1):
            d = solve_beta_gamma(n).as_dict()
            rows.append([str(n)] + [_fmt(d[k]) for k in head[1:]])
        return head, rows
    if a.which == "alpha":
        head = ["n", "alpha1", "alpha2"]
        rows = []
        for n in range(2, a.max_n + 1):
            d = solve_alpha(n).as_dict()
            rows.append([str(n)] + [_fmt(d[k]) for k in head[1:]])
        return head, rows
    from qfiso.globaldensity import rho_n_combined

    rows = []
    for n in ns:
        if n <= 3:
            rows.append([str(n), "0", "0", "0"])
            continue
        u = rho_n_combined(n, "uniform", a.samples, 1e-6, a.seed)
        g = rho_n_combined(n, "goe", a.samples, 1e-6, a.seed)
        general = "rho_4^D(inf) * prod_p rho_4(p)" if n == 4 else f"rho_{n}^D(inf)"
        rows.append([str(n), general, f"{u.estimate:.4f} +- {u.stderr:.4f}", f"{g.estimate:.4f} +- {g.stderr:.4f}"])
    return ["n", "rho_n^D", "rho_n (uniform)", "rho_n (GOE)"], rows


def cmd_tables(a) -> int:
    head, rows = _table_rows(a)
    if a.format == "json":
        _emit({"table": a.which, "columns": head, "rows": rows})
    elif a.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(head)
        w.writerows(rows)
        sys.stdout.write(buf.getvalue())
    else:
        print("| " + " | ".join(head) + " |")
        print("|" + "---|" * len(head))
        for r in rows:
            print("| " + " | ".join(r) + " |")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qfiso", description="Isotropy densities of random quadratic forms.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_, description=help_)
        sp.set_defaults(func=fn)
        return sp

    seed_kw = dict(type=_seed, default=DEFAULT_SEED, help=f"integer or 'random' (default {DEFAULT_SEED})")

    sp = add("density-local", cmd_density_local, "exact rho_n(p), or the rational function when --p is omitted")
    sp.add_argument("--n", type=_positive(int), required=True)
    sp.add_argument("--p", type=_prime)

    sp = add("density-real", cmd_density_real, "Monte Carlo probability that a real form is indefinite")
    sp.add_argument("--n", type=_positive(int), required=True)
    sp.add_argument("--dist", choices=["uniform", "goe"], default="uniform")
    sp.add_argument("--samples", type=_samples, default=10**6)
    sp.add_argument("--seed", **seed_kw)

    sp = add("euler", cmd_euler, "truncated Euler product of rho_n(p) with a proven tail bound")
    sp.add_argument("--n", type=_positive(int), required=True)
    sp.add_argument("--tol", type=_positive(float), default=1e-6)

    sp = add("density-global", cmd_density_global, "rho_n = rho_n(inf) * prod_p rho_n(p)")
    sp.add_argument("--n", type=_positive(int), required=True)
    sp.add_argument("--dist", choices=["uniform", "goe"], default="uniform")
    sp.add_argument("--samples", type=_samples, default=10**6)
    sp.add_argument("--tol", type=_positive(float), default=1e-6)
    sp.add_argument("--seed", **seed_kw)

    sp = add("isotropy-local", cmd_isotropy_local, "decide isotropy over Q_p of a form file")
    sp.add_argument("input")
    sp.add_argument("--p", type=_prime, required=True)
    sp.add_argument("--method", choices=["recursive", "hasse", "both"], default="recursive")
    sp.add_argument("--depth", type=_positive(int), default=64, help="p-adic digit limit for lazy input")

    sp = add("isotropy-global", cmd_isotropy_global, "decide isotropy over Q of a form file")
    sp.add_argument("input")

    sp = add("experiment-local", cmd_experiment_local, "sample Haar-random forms over Z_p")
    sp.add_argument("--n", type=_positive(int), required=True)
    sp.add_argument("--p", type=_prime, required=True)
    sp.add_argument("--samples", type=_samples, default=10**5)
    sp.add_argument("--depth", type=_positive(int), default=64)
    sp.add_argument("--condition", choices=["none", "caseI", "caseII"], default="none")
    sp.add_argument("--seed", **seed_kw)

    sp = add("experiment-global", cmd_experiment_global, "isotropic fraction of integral forms of bounded height")
    sp.add_argument("--n", type=_positive(int), required=True)
    sp.add_argument("--height", type=_positive(int), required=True)
    sp.add_argument("--samples", type=_samples, default=10**4)
    sp.add_argument("--seed", **seed_kw)

    sp = add("count-ff", cmd_count_ff, "enumerate forms over F_p and compare with the closed-form counts")
    sp.add_argument("--p", type=_prime, required=True)
    sp.add_argument("--n", type=_positive(int), required=True)

    sp = add("tables", cmd_tables, "reproduce the density tables")
    sp.add_argument("--which", choices=["theorem1", "betagamma", "alpha", "table1"], default="theorem1")
    sp.add_argument("--format", choices=["json", "csv", "markdown"], default="csv")
    sp.add_argument("--max-n", type=_positive(int), default=6)
    sp.add_argument("--samples", type=_samples, default=10**5, help="Monte Carlo samples for table1")
    sp.add_argument("--seed", **seed_kw)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    from qfiso.forms import FormFileError

    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_ERROR
    except FormFileError as exc:
        print(f"error: malformed form file: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
