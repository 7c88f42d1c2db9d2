"""Densities of isotropic quadratic forms over Z_p, R and Q."""

from qfiso.forms import CaseKind, IsotropyVerdict, QuadraticForm, VerdictKind, load_form, parse_form
from qfiso.localdensity import rho_local, rho_local_at, solve_alpha, solve_beta_gamma
from qfiso.symbolic import RationalFunction

__version__ = "0.1.0"

__all__ = [
    "CaseKind",
    "IsotropyVerdict",
    "QuadraticForm",
    "RationalFunction",
    "VerdictKind",
    "load_form",
    "parse_form",
    "rho_local",
    "rho_local_at",
    "solve_alpha",
    "solve_beta_gamma",
]
