"""Quadratic forms over Z_p: classification, isotropy deciders, sampling."""

from qfiso.padic.decide import (
    BASE_CASES,
    Context,
    DecisionState,
    classify_mod_p,
    decide_recursive,
    verify_witness,
)
from qfiso.padic.hasse import decide_hasse, diagonalize, hilbert_symbol, is_square_qp
from qfiso.padic.lazy import DigitSource, LazyCoefficient, PAdicForm, PrecisionError
from qfiso.padic.sampling import sample_local_density

__all__ = [
    "BASE_CASES",
    "Context",
    "DecisionState",
    "DigitSource",
    "LazyCoefficient",
    "PAdicForm",
    "PrecisionError",
    "classify_mod_p",
    "decide_hasse",
    "decide_recursive",
    "diagonalize",
    "hilbert_symbol",
    "is_square_qp",
    "sample_local_density",
    "verify_witness",
]
