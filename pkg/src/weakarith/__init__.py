"""Workbench for weak arithmetic theories and their interpretations."""

from .syntax import (
    ARITH,
    ARITH_REL,
    JAN_SIG,
    SCAT_SIG,
    SUCC_SIG,
    Formula,
    Signature,
    num,
    parse,
    pretty,
)
from .purity import certify, is_pure_1sigma1, is_pure_delta0, is_pure_sigma1, purify
from .models import (
    FiniteStructure,
    cutoff_model,
    evaluate,
    jan_model,
    nat_eval,
    relational_view,
    scat_model,
)

__all__ = [
    "ARITH",
    "ARITH_REL",
    "JAN_SIG",
    "SCAT_SIG",
    "SUCC_SIG",
    "FiniteStructure",
    "Formula",
    "Signature",
    "certify",
    "cutoff_model",
    "evaluate",
    "is_pure_1sigma1",
    "is_pure_delta0",
    "is_pure_sigma1",
    "jan_model",
    "nat_eval",
    "num",
    "parse",
    "pretty",
    "purify",
    "relational_view",
    "scat_model",
]
