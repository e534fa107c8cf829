"""Frobenius cubics on hypergeometric K3 fibers from elliptic-curve point counts."""

from .errors import HGK3Error, InputError, VerificationFailure
from .frobenius_k3 import CharPoly3, predict_charpoly, predict_charpoly_C
from .qseries import TRIPLES, HGTriple, TruncatedSeries

__version__ = "0.1.0"

__all__ = [
    "CharPoly3",
    "HGK3Error",
    "HGTriple",
    "InputError",
    "TRIPLES",
    "TruncatedSeries",
    "VerificationFailure",
    "predict_charpoly",
    "predict_charpoly_C",
]
