"""Canonical bases of tensor products of integrable modules over quantum groups."""
from __future__ import annotations

__version__ = "0.1.0"

from .scalars import LaurentPoly, RatFunc, bar_split, quantum_binomial, quantum_integer  # noqa: E402,F401
from .rootdata import CartanDatum, RootDatum, load_datum  # noqa: E402,F401
