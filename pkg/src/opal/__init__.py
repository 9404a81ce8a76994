"""Operated polynomial identities over free operated algebras.

Bracketed words, exact polynomials, monomial orders, oriented identities,
rewriting with confluence checks, and bounded Groebner-Shirshov verification.
"""

from .kernels import BACKEND
from .orders import DiffLex, OpDegLex, check_order_axioms, diff_lex, op_deg_lex, parse_order
from .opi import OPI, catalog, instantiate, leading_instance, make_opi, match_leading, validate_orientation
from .poly import Poly, parse_poly
from .rewrite import RewriteSystem
from .terms import Context, MultiContext, Word, bracket, concat, enumerate_words, parse, plug, to_text

__version__ = "0.1.0"
