"""Exact rank of sparse matrices.

Rows are dicts ``{column: coefficient}``.  Two independent exact methods are
provided (rational echelon and fraction-free integer elimination) plus a
modular rank that uses the compiled kernel when it is built.
"""

from __future__ import annotations

from array import array
from fractions import Fraction
from math import gcd, lcm

from . import kernels

__all__ = ["rank_rational", "rank_fraction_free", "rank_mod_p", "pack_rows", "DEFAULT_PRIME"]

DEFAULT_PRIME = 2_147_483_647


def rank_rational(rows) -> int:
    """Sparse row echelon over the rationals, pivoting on the least column."""
    pivots: dict = {}
    rank = 0
    for r in rows:
        row = {c: Fraction(v) for c, v in r.items() if v}
        while row:
            j = min(row)
            piv = pivots.get(j)
            if piv is None:
                lead = row[j]
                pivots[j] = {c: v / lead for c, v in row.items()}
                rank += 1
                break
            f = row[j]
            for c, v in piv.items():
                x = row.get(c, 0) - f * v
                if x:
                    row[c] = x
                else:
                    row.pop(c, None)
    return rank


def _integral(r: dict) -> dict:
    den = 1
    for v in r.values():
        if isinstance(v, Fraction):
            den = lcm(den, v.denominator)
    return {c: int(v * den) for c, v in r.items() if v}


def _primitive(r: dict) -> dict:
    g = 0
    for v in r.values():
        g = gcd(g, v)
        if g == 1:
            return r
    if g > 1:
        return {c: v // g for c, v in r.items()}
    return r


def rank_fraction_free(rows) -> int:
    """Integer elimination without division: ``r <- a*r - b*pivot``, then
    divide out the row content."""
    pivots: dict = {}
    rank = 0
    for r in rows:
        row = _integral(r)
        while row:
            j = min(row)
            piv = pivots.get(j)
            if piv is None:
                pivots[j] = _primitive(row)
                rank += 1
                break
            a, b = piv[j], row[j]
            g = gcd(a, b)
            a, b = a // g, b // g
            new = {}
            for c, v in row.items():
                new[c] = a * v
            for c, v in piv.items():
                x = new.get(c, 0) - b * v
                if x:
                    new[c] = x
                else:
                    new.pop(c, None)
            row = _primitive(new)
    return rank


def pack_rows(rows, p: int = DEFAULT_PRIME) -> tuple[list, int]:
    """Sparse dict rows as sorted ``(cols, vals)`` arrays reduced mod ``p``,
    plus the column count; the input format of the rank kernels."""
    packed = []
    top = -1
    for r in rows:
        cols = array("q")
        vals = array("q")
        for c, v in sorted(r.items()):
            if isinstance(v, Fraction):
                v = v.numerator * pow(v.denominator, p - 2, p)
            cols.append(c)
            vals.append(v % p)
            top = max(top, c)
        packed.append((cols, vals))
    return packed, top + 1


def rank_mod_p(rows, ncols: int | None = None, p: int = DEFAULT_PRIME) -> int:
    """Rank over GF(p) with the selected kernel.  Rational entries must have
    denominators prime to p."""
    packed, width = pack_rows(rows, p)
    return kernels.rank_mod_p(packed, width if ncols is None else ncols, p)
