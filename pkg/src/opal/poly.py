"""Exact-rational linear combinations of bracketed words."""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping

from .terms import (
    ONE,
    Bracket,
    Context,
    ParseError,
    Word,
    bracket,
    concat,
    plug,
    structural_key,
    to_text,
)

__all__ = [
    "Poly",
    "as_coeff",
    "add",
    "scale",
    "mul",
    "apply_op",
    "remainder",
    "plug_poly",
    "is_direct_sum",
    "leading",
    "monicize",
    "substitute_poly",
    "parse_poly",
    "format_coeff",
]


def as_coeff(c) -> int | Fraction:
    """Normalize a rational scalar; integral values are kept as ``int``."""
    if isinstance(c, bool):
        raise TypeError("bool is not a coefficient")
    if isinstance(c, int):
        return c
    if isinstance(c, str):
        c = Fraction(c.strip())
    elif isinstance(c, Rational):
        c = Fraction(c)
    else:
        raise TypeError(f"not a rational coefficient: {c!r}")
    return c.numerator if c.denominator == 1 else c


def _norm(c):
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


class Poly:
    """Immutable map from words to nonzero rationals."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Word, object] | Iterable | None = None):
        d = {}
        if terms is not None:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for w, c in items:
                if not isinstance(w, Word):
                    raise TypeError(f"not a Word: {w!r}")
                c = as_coeff(c)
                if c:
                    s = _norm(d.get(w, 0) + c)
                    if s:
                        d[w] = s
                    else:
                        d.pop(w, None)
        self._terms = d
        self._hash = None

    @classmethod
    def _from_dict(cls, d: dict) -> "Poly":
        # trusted: no zero coefficients, normalized scalars
        p = cls.__new__(cls)
        p._terms = d
        p._hash = None
        return p

    @classmethod
    def zero(cls) -> "Poly":
        return cls._from_dict({})

    @classmethod
    def const(cls, c) -> "Poly":
        c = as_coeff(c)
        return cls._from_dict({ONE: c} if c else {})

    @classmethod
    def monomial(cls, w: Word, c=1) -> "Poly":
        c = as_coeff(c)
        return cls._from_dict({w: c} if c else {})

    # -- container protocol

    def items(self):
        return self._terms.items()

    def support(self) -> frozenset:
        return frozenset(self._terms)

    def coeff(self, w: Word):
        return self._terms.get(w, 0)

    def __contains__(self, w):
        return w in self._terms

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and ONE in self._terms)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == Poly.const(other)
        return NotImplemented

    def __hash__(self):
        h = self._hash
        if h is None:
            h = self._hash = hash(frozenset(self._terms.items()))
        return h

    # -- arithmetic

    def __add__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return Poly._from_dict({w: -c for w, c in self._terms.items()})

    def __sub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return add(self, other, -1)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return add(other, self, -1)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return scale(other, self)
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return scale(other, self)
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return mul(other, self)

    def sorted_terms(self) -> list:
        """Terms in the canonical print order (structurally descending)."""
        return sorted(self._terms.items(), key=lambda t: structural_key(t[0]), reverse=True)

    def __repr__(self):
        return f"Poly({to_text_poly(self)!r})"

    def __str__(self):
        return to_text_poly(self)


def _coerce(x):
    if isinstance(x, Poly):
        return x
    if isinstance(x, Word):
        return Poly.monomial(x)
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return Poly.const(x)
    return None


def add(f: Poly, g: Poly, c=1) -> Poly:
    """``f + c*g``."""
    d = dict(f._terms)
    for w, b in g._terms.items():
        s = _norm(d.get(w, 0) + c * b)
        if s:
            d[w] = s
        else:
            d.pop(w, None)
    return Poly._from_dict(d)


def scale(c, f: Poly) -> Poly:
    c = as_coeff(c)
    if not c:
        return Poly.zero()
    if c == 1:
        return f
    return Poly._from_dict({w: _norm(c * a) for w, a in f._terms.items()})


def mul(f: Poly, g: Poly) -> Poly:
    d: dict = {}
    for u, a in f._terms.items():
        for v, b in g._terms.items():
            w = concat(u, v)
            s = _norm(d.get(w, 0) + a * b)
            if s:
                d[w] = s
            else:
                d.pop(w, None)
    return Poly._from_dict(d)


def apply_op(f: Poly) -> Poly:
    return Poly._from_dict({bracket(w): c for w, c in f._terms.items()})


def remainder(f: Poly, w: Word):
    """Return ``(c, R_w(f))`` with ``R_w(f) = c*w - f``."""
    c = f._terms.get(w)
    if c is None:
        raise KeyError(f"{to_text(w)} is not in the support")
    rest = {u: -a for u, a in f._terms.items() if u != w}
    return c, Poly._from_dict(rest)


def plug_poly(q: Context, s: Poly) -> Poly:
    if q.is_trivial():
        return s
    # plug is injective, so no two terms collide
    return Poly._from_dict({plug(q, w): c for w, c in s._terms.items()})


def is_direct_sum(f: Poly, g: Poly) -> bool:
    a, b = f._terms, g._terms
    if len(a) > len(b):
        a, b = b, a
    return not any(w in b for w in a)


def leading(f: Poly, ord) -> tuple[Word, object]:
    """Leading word and coefficient; constants (including 0) lead with 1."""
    if f.is_constant():
        return ONE, f.coeff(ONE)
    key = ord.key
    w = max(f._terms, key=key)
    return w, f._terms[w]


def monicize(f: Poly, ord) -> Poly:
    if f.is_zero():
        raise ValueError("cannot monicize the zero polynomial")
    _, c = leading(f, ord)
    return scale(Fraction(1) / c, f)


# ---------------------------------------------------------------------------
# substitution of letters by polynomials


def _subst_word(w: Word, mapping: Mapping[str, Poly], cache: dict) -> Poly:
    hit = cache.get(w)
    if hit is not None:
        return hit
    out = Poly.const(1)
    run: list = []
    for f in w.factors:
        if isinstance(f, Bracket):
            piece = apply_op(_subst_word(f.inner, mapping, cache))
        elif isinstance(f, str) and f in mapping:
            piece = mapping[f]
        else:
            run.append(f)
            continue
        if run:
            out = mul(out, Poly.monomial(Word._raw(tuple(run))))
            run = []
        out = mul(out, piece)
    if run:
        out = mul(out, Poly.monomial(Word._raw(tuple(run))))
    cache[w] = out
    return out


def substitute_poly(f: Poly, mapping: Mapping[str, Poly | Word]) -> Poly:
    """Replace letters by polynomials everywhere, extending linearly and
    through the operator."""
    m = {k: (v if isinstance(v, Poly) else Poly.monomial(v)) for k, v in mapping.items()}
    cache: dict = {}
    out = Poly.zero()
    for w, c in f.items():
        out = add(out, _subst_word(w, m, cache), c)
    return out


# ---------------------------------------------------------------------------
# text


def format_coeff(c) -> str:
    c = as_coeff(c)
    return str(c)


def to_text_poly(f: Poly) -> str:
    if f.is_zero():
        return "0"
    parts = []
    for i, (w, c) in enumerate(f.sorted_terms()):
        neg = c < 0
        a = -c if neg else c
        if w.is_one():
            body = str(a)
        elif a == 1:
            body = to_text(w)
        else:
            body = f"{a}*{to_text(w)}"
        if i == 0:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


_PTOK = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<id>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[-+*\[\]()]))"
)


def _poly_tokens(text: str):
    pos = 0
    out = []
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _PTOK.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        out.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    out.append(("end", "", n))
    return out


class _PolyParser:
    def __init__(self, text, alphabet, params):
        self.toks = _poly_tokens(text)
        self.i = 0
        self.alphabet = alphabet
        self.params = params

    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, value):
        t = self.take()
        if t[1] != value:
            raise ParseError(f"expected {value!r}", t[2])

    def parse(self) -> Poly:
        p = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise ParseError(f"unexpected {t[1]!r}", t[2])
        return p

    def expr(self) -> Poly:
        sign = 1
        t = self.peek()
        if t[1] in "+-" and t[0] == "op":
            self.take()
            sign = -1 if t[1] == "-" else 1
        total = scale(sign, self.term())
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in "+-":
                self.take()
                part = self.term()
                total = add(total, part, -1 if t[1] == "-" else 1)
            else:
                return total

    def _coefficient(self):
        t = self.peek()
        if t[0] == "num":
            self.take()
            return as_coeff(Fraction(t[1]))
        if t[0] == "id" and t[1] in self.params and self.peek(1)[1] == "*":
            self.take()
            return as_coeff(self.params[t[1]])
        return None

    def term(self) -> Poly:
        c = 1
        start = self.peek()
        while True:
            k = self._coefficient()
            if k is None:
                break
            c = c * k
            if self.peek()[1] == "*":
                self.take()
        factors = []
        while True:
            t = self.peek()
            if t[0] == "id":
                if self.alphabet is not None and t[1] not in self.alphabet:
                    raise ParseError(f"unknown letter {t[1]!r}", t[2])
                self.take()
                factors.append(Poly.monomial(Word._raw((t[1],))))
            elif t[0] == "op" and t[1] == "[":
                self.take()
                inner = self.expr()
                self.expect("]")
                factors.append(apply_op(inner))
            elif t[0] == "op" and t[1] == "(":
                self.take()
                inner = self.expr()
                self.expect(")")
                factors.append(inner)
            else:
                break
        if not factors and start is self.peek():
            raise ParseError("expected a term", start[2])
        out = Poly.const(c)
        for f in factors:
            out = mul(out, f)
        return out


def parse_poly(text: str, alphabet: Iterable[str] | None = None, params: Mapping | None = None) -> Poly:
    """Parse ``c1*m1 + c2*m2 - ...``; brackets and parentheses may hold sums."""
    alpha = set(alphabet) if alphabet is not None else None
    return _PolyParser(text, alpha, dict(params or {})).parse()
