from __future__ import annotations

from collections import defaultdict
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opal.orders import op_deg_lex
from opal.poly import (
    Poly,
    add,
    apply_op,
    as_coeff,
    is_direct_sum,
    leading,
    monicize,
    mul,
    parse_poly,
    plug_poly,
    remainder,
    scale,
    substitute_poly,
)
from opal.terms import ONE, concat, parse, parse_context

from .conftest import coeffs, polys

P = parse_poly
W = parse
ORD = op_deg_lex(["z", "z1", "z2", "z3"])


def _naive_mul(f: Poly, g: Poly) -> Poly:
    acc = defaultdict(Fraction)
    for u, a in f.items():
        for v, b in g.items():
            acc[concat(u, v)] += Fraction(a) * b
    return Poly(acc)


class TestScalars:
    def test_normalization(self):
        assert as_coeff(Fraction(4, 2)) == 2 and isinstance(as_coeff(Fraction(4, 2)), int)
        c = as_coeff(Fraction(-6, 4))
        assert (c.numerator, c.denominator) == (-3, 2)

    def test_no_zero_coefficients(self):
        f = Poly([(W("z1"), 1), (W("z1"), -1), (W("z2"), 0)])
        assert f.is_zero() and len(f.support()) == 0


class TestArithmetic:
    def test_add_examples(self):
        assert add(P("z1"), P("-z1")).is_zero()
        assert scale(0, P("z1 + [z2]")).is_zero()
        assert add(P("2*z1"), P("3*z1 + z2")) == P("5*z1 + z2")

    def test_mul_examples(self):
        assert mul(P("z1 + z2"), P("z3")) == P("z1 z3 + z2 z3")
        f = P("z1 - 1/2*[z2]")
        assert mul(f, Poly.const(1)) == f
        g = P("z1 + [z1]")
        assert mul(g, g) == P("z1 z1 + z1[z1] + [z1]z1 + [z1][z1]")

    def test_apply_op_examples(self):
        assert apply_op(P("z1 + 2*z2")) == P("[z1] + 2*[z2]")
        assert apply_op(Poly.zero()).is_zero()
        assert apply_op(P("[z]")) == P("[[z]]")

    def test_remainder_examples(self):
        assert remainder(P("2*z1 + z2"), W("z1")) == (2, P("-z2"))
        assert remainder(Poly.monomial(W("z1[z2]")), W("z1[z2]")) == (1, Poly.zero())
        assert remainder(P("z1 - z2"), W("z2")) == (-1, P("-z1"))
        with pytest.raises(KeyError):
            remainder(P("z1"), W("z2"))

    def test_plug_poly_examples(self):
        assert plug_poly(parse_context("[*]"), P("z1 + z2")) == P("[z1] + [z2]")
        s = P("z1 - [z2]")
        assert plug_poly(parse_context("*"), s) == s
        assert plug_poly(parse_context("* z3"), P("z1 - z2")) == P("z1 z3 - z2 z3")

    def test_direct_sum_examples(self):
        assert is_direct_sum(P("z1"), P("z2"))
        assert not is_direct_sum(P("z1"), P("z1 + z2"))
        assert is_direct_sum(Poly.zero(), P("z1"))

    def test_leading_examples(self):
        assert leading(P("[z] + z"), ORD) == (W("[z]"), 1)
        assert leading(Poly.zero(), ORD) == (ONE, 0)
        assert leading(P("3*z1 z2 + z1"), ORD) == (W("z1 z2"), 3)

    def test_monicize_examples(self):
        assert monicize(P("2*[z] + 4*z"), ORD) == P("[z] + 2*z")
        f = P("[z] - z")
        assert monicize(f, ORD) == f
        assert monicize(P("-z"), ORD) == P("z")

    def test_substitution(self):
        f = substitute_poly(P("[x1]x2"), {"x1": P("z1 + z2"), "x2": W("z3")})
        assert f == P("[z1]z3 + [z2]z3")
        # substituting the identity collapses the letter
        assert substitute_poly(P("[x1 x2]"), {"x1": Poly.const(1)}) == P("[x2]")


class TestText:
    def test_print_parse(self):
        f = P("2*z1 + 3/2*[z2] - z1 z2")
        assert P(str(f)) == f
        assert str(Poly.zero()) == "0"

    def test_params(self):
        assert P("lambda*x1 x2", params={"lambda": 2}) == P("2*x1 x2")


@settings(max_examples=150, deadline=None)
@given(polys(), polys(), polys())
def test_ring_axioms(f, g, h):
    assert f + g == g + f
    assert (f + g) + h == f + (g + h)
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert (f + g) * h == f * h + g * h
    assert f + (-f) == Poly.zero()
    assert f * Poly.const(1) == f == Poly.const(1) * f


@settings(max_examples=150, deadline=None)
@given(polys(), polys())
def test_mul_matches_naive(f, g):
    assert mul(f, g) == _naive_mul(f, g)


@settings(max_examples=150, deadline=None)
@given(polys(), coeffs, coeffs)
def test_scalar_laws(f, a, b):
    assert scale(a, scale(b, f)) == scale(Fraction(a) * b, f)
    assert apply_op(add(f, scale(a, f))) == add(apply_op(f), scale(a, apply_op(f)))


@settings(max_examples=150, deadline=None)
@given(polys())
def test_remainder_decomposition(f):
    for w in f:
        c, rest = remainder(f, w)
        assert f == add(Poly.monomial(w, c), rest, -1)
        assert w not in rest


@settings(max_examples=100, deadline=None)
@given(polys())
def test_text_round_trip(f):
    assert P(str(f)) == f
