from __future__ import annotations

import pytest
from hypothesis import given, settings

from opal.orders import (
    EQ,
    GT,
    LT,
    DiffLex,
    MonomialOrder,
    OpDegLex,
    check_order_axioms,
    compare,
    diff_lex,
    op_deg_lex,
    parse_order,
)
from opal.terms import ONE, Bracket, Context, bracket, concat, parse, plug

from .conftest import words

W = parse
ODL = op_deg_lex(["z1", "z2"])


class PureLex(MonomialOrder):
    """Factor-wise lexicographic order, ignoring degree: not compatible."""

    family = "purelex"

    def _key(self, w):
        return tuple((1, self.key(f.inner)) if isinstance(f, Bracket) else (0, self._letter_key(f))
                     for f in w.factors)


class TestCompare:
    def test_examples(self):
        z = op_deg_lex(["z"])
        assert compare(z, ONE, W("z")) == LT
        assert compare(z, W("z"), W("[z]")) == LT
        assert compare(ODL, W("[z1][z2]"), W("[z1 z2]")) == GT
        assert compare(ODL, W("z1"), W("z2")) == LT
        assert compare(z, W("[1]"), W("z")) == GT
        assert compare(ODL, W("[z1]"), W("[z1]")) == EQ

    def test_rota_baxter_orientation_leads(self):
        x = op_deg_lex(["x1", "x2"])
        assert x.less(W("[x1[x2]]"), W("[x1][x2]"))
        assert x.less(W("[[x1]x2]"), W("[x1][x2]"))

    def test_lt_agrees_with_key(self):
        ws = [W(t) for t in ("1", "z1", "[z1]", "z1 z2", "[z1][z2]", "[z1[z2]]", "[[z1]z2]", "z2[1]")]
        for u in ws:
            for v in ws:
                assert ODL.lt(u, v) == (ODL.key(u) < ODL.key(v))

    def test_difflex_prefers_merged_bracket(self):
        d = diff_lex(["z1", "z2"])
        assert d.less(W("[z1]z2"), W("[z1 z2]"))
        assert d.less(W("[z1][z2]"), W("[z1 z2]"))

    def test_parse_order(self):
        assert parse_order("opdeglex:a<b") == OpDegLex(["a", "b"])
        assert parse_order("difflex", ["z"]) == DiffLex(["z"])
        assert parse_order("none") is None
        with pytest.raises(ValueError):
            parse_order("lex:a<b")
        with pytest.raises(ValueError):
            op_deg_lex(["a", "a"])


class TestAxioms:
    @pytest.mark.parametrize("alpha,size,budget", [(["z"], 4, 200), (["z1", "z2"], 3, 100)])
    def test_opdeglex_passes(self, alpha, size, budget):
        rep = check_order_axioms(op_deg_lex(alpha), alpha, size, budget)
        assert rep.ok, rep.to_json()
        assert rep.checked_pairs > 0 and rep.checked_contexts > 1

    def test_difflex_passes(self):
        rep = check_order_axioms(diff_lex(["z1", "z2"]), ["z1", "z2"], 3, 100)
        assert rep.ok, rep.to_json()

    def test_pure_lex_fails_with_witness(self):
        rep = check_order_axioms(PureLex(["z1", "z2"]), ["z1", "z2"], 3, 200)
        assert not rep.ok and rep.failure == "compatibility"
        w = rep.witness
        q, u, v = w["q"], w["u"], w["v"]
        lex = PureLex(["z1", "z2"])
        assert lex.less(u, v)
        ctx = Context(q)
        assert not lex.less(plug(ctx, u), plug(ctx, v))


@settings(max_examples=200, deadline=None)
@given(words(), words(), words())
def test_order_properties(u, v, w):
    for o in (ODL, diff_lex(["z1", "z2"])):
        assert o.compare(u, v) == -o.compare(v, u)
        assert (o.compare(u, v) == EQ) == (u == v)
        assert not o.less(u, ONE)
        assert o.less(u, bracket(u))
        if o.less(u, v) and o.less(v, w):
            assert o.less(u, w)
        if o.less(u, v):
            # compatibility with multiplication on both sides and the operator
            assert o.less(concat(w, u), concat(w, v))
            assert o.less(concat(u, w), concat(v, w))
            assert o.less(bracket(u), bracket(v))
