from __future__ import annotations

import json

import pytest
from hypothesis import given, settings

from opal.opi import (
    catalog,
    catalog_names,
    instantiate,
    is_multilinear,
    is_phi_normal,
    leading_instance,
    load_opi_file,
    make_opi,
    match_leading,
    rhs_instance,
    substitutions,
    validate_orientation,
)
from opal.orders import diff_lex, op_deg_lex
from opal.poly import Poly, add, parse_poly, substitute_poly
from opal.terms import ONE, STAR, parse, parse_context, plug

from .conftest import words

W = parse
P = parse_poly
ODL = op_deg_lex(["z1", "z2"])


def rb(lam=0):
    return catalog("rota-baxter", **{"lambda": lam}).rules[0]


class TestInstances:
    def test_rota_baxter_instance(self):
        got = instantiate(rb(1), (W("z1"), W("z2")))
        assert got == P("[z1][z2] - [z1[z2]] - [[z1]z2] - [z1 z2]")

    def test_differential_instance(self):
        d = catalog("differential", **{"lambda": 0}).rules[0]
        assert instantiate(d, (W("z1"), W("z2"))) == P("[z1 z2] - [z1]z2 - z1[z2]")

    def test_identity_substitution_cancels(self):
        d = make_opi("d", "[x1 x2] - [x1]x2 - x1[x2]", "[x1 x2]", arity=2)
        assert instantiate(d, (ONE, W("u"))) == P("-[1]u")

    def test_forbidden_identity_rejected(self):
        d = catalog("differential").rules[0]
        with pytest.raises(ValueError):
            instantiate(d, (ONE, W("z1")))

    def test_leading_instances(self):
        u = (W("z1"), W("z2"))
        assert leading_instance(catalog("modified-rb").rules[0], u) == W("[z1][z2]")
        assert leading_instance(catalog("differential").rules[0], u) == W("[z1 z2]")
        av = catalog("averaging", orientation="case1").rules
        assert leading_instance(av[0], u) == W("[z1][z2]")

    def test_instance_agrees_with_substitution(self):
        phi = catalog("modified-rb", **{"lambda": 1}).rules[0]
        sigma = (W("[z1]z2"), W("1"))
        want = substitute_poly(phi.pattern, {"x1": Poly.monomial(sigma[0]), "x2": Poly.const(1)})
        assert instantiate(phi, sigma) == want
        assert rhs_instance(phi, sigma) == add(Poly.monomial(leading_instance(phi, sigma)), want, -1)


class TestMatching:
    def test_examples(self):
        assert match_leading(rb(), W("[[z1][z2]]")) == [(parse_context("[*]"), (W("z1"), W("z2")))]
        phi2 = make_opi("p2", "[x1[x2]] - [[x1]x2]", "[x1[x2]]", arity=2, allow_identity=False)
        assert match_leading(phi2, W("[[z1][z2]]")) == [(STAR, (W("[z1]"), W("z2")))]
        assert match_leading(rb(), W("z1 z2")) == []

    def test_identity_slots(self):
        got = match_leading(rb(), W("[1][z1]"))
        assert got == [(STAR, (ONE, W("z1")))]
        d = catalog("differential").rules[0]
        # forbid-identity: [z1] alone has no split into two non-identity words
        assert match_leading(d, W("[z1]")) == []
        assert len(match_leading(d, W("[z1 z2 z1]"))) == 2

    def test_overlapping_matches(self):
        got = match_leading(rb(), W("[z1][z2][z1]"))
        assert [str(q) for q, _ in got] == ["*[z1]", "[z1]*"]


class TestPredicates:
    def test_multilinear(self):
        assert is_multilinear(rb(1))
        assert not is_multilinear(make_opi("sq", "[x1]x1 - x1", "[x1]x1", arity=1))
        assert is_multilinear(catalog("endomorphism").rules[0])

    def test_phi_normal(self):
        assert is_phi_normal(rb(1).rhs, rb(1))
        rey = catalog("reynolds").rules[0]
        assert not is_phi_normal(rey.rhs, rey)
        assert is_phi_normal(Poly.zero(), rey)


class TestValidation:
    def test_modified_rb_passes(self):
        rep = validate_orientation(catalog("modified-rb", **{"lambda": 1}).rules[0], ODL, ["z1", "z2"], 50)
        assert rep.ok and rep.checked == 51

    def test_reynolds_rejected_with_witness(self):
        rep = validate_orientation(catalog("reynolds").rules[0], op_deg_lex(["x1", "x2"]), ["z1", "z2"])
        assert not rep.ok
        assert rep.witness == W("[[x1][x2]]")

    def test_identity_domain_fails(self):
        d = make_opi("d", "[x1 x2] - [x1]x2 - x1[x2]", "[x1 x2]", arity=2)
        rep = validate_orientation(d, diff_lex(["z1", "z2"]), ["z1", "z2"])
        assert not rep.ok and rep.sigma[0] == ONE
        # the forbid-identity version is fine
        assert validate_orientation(catalog("differential").rules[0], diff_lex(["z1", "z2"]), ["z1", "z2"]).ok

    @pytest.mark.parametrize("name,params", [
        ("rota-baxter", {"lambda": 1}), ("nijenhuis", {}), ("td", {}), ("average", {}),
        ("inverse-average", {}), ("modified-rb", {"lambda": -1}), ("differential", {"lambda": 1}),
        ("endomorphism", {}),
    ])
    def test_catalog_orientations_valid(self, name, params):
        e = catalog(name, **params)
        order = (op_deg_lex if e.order_family == "opdeglex" else diff_lex)(["z1", "z2"])
        for r in e.rules:
            assert validate_orientation(r, order, ["z1", "z2"]).ok


class TestCatalog:
    def test_names(self):
        for n in catalog_names():
            if n in ("differential-type", "rota-baxter-type"):
                continue
            assert catalog(n).rules
        with pytest.raises(ValueError):
            catalog("nope")

    def test_generic_types(self):
        e = catalog("rota-baxter-type", B="x1[x2]")
        assert e.rules[0].rhs == P("[x1[x2]]")
        e = catalog("differential-type", N="[x1][x2]")
        assert e.rules[0].rhs == P("[x1][x2]")

    def test_mu_parameter(self):
        phi = catalog("modified-rb", mu=2).rules[0]
        assert phi.params["lambda"] == -4

    def test_monic_storage(self):
        phi = make_opi("h", "2*[x1][x2] - [x1 x2]", "[x1][x2]", arity=2)
        assert phi.pattern.coeff(W("[x1][x2]")) == 1
        assert phi.rhs == P("1/2*[x1 x2]")

    def test_orientation_must_be_in_support(self):
        with pytest.raises(ValueError):
            make_opi("bad", "[x1]", "x1", arity=1)

    def test_load_file(self, tmp_path):
        path = tmp_path / "rb.json"
        path.write_text(json.dumps({"name": "rb", "arity": 2, "pattern": "[x1][x2] - [x1[x2]] - [[x1]x2]",
                                    "orientation": "[x1][x2]", "order": "opdeglex"}))
        rules, order = load_opi_file(str(path))
        assert order == "opdeglex" and rules[0].rhs == rb(0).rhs


def test_substitutions_by_total_size():
    phi = catalog("differential").rules[0]
    sig = list(substitutions(phi, ["z"], 3))
    assert all(not u.is_one() for s in sig for u in s)
    sizes = [sum(u.size for u in s) for s in sig]
    assert sizes == sorted(sizes) and max(sizes) == 3


@settings(max_examples=100, deadline=None)
@given(words(max_leaves=3), words(max_leaves=3))
def test_match_inverts_instantiation(u, v):
    phi = catalog("modified-rb", **{"lambda": 1}).rules[0]
    lead = leading_instance(phi, (u, v))
    hits = match_leading(phi, lead)
    assert (STAR, (u, v)) in hits
    for q, sigma in hits:
        assert plug(q, leading_instance(phi, sigma)) == lead
