"""Re-derive the named results from golden expectations.

Each target returns a :class:`Reproduction` with printable lines, a JSON
payload and a list of mismatches; an empty mismatch list means the result
was reproduced exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from itertools import product

from .gsbasis import check_thm41, ideal_truncation_rank, irr_monomials
from .opi import catalog
from .orders import parse_order
from .poly import Poly, add, mul, parse_poly, substitute_poly
from .rewrite import RewriteSystem
from .terms import Bracket, Word, enumerate_words, parse, to_text

__all__ = ["TARGETS", "Reproduction", "load_golden", "reproduce"]

TARGETS = ("prop-2.20", "thm-4.10", "ex-4.2", "ex-4.3", "cor-4.11")


@dataclass
class Reproduction:
    target: str
    lines: list = field(default_factory=list)
    data: dict = field(default_factory=dict)
    mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def expect(self, what: str, got, want):
        if got != want:
            self.mismatches.append(f"{what}: expected {want}, got {got}")

    def to_json(self):
        return {"target": self.target, "ok": self.ok, "mismatches": self.mismatches, **self.data}


def load_golden(target: str) -> dict:
    text = resources.files("opal").joinpath("golden", f"{target}.json").read_text(encoding="utf-8")
    return json.loads(text)


def _system_for(entry, letters, order_spec=None):
    fam = order_spec or entry.order_family
    order = parse_order(f"{fam}:{'<'.join(letters)}" if fam and ":" not in fam else fam)
    return RewriteSystem(entry.rules, letters, order)


# ---------------------------------------------------------------------------


def _prop_2_20(rep: Reproduction, **_):
    g = load_golden("prop-2.20")
    letters = g["letters"]
    w = parse(g["word"], letters)
    rows = []
    for case, (want_l, want_r) in g["cases"].items():
        sys = _system_for(catalog("averaging", orientation=case), letters)
        verdict = sys.check_confluence(g["max_size"])
        hits = verdict.find(w)
        pairs = [(str(h.verdict.left_nf), str(h.verdict.right_nf)) for h in hits]
        rows.append({"case": case, "status": verdict.status, "word": g["word"], "normal_forms": pairs})
        rep.expect(f"{case} status", verdict.status, "counterexample")
        if (want_l, want_r) not in pairs and (want_r, want_l) not in pairs:
            rep.mismatches.append(f"{case}: no fork at {g['word']} with normal forms {want_l} / {want_r}; got {pairs}")
        shown = pairs[0] if pairs else ("-", "-")
        rep.lines.append(f"{case:<6} {g['word']:<12} {shown[0]:<14} {shown[1]}")
    rep.lines.insert(0, f"{'case':<6} {'fork word':<12} {'left NF':<14} right NF")
    rep.data["rows"] = rows


def _replay(sys: RewriteSystem, chain: dict, letters, params, label, rep) -> Poly:
    f = parse_poly(chain["start"], letters, params)
    rep.lines.append(f"{label}: {f}")
    for n, step in enumerate(chain["steps"], 1):
        m = parse(step["rewrite"], letters)
        redexes = sys.find_redexes(m)
        if not redexes:
            rep.mismatches.append(f"{label} step {n}: {step['rewrite']} is not reducible")
            return f
        f = sys.one_step(f, m, redexes[0])
        rep.lines.append(f"  -> {f}    (rewrote {step['rewrite']})")
        rep.expect(f"{label} step {n}", f, parse_poly(step["after"], letters, params))
    return f


def _thm_4_10(rep: Reproduction, lam=None, **_):
    g = load_golden("thm-4.10")
    letters = g["letters"]
    lam = Fraction(str(lam if lam is not None else g["lambda"]))
    params = {"lambda": lam}
    entry = catalog("modified-rb", **{"lambda": lam})
    sys = _system_for(entry, letters)
    u1, u2, v2 = (Word._raw((a,)) for a in letters)
    # the two sides of the overlap [u1][u2][v2]
    left0 = mul(sys.rhs(0, (u1, u2)), Poly.monomial(parse("[v2]", letters)))
    right0 = mul(Poly.monomial(parse("[u1]", letters)), sys.rhs(0, (u2, v2)))
    rep.expect("left start", left0, parse_poly(g["left"]["start"], letters, params))
    rep.expect("right start", right0, parse_poly(g["right"]["start"], letters, params))
    left = _replay(sys, g["left"], letters, params, "left", rep)
    right = _replay(sys, g["right"], letters, params, "right", rep)
    rep.expect("final polynomials", left, right)
    rep.expect("left final is normal", sys.is_normal(left), True)
    want = g["final_terms"] if lam != 0 else g["final_terms_without_weight"]
    rep.expect("monomials per side", (len(left), len(right)), (want, want))
    rep.lines.append(f"final polynomials equal: {left == right}; {len(left)} monomials each")
    rep.data.update({"lambda": str(lam), "left": str(left), "right": str(right), "terms": len(left)})


def _split_rhs_bracket(rhs: Poly) -> Poly:
    """``[B]`` -> ``B`` for a right-hand side that is one bracket of a sum."""
    out = {}
    for w, c in rhs.items():
        if len(w.factors) != 1 or not isinstance(w.factors[0], Bracket):
            raise ValueError(f"{rhs} is not of the form [B]")
        out[w.factors[0].inner] = c
    return Poly(out)


def type_identity_instances(entry_name: str, params: dict, letters, max_size: int):
    """Yield ``(u, v, w, value)`` for the defining identity of the type:
    N(uv,w) - N(u,vw) for differential type, B(B(u,v),w) - B(u,B(v,w)) for
    Rota-Baxter type."""
    entry = catalog(entry_name, **params)
    phi = entry.rules[0]
    words = enumerate_words(tuple(letters), max_size)
    if entry.order_family == "difflex":
        N = phi.rhs
        words = [w for w in words if not w.is_one()]
        for u, v, w in product(words, repeat=3):
            val = add(substitute_poly(N, {"x1": u * v, "x2": w}),
                      substitute_poly(N, {"x1": u, "x2": v * w}), -1)
            yield u, v, w, val
    else:
        B = _split_rhs_bracket(phi.rhs)
        for u, v, w in product(words, repeat=3):
            inner_l = substitute_poly(B, {"x1": u, "x2": v})
            inner_r = substitute_poly(B, {"x1": v, "x2": w})
            val = add(substitute_poly(B, {"x1": inner_l, "x2": w}),
                      substitute_poly(B, {"x1": u, "x2": inner_r}), -1)
            yield u, v, w, val


def _examples(rep: Reproduction, target: str, max_inst=None, **_):
    g = load_golden(target)
    rows = []
    for spec in g["systems"]:
        name = spec["opi"]
        params = {k: Fraction(v) for k, v in spec.items() if k != "opi"}
        label = name + "".join(f"({v})" for v in params.values())
        entry = catalog(name, **params)
        tl = g["thm41_letters"]
        order = parse_order(f"{entry.order_family}:{'<'.join(tl)}")
        r = check_thm41(entry.rules[0], order, tl, max_inst or g["max_inst"])
        sys = _system_for(entry, g["letters"])
        bad = 0
        total = 0
        for u, v, w, val in type_identity_instances(name, params, g["letters"], g["eq_size"]):
            total += 1
            if not sys.nf(val).is_zero():
                bad += 1
                if bad <= 3:
                    rep.mismatches.append(f"{label}: identity at u={u}, v={v}, w={w} leaves {sys.nf(val)}")
        for k in ("multilinear", "phi_normal", "cond1", "cond2"):
            rep.expect(f"{label} {k}", getattr(r, k), True)
        rows.append({"opi": label, **{k: getattr(r, k) for k in ("multilinear", "phi_normal", "cond1", "cond2")},
                     "cond1_checked": r.cond1_checked, "cond2_checked": r.cond2_checked,
                     "identity_instances": total, "identity_failures": bad})
        rep.lines.append(f"{label:<22} multilinear={r.multilinear} phi-normal={r.phi_normal} "
                         f"cond1={r.cond1} ({r.cond1_checked}) cond2={r.cond2} ({r.cond2_checked}) "
                         f"identity {total - bad}/{total} to 0")
    rep.data["rows"] = rows


def _cor_4_11(rep: Reproduction, max_size=None, **_):
    g = load_golden("cor-4.11")
    letters = g["letters"]
    entry = catalog(g["opi"], **{"lambda": Fraction(g["lambda"])})
    order = parse_order(f"{entry.order_family}:{'<'.join(letters)}")
    ns = g["n"] if max_size is None else list(range(max_size + 1))
    rows = []
    rep.lines.append(f"{'n':>2} {'words':>6} {'irr':>5} {'closure':>7} {'rank':>6} verdict")
    for n in ns:
        irr = irr_monomials(entry.rules, letters, n)
        t = ideal_truncation_rank(entry.rules, order, letters, n)
        rep.expect(f"n={n} verdict", t.verdict, "pass")
        if n < len(g["irr"]):
            rep.expect(f"n={n} irr count", len(irr), g["irr"][n])
            rep.expect(f"n={n} word count", t.seed_words, g["total_words"][n])
        rep.expect(f"n={n} irr free of bracket products", all("][" not in to_text(w) for w in irr), True)
        rows.append({"n": n, "irr": len(irr), **t.to_json()})
        rep.lines.append(f"{n:>2} {t.seed_words:>6} {len(irr):>5} {t.total:>7} {t.rank:>6} {t.verdict}")
    rep.data["rows"] = rows


def reproduce(target: str, **opts) -> Reproduction:
    """Run one target.  Options: ``lam`` (thm-4.10), ``max_inst`` (ex-4.x),
    ``max_size`` (cor-4.11)."""
    rep = Reproduction(target)
    if target == "prop-2.20":
        _prop_2_20(rep, **opts)
    elif target == "thm-4.10":
        _thm_4_10(rep, **opts)
    elif target in ("ex-4.2", "ex-4.3"):
        _examples(rep, target, **opts)
    elif target == "cor-4.11":
        _cor_4_11(rep, **opts)
    else:
        raise ValueError(f"unknown target {target!r}; expected one of {', '.join(TARGETS)}")
    return rep
