"""Compositions, bounded Groebner-Shirshov checks and truncated-ideal ranks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from . import linalg
from .opi import (
    OPI,
    instantiate,
    is_multilinear,
    is_phi_normal,
    leading_instance,
    match_leading,
    substitutions,
)
from .poly import Poly, add, mul, plug_poly
from .rewrite import FuelExhausted, RewriteSystem
from .terms import Context, Word, enumerate_words, placements_of, structural_key, to_text

__all__ = [
    "Composition",
    "GSVerdict",
    "TruncationReport",
    "Thm41Report",
    "PGSReport",
    "generator_instances",
    "intersection_compositions",
    "including_compositions",
    "is_trivial_mod",
    "check_gs",
    "check_thm41",
    "irr_monomials",
    "ideal_rows",
    "ideal_truncation_rank",
    "check_pgs",
]


@dataclass(frozen=True)
class Instance:
    rule: int
    sigma: tuple
    lead: Word
    poly: Poly


@dataclass(frozen=True)
class Composition:
    kind: str  # intersection | including
    w: Word
    f: Instance
    g: Instance
    witnesses: dict
    value: Poly

    def to_json(self, rules=None):
        def inst(i):
            return {
                "rule": rules[i.rule].name if rules else i.rule,
                "sigma": [to_text(u) for u in i.sigma],
                "poly": str(i.poly),
            }

        wit = {k: (to_text(v) if isinstance(v, Word) else str(v)) for k, v in self.witnesses.items()}
        return {"kind": self.kind, "w": to_text(self.w), "f": inst(self.f), "g": inst(self.g),
                "witnesses": wit, "value": str(self.value)}


def generator_instances(rules: Sequence[OPI], alphabet, max_inst_size: int) -> list[Instance]:
    """Every ``phi(sigma)`` with total substitution size at most the bound.

    Instances are monic in their orientation by construction of the OPI.
    """
    out = []
    for idx, phi in enumerate(rules):
        for sigma in substitutions(phi, alphabet, max_inst_size):
            out.append(Instance(idx, tuple(sigma), leading_instance(phi, sigma), instantiate(phi, sigma)))
    return out


def intersection_compositions(rules: Sequence[OPI], alphabet, max_inst_size: int,
                              max_word_size: int | None = None,
                              instances: list | None = None) -> Iterator[Composition]:
    """Overlaps ``w = f.lead * u = v * g.lead`` with a proper middle part."""
    insts = instances if instances is not None else generator_instances(rules, alphabet, max_inst_size)
    by_prefix: dict = {}
    for g in insts:
        fs = g.lead.factors
        for k in range(1, len(fs)):
            by_prefix.setdefault((k, fs[:k]), []).append(g)
    for f in insts:
        ff = f.lead.factors
        for k in range(1, len(ff)):
            for g in by_prefix.get((k, ff[-k:]), ()):
                w = Word._raw(ff + g.lead.factors[k:])
                if max_word_size is not None and w.size > max_word_size:
                    continue
                u = Word._raw(g.lead.factors[k:])
                v = Word._raw(ff[:-k])
                value = add(mul(f.poly, Poly.monomial(u)), mul(Poly.monomial(v), g.poly), -1)
                yield Composition("intersection", w, f, g,
                                  {"u": u, "v": v, "b": Word._raw(ff[-k:])}, value)


def including_compositions(rules: Sequence[OPI], alphabet, max_inst_size: int,
                           max_word_size: int | None = None,
                           instances: list | None = None) -> Iterator[Composition]:
    """``f.lead = q|_{g.lead}``, skipping the self pair at ``q = *``."""
    insts = instances if instances is not None else generator_instances(rules, alphabet, max_inst_size)
    for f in insts:
        if max_word_size is not None and f.lead.size > max_word_size:
            continue
        for j, psi in enumerate(rules):
            for q, sigma in match_leading(psi, f.lead):
                if q.is_trivial() and j == f.rule and tuple(sigma) == f.sigma:
                    continue
                g = Instance(j, tuple(sigma), leading_instance(psi, sigma), instantiate(psi, sigma))
                value = add(f.poly, plug_poly(q, g.poly), -1)
                yield Composition("including", f.lead, f, g, {"q": q}, value)


def is_trivial_mod(c: Composition, sys: RewriteSystem, fuel: int | None = None):
    """True if the composition value rewrites to zero; None when unknown."""
    if c.value.is_zero():
        return True
    try:
        ok, _ = sys.rewrites_to_zero(c.value, fuel)
    except FuelExhausted:
        return None
    return ok


@dataclass
class GSVerdict:
    status: str  # gs-up-to-bound | counterexample | unknown
    compositions: int = 0
    counterexamples: list = field(default_factory=list)
    unknown: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status == "gs-up-to-bound"

    def to_json(self, rules=None, limit=20):
        return {
            "status": self.status,
            "compositions": self.compositions,
            "counterexample_count": len(self.counterexamples),
            "counterexamples": [c.to_json(rules) for c in self.counterexamples[:limit]],
            "unknown_count": len(self.unknown),
        }


def _system(rules, ord, alphabet, fuel=None, node_budget=None):
    kw = {}
    if node_budget is not None:
        kw["node_budget"] = node_budget
    return RewriteSystem(rules, alphabet, ord, fuel=fuel, **kw)


def check_gs(rules: Sequence[OPI], ord, alphabet, max_inst_size: int, fuel: int | None = None,
             max_word_size: int | None = None, limit: int | None = None,
             node_budget: int | None = None) -> GSVerdict:
    """Every bounded composition must be trivial."""
    alphabet = tuple(alphabet)
    sys = _system(rules, ord, alphabet, fuel, node_budget)
    insts = generator_instances(rules, alphabet, max_inst_size)
    if max_word_size is not None:
        # every composition's ambient word contains the lead of f
        insts = [i for i in insts if i.lead.size <= max_word_size]
    out = GSVerdict("gs-up-to-bound")
    for gen in (intersection_compositions, including_compositions):
        for c in gen(rules, alphabet, max_inst_size, max_word_size, insts):
            out.compositions += 1
            t = is_trivial_mod(c, sys, fuel)
            if t is False:
                out.counterexamples.append(c)
                if limit is not None and len(out.counterexamples) >= limit:
                    out.status = "counterexample"
                    return out
            elif t is None:
                out.unknown.append(c)
    if out.counterexamples:
        out.status = "counterexample"
    elif out.unknown:
        out.status = "unknown"
    return out


# ---------------------------------------------------------------------------
# sufficient-condition checker for a single OPI


@dataclass
class Thm41Report:
    multilinear: bool
    phi_normal: bool
    cond1: bool
    cond2: bool
    cond1_checked: int = 0
    cond2_checked: int = 0
    cond1_failures: list = field(default_factory=list)
    cond2_failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.multilinear and self.phi_normal and self.cond1 and self.cond2

    def to_json(self, limit=10):
        return {
            "multilinear": self.multilinear,
            "phi_normal": self.phi_normal,
            "cond1": self.cond1,
            "cond2": self.cond2,
            "cond1_checked": self.cond1_checked,
            "cond2_checked": self.cond2_checked,
            "cond1_failures": self.cond1_failures[:limit],
            "cond2_failures": self.cond2_failures[:limit],
            "verdict": "GS by the sufficient condition (up to bound)" if self.ok else "not established",
        }


def check_thm41(phi: OPI, ord, alphabet, max_inst_size: int, fuel: int | None = None,
                node_budget: int | None = None) -> Thm41Report:
    """Check the two overlap conditions and the two hypotheses.

    cond1: for every overlap ``lead(u) = ab``, ``lead(v) = bc`` with
    ``b != 1``, ``R(phi(u)) c`` and ``a R(phi(v))`` are joinable.
    cond2: whenever ``lead(u) = q|_{lead(v)}`` with ``q != *``, the word
    ``lead(v)`` is a subword of some ``u_i``.
    """
    alphabet = tuple(alphabet)
    rules = (phi,)
    multilinear = is_multilinear(phi)
    phi_normal = is_phi_normal(phi.rhs, phi)
    sys = _system(rules, ord, alphabet, fuel, node_budget)
    insts = generator_instances(rules, alphabet, max_inst_size)
    rep = Thm41Report(multilinear, phi_normal, True, True)

    by_prefix: dict = {}
    for g in insts:
        fs = g.lead.factors
        for k in range(1, len(fs) + 1):
            by_prefix.setdefault((k, fs[:k]), []).append(g)
    for f in insts:
        ff = f.lead.factors
        for k in range(1, len(ff) + 1):
            for g in by_prefix.get((k, ff[-k:]), ()):
                if k == len(ff) == len(g.lead.factors) and f.sigma == g.sigma:
                    continue
                a = Word._raw(ff[:-k])
                c = Word._raw(g.lead.factors[k:])
                left = mul(sys.rhs(0, f.sigma), Poly.monomial(c))
                right = mul(Poly.monomial(a), sys.rhs(0, g.sigma))
                rep.cond1_checked += 1
                v = sys.joinable(left, right)
                if not v.joined:
                    rep.cond1 = False
                    rep.cond1_failures.append({
                        "u": [to_text(x) for x in f.sigma], "v": [to_text(x) for x in g.sigma],
                        "a": to_text(a), "b": to_text(Word._raw(ff[-k:])), "c": to_text(c),
                        "status": v.status,
                        "left_nf": str(v.left_nf), "right_nf": str(v.right_nf),
                    })

    for f in insts:
        for q, sigma in match_leading(phi, f.lead):
            if q.is_trivial():
                continue
            rep.cond2_checked += 1
            inner = leading_instance(phi, sigma)
            if not any(not u.is_one() and placements_of(inner, u) for u in f.sigma):
                rep.cond2 = False
                rep.cond2_failures.append({
                    "u": [to_text(x) for x in f.sigma], "v": [to_text(x) for x in sigma],
                    "q": str(q), "lead_u": to_text(f.lead), "lead_v": to_text(inner),
                })
    return rep


# ---------------------------------------------------------------------------
# irreducible words and truncated ideals


def irr_monomials(rules: Sequence[OPI], alphabet, max_size: int) -> list[Word]:
    sys = RewriteSystem(rules, alphabet, None)
    return [w for w in enumerate_words(tuple(alphabet), max_size) if not sys.find_redexes(w)]


@dataclass
class TruncationReport:
    n: int
    total: int
    irr: int
    rank: int
    rank_check: int
    rank_mod_p: int | None = None
    seed_words: int = 0

    @property
    def verdict(self) -> str:
        return "pass" if self.rank + self.irr == self.total else "fail"

    @property
    def ok(self) -> bool:
        return self.verdict == "pass"

    def to_json(self):
        return {"n": self.n, "total": self.total, "irr": self.irr, "rank": self.rank,
                "rank_check": self.rank_check, "rank_mod_p": self.rank_mod_p,
                "seed_words": self.seed_words, "verdict": self.verdict}


def _closure(sys: RewriteSystem, seeds: Iterable[Word]) -> list[Word]:
    seen = set()
    order = []
    stack = list(seeds)
    while stack:
        w = stack.pop()
        if w in seen:
            continue
        seen.add(w)
        order.append(w)
        for r in sys.find_redexes(w):
            for u in sys.result(w, r):
                if u not in seen:
                    stack.append(u)
    return order


def ideal_rows(sys: RewriteSystem, words: Iterable[Word]) -> list[Poly]:
    """``w - q|_{R}`` for every redex of every word; duplicates removed."""
    seen = set()
    rows = []
    for w in words:
        for r in sys.find_redexes(w):
            row = add(Poly.monomial(w), sys.result(w, r), -1)
            if row not in seen:
                seen.add(row)
                rows.append(row)
    return rows


def _columns(sys: RewriteSystem, words: list[Word]) -> dict:
    key = sys._key
    return {w: i for i, w in enumerate(sorted(words, key=key, reverse=True))}


def _to_sparse(rows: list[Poly], cols: dict) -> list[dict]:
    return [{cols[w]: c for w, c in r.items()} for r in rows]


def ideal_truncation_rank(rules: Sequence[OPI], ord, alphabet, n: int,
                          prime: int | None = None, sys: RewriteSystem | None = None) -> TruncationReport:
    """Compare the rank of the truncated ideal with the irreducible count.

    The column set is every word of size at most ``n`` together with all
    words reachable from them by rewriting (finite by termination); rows
    are the one-step relations ``w - q|_R`` on that set.
    """
    alphabet = tuple(alphabet)
    sys = sys or RewriteSystem(rules, alphabet, ord)
    seeds = enumerate_words(alphabet, n)
    words = _closure(sys, seeds)
    cols = _columns(sys, words)
    rows = _to_sparse(ideal_rows(sys, words), cols)
    irr = sum(1 for w in words if not sys.find_redexes(w))
    r1 = linalg.rank_rational(rows)
    r2 = linalg.rank_fraction_free(rows)
    rp = linalg.rank_mod_p(rows, len(cols), prime) if prime else None
    if r1 != r2:
        raise AssertionError(f"elimination mismatch: rational {r1} vs fraction-free {r2}")
    return TruncationReport(n, len(words), irr, r1, r2, rp, len(seeds))


def in_truncated_ideal(sys: RewriteSystem, f: Poly, n: int, alphabet=None) -> bool:
    """Whether ``f`` lies in the span of the one-step relations on the
    closure of words of size ``<= n`` and the support of ``f``."""
    alphabet = tuple(alphabet) if alphabet is not None else sys.alphabet
    words = _closure(sys, list(enumerate_words(alphabet, n)) + list(f))
    cols = _columns(sys, words)
    rows = _to_sparse(ideal_rows(sys, words), cols)
    base = linalg.rank_rational(rows)
    return linalg.rank_rational(rows + _to_sparse([f], cols)) == base


@dataclass
class PGSReport:
    ideal_equal: bool
    base_rank: int
    joint_rank: int
    gs: GSVerdict

    @property
    def ok(self) -> bool:
        return self.ideal_equal and self.gs.ok

    def to_json(self):
        return {"ideal_equal": self.ideal_equal, "base_rank": self.base_rank,
                "joint_rank": self.joint_rank, "gs": self.gs.to_json(),
                "verdict": "pgs-up-to-bound" if self.ok else "fail"}


def check_pgs(base: Sequence[OPI], superset: Sequence[OPI], ord, alphabet, n: int,
              max_inst_size: int, fuel: int | None = None) -> PGSReport:
    """Ideal equality at truncation ``n`` plus a bounded GS check of the
    superset.  Relations of both systems are compared on a shared column set."""
    alphabet = tuple(alphabet)
    s_base = RewriteSystem(base, alphabet, ord, fuel=fuel)
    s_joint = RewriteSystem(tuple(base) + tuple(superset), alphabet, ord, fuel=fuel)
    words = _closure(s_joint, enumerate_words(alphabet, n))
    words = _closure(s_base, words)
    cols = {w: i for i, w in enumerate(sorted(words, key=s_joint._key, reverse=True))}
    rb = linalg.rank_rational(_to_sparse(ideal_rows(s_base, words), cols))
    rj = linalg.rank_rational(_to_sparse(ideal_rows(s_base, words) + ideal_rows(s_joint, words), cols))
    gs = check_gs(superset, ord, alphabet, max_inst_size, fuel, max_word_size=None)
    return PGSReport(rb == rj, rb, rj, gs)
