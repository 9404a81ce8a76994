"""Monomial orders on bracketed words and an empirical axiom checker.

Two families are provided.  ``opdeglex`` compares by operator degree, then
size, then breadth, then factor-wise.  ``difflex`` compares by leaf count,
then a bracket-nesting weight, then operator degree, breadth and factor-wise;
it is the family under which ``[x1 x2]`` leads Leibniz-style identities.
Both are compatible with contexts by construction.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable

from .terms import (
    Bracket,
    STAR,
    Word,
    all_subword_placements,
    bracket,
    enumerate_words,
    plug,
    to_text,
)

__all__ = [
    "MonomialOrder",
    "OpDegLex",
    "DiffLex",
    "op_deg_lex",
    "diff_lex",
    "parse_order",
    "compare",
    "LT",
    "EQ",
    "GT",
    "OrderReport",
    "check_order_axioms",
]

LT, EQ, GT = -1, 0, 1


class MonomialOrder:
    """A total order on words given by a sort key."""

    family = "abstract"

    def __init__(self, letters: Iterable[str] = ()):
        self.letters = tuple(letters)
        if len(set(self.letters)) != len(self.letters):
            raise ValueError("letters in an order must be distinct")
        self._rank = {a: (0, i, "") for i, a in enumerate(self.letters)}
        self._cache: dict = {}

    def _letter_key(self, a: str):
        r = self._rank.get(a)
        # letters outside the declared order come after it, by name
        return r if r is not None else (1, 0, a)

    def key(self, w: Word):
        k = self._cache.get(w)
        if k is None:
            k = self._key(w)
            if len(self._cache) < 2_000_000:
                self._cache[w] = k
        return k

    def _key(self, w: Word):
        raise NotImplementedError

    def compare(self, u: Word, v: Word) -> int:
        if u == v:
            return EQ
        ku, kv = self.key(u), self.key(v)
        return LT if ku < kv else GT

    def less(self, u: Word, v: Word) -> bool:
        return self.compare(u, v) == LT

    def lt(self, u: Word, v: Word) -> bool:
        """Strict comparison; subclasses may shortcut on a cheap prefix."""
        return self.key(u) < self.key(v)

    def spec(self) -> str:
        return f"{self.family}:" + "<".join(self.letters)

    def __repr__(self):
        return f"{type(self).__name__}({self.spec()!r})"

    def __eq__(self, other):
        return type(self) is type(other) and self.letters == other.letters

    def __hash__(self):
        return hash((type(self).__name__, self.letters))


class OpDegLex(MonomialOrder):
    """(operator degree, size, breadth, factors); letter < bracket."""

    family = "opdeglex"

    def _factor(self, f):
        if isinstance(f, Bracket):
            return (1, self.key(f.inner))
        return (0, self._letter_key(f))

    def _key(self, w: Word):
        key = self.key
        fk = tuple([(1, key(f.inner)) if f.__class__ is Bracket else (0, self._letter_key(f))
                    for f in w.factors])
        return (w.op_degree, w.size, len(w.factors), fk)

    def lt(self, u: Word, v: Word) -> bool:
        a = (u.op_degree, u.size, len(u.factors))
        b = (v.op_degree, v.size, len(v.factors))
        if a != b:
            return a < b
        return self.key(u) < self.key(v)


def _leaves(w: Word) -> int:
    n = 0
    for f in w.factors:
        if isinstance(f, Bracket):
            n += _leaves(f.inner) if f.inner.factors else 1
        else:
            n += 1
    return n


def _nest_weight(w: Word) -> int:
    s = 0
    for f in w.factors:
        if isinstance(f, Bracket):
            inner = f.inner
            lv = _leaves(inner) if inner.factors else 1
            s += lv * lv + _nest_weight(inner)
    return s


class DiffLex(MonomialOrder):
    """(leaves, nesting weight, operator degree, breadth, factors).

    Leaves are letters plus empty brackets.  The nesting weight sums the
    squared leaf count of every bracket, so merging two bracketed blocks
    into one bracket strictly increases it.
    """

    family = "difflex"

    def _factor(self, f):
        if isinstance(f, Bracket):
            return (1, self.key(f.inner))
        return (0, self._letter_key(f))

    def _key(self, w: Word):
        return (_leaves(w), _nest_weight(w), w.op_degree, w.breadth,
                tuple(self._factor(f) for f in w.factors))


def op_deg_lex(letter_order: Iterable[str] = ()) -> OpDegLex:
    return OpDegLex(letter_order)


def diff_lex(letter_order: Iterable[str] = ()) -> DiffLex:
    return DiffLex(letter_order)


_FAMILIES = {"opdeglex": OpDegLex, "difflex": DiffLex}


def parse_order(spec: str | None, default_letters: Iterable[str] = ()):
    """``opdeglex:z1<z2``, ``difflex``, or ``none`` (returns None)."""
    if spec is None or spec.strip().lower() == "none":
        return None
    fam, _, rest = spec.strip().partition(":")
    cls = _FAMILIES.get(fam.strip().lower())
    if cls is None:
        raise ValueError(f"unknown order family {fam!r}; expected one of {sorted(_FAMILIES)}")
    letters = [x.strip() for x in rest.split("<") if x.strip()] if rest else list(default_letters)
    return cls(letters)


def compare(ord: MonomialOrder, u: Word, v: Word) -> int:
    return ord.compare(u, v)


# ---------------------------------------------------------------------------
# axiom checking


@dataclass
class OrderReport:
    ok: bool
    checked_pairs: int = 0
    checked_contexts: int = 0
    failure: str | None = None
    witness: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "ok": self.ok,
            "checked_pairs": self.checked_pairs,
            "checked_contexts": self.checked_contexts,
            "failure": self.failure,
            "witness": {k: to_text(v) if isinstance(v, Word) else str(v) for k, v in self.witness.items()},
        }


def _sample_contexts(words, budget, rng):
    """Contexts cut out of enumerated words, smallest first, then random."""
    seen = {STAR}
    out = []
    pool = []
    for w in words:
        for p in all_subword_placements(w):
            c = p.context
            if c not in seen:
                seen.add(c)
                pool.append(c)
    small = sorted(pool, key=lambda c: (c.skeleton.size, str(c)))
    out.extend(small[: budget // 2])
    rest = small[budget // 2:]
    rng.shuffle(rest)
    out.extend(rest[: budget - len(out)])
    return out


def check_order_axioms(ord: MonomialOrder, alphabet: Iterable[str], max_size: int,
                       ctx_budget: int = 200, seed: int = 0, triples: int = 2000) -> OrderReport:
    """Empirically verify the monomial-order axioms on a bounded domain."""
    rng = random.Random(seed)
    words = enumerate_words(tuple(alphabet), max_size)
    rep = OrderReport(ok=True)
    keys = {w: ord.key(w) for w in words}
    for i, u in enumerate(words):
        for v in words[i:]:
            rep.checked_pairs += 1
            cuv, cvu = ord.compare(u, v), ord.compare(v, u)
            if (cuv == EQ) != (u == v) or cuv != -cvu:
                return OrderReport(False, rep.checked_pairs, 0, "totality/antisymmetry", {"u": u, "v": v})
            if u != v and keys[u] == keys[v]:
                return OrderReport(False, rep.checked_pairs, 0, "key collision", {"u": u, "v": v})
    for _ in range(triples if len(words) >= 3 else 0):
        a, b, c = rng.sample(words, 3)
        if ord.less(a, b) and ord.less(b, c) and not ord.less(a, c):
            return OrderReport(False, rep.checked_pairs, 0, "transitivity", {"a": a, "b": b, "c": c})
    one = Word()
    for u in words:
        if ord.less(u, one):
            return OrderReport(False, rep.checked_pairs, 0, "1 <= u", {"u": u})
        if not ord.less(u, bracket(u)):
            return OrderReport(False, rep.checked_pairs, 0, "u < [u]", {"u": u})
    ctx_words = enumerate_words(tuple(alphabet), max(1, min(max_size, 4)))
    contexts = [STAR] + _sample_contexts(ctx_words, ctx_budget, rng)
    ordered = sorted(words, key=ord.key)
    for q in contexts:
        rep.checked_contexts += 1
        prev = None
        for v in ordered:
            if prev is not None and not ord.less(plug(q, prev), plug(q, v)):
                return OrderReport(False, rep.checked_pairs, rep.checked_contexts, "compatibility",
                                   {"q": q.skeleton, "u": prev, "v": v})
            prev = v
    return rep
