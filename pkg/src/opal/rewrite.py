"""Term rewriting with oriented OPIs: redexes, steps, normal forms, forks."""

from __future__ import annotations

import os
from bisect import insort
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .opi import OPI, iter_matches, leading_instance, rhs_instance, shape_of, top_matches, validate_orientation
from .poly import Poly, add
from .terms import Bracket, Context, Word, _context_for, _replace_run, enumerate_words, structural_key, to_text

__all__ = [
    "Redex",
    "Step",
    "NFResult",
    "JoinVerdict",
    "Fork",
    "ForkVerdict",
    "ConfluenceVerdict",
    "RewriteSystem",
    "FuelExhausted",
    "BudgetExhausted",
    "OrientationError",
    "CompatibilityError",
    "default_fuel",
]

DEFAULT_FUEL = 10_000
DEFAULT_BUDGET = 50_000


def default_fuel() -> int:
    env = os.environ.get("OPAL_DEFAULT_FUEL")
    return int(env) if env else DEFAULT_FUEL


class FuelExhausted(RuntimeError):
    def __init__(self, last: Poly, trace: list, steps: int, reason: str | None = None):
        super().__init__(f"fuel exhausted after {steps} steps" + (f" ({reason})" if reason else ""))
        self.last = last
        self.trace = trace
        self.steps = steps


class BudgetExhausted(RuntimeError):
    pass


class OrientationError(ValueError):
    def __init__(self, rule: OPI, report):
        super().__init__(f"orientation of {rule.name} is invalid: {report.reason} at "
                         f"sigma={[to_text(u) for u in report.sigma]}")
        self.rule = rule
        self.report = report


class CompatibilityError(RuntimeError):
    pass


class Redex:
    """A rule occurrence: rule index, substitution, and the position of the
    replaced factor run (bracket path, start, end) inside ``word``."""

    __slots__ = ("rule", "sigma", "path", "start", "end", "word", "_ctx", "_hash")

    def __init__(self, rule: int, sigma: tuple, path: tuple, start: int, end: int, word: Word):
        self.rule = rule
        self.sigma = sigma
        self.path = path
        self.start = start
        self.end = end
        self.word = word
        self._ctx = None
        self._hash = None

    @property
    def context(self) -> Context:
        if self._ctx is None:
            self._ctx = _context_for(self.word, self.path, self.start, self.end)
        return self._ctx

    def _ident(self):
        return (self.rule, self.sigma, self.path, self.start, self.end, self.word)

    def __eq__(self, other):
        return isinstance(other, Redex) and self._ident() == other._ident()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._ident())
        return self._hash

    def __repr__(self):
        return f"Redex(rule={self.rule}, context={str(self.context)!r}, sigma={[to_text(u) for u in self.sigma]})"

    def to_json(self, rules=None):
        return {
            "rule": rules[self.rule].name if rules else self.rule,
            "context": str(self.context),
            "substitution": [to_text(u) for u in self.sigma],
        }


@dataclass(frozen=True)
class Step:
    before: Poly
    monomial: Word
    coeff: object
    redex: Redex
    after: Poly

    def to_json(self, rules=None):
        d = {"monomial": to_text(self.monomial)}
        d.update(self.redex.to_json(rules))
        d["after"] = str(self.after)
        return d


@dataclass
class NFResult:
    nf: Poly
    trace: list
    steps: int


@dataclass
class JoinVerdict:
    status: str  # joined | not-joined | unknown
    left_nf: Poly | None = None
    right_nf: Poly | None = None
    meet: Poly | None = None
    explored: int = 0

    @property
    def joined(self) -> bool:
        return self.status == "joined"


@dataclass(frozen=True)
class Fork:
    word: Word
    left: Poly
    right: Poly
    left_redex: Redex
    right_redex: Redex


@dataclass
class ForkVerdict:
    fork: Fork
    verdict: JoinVerdict

    def to_json(self, rules=None):
        v = self.verdict
        return {
            "word": to_text(self.fork.word),
            "left": str(self.fork.left),
            "right": str(self.fork.right),
            "left_redex": self.fork.left_redex.to_json(rules),
            "right_redex": self.fork.right_redex.to_json(rules),
            "status": v.status,
            "left_nf": str(v.left_nf) if v.left_nf is not None else None,
            "right_nf": str(v.right_nf) if v.right_nf is not None else None,
        }


@dataclass
class ConfluenceVerdict:
    status: str  # confluent-up-to-bound | counterexample | unknown
    max_size: int
    words: int = 0
    forks: int = 0
    counterexamples: list = field(default_factory=list)
    unknown: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status == "confluent-up-to-bound"

    @property
    def first(self):
        return self.counterexamples[0] if self.counterexamples else None

    def find(self, word: Word):
        return [c for c in self.counterexamples if c.fork.word == word]

    def to_json(self, rules=None, limit=20):
        return {
            "status": self.status,
            "max_size": self.max_size,
            "words": self.words,
            "forks": self.forks,
            "counterexample_count": len(self.counterexamples),
            "counterexamples": [c.to_json(rules) for c in self.counterexamples[:limit]],
            "unknown_count": len(self.unknown),
        }


class RewriteSystem:
    """The rewriting system generated by oriented OPIs over an alphabet.

    With an order, construction validates every orientation and each rule
    application is guarded to strictly decrease the rewritten monomial.
    """

    def __init__(self, rules: Sequence[OPI], alphabet: Iterable[str] = (), order=None,
                 fuel: int | None = None, node_budget: int = DEFAULT_BUDGET,
                 validate: bool = True, sample_size: int = 200):
        self.rules = tuple(rules)
        self.alphabet = tuple(alphabet)
        self.order = order
        self.fuel = default_fuel() if fuel is None else fuel
        self.node_budget = node_budget
        if order is not None and validate:
            for r in self.rules:
                rep = validate_orientation(r, order, self.alphabet or ("z",), sample_size)
                if not rep.ok:
                    raise OrientationError(r, rep)
        self._key = order.key if order is not None else structural_key
        self._redexes: dict = {}
        self._rhs: dict = {}
        self._results: dict = {}
        self._first: dict = {}
        self._canon: dict = {}
        self._fm = [dict() for _ in self.rules]
        self._steps: dict = {}
        self._nf: dict = {}

    # -- redexes and single steps

    def find_redexes(self, w: Word) -> list[Redex]:
        """All redexes, by rule index and then placement order."""
        hit = self._redexes.get(w)
        if hit is None:
            hit = [Redex(idx, sigma, path, i, j, w)
                   for idx, rule in enumerate(self.rules)
                   for path, i, j, sigma in iter_matches(rule, w)]
            self._redexes[w] = hit
        return hit

    def first_redex(self, w: Word) -> Redex | None:
        """The redex the normal-form strategy uses, or None."""
        hit = self._first.get(w, False)
        if hit is False:
            hit = None
            full = self._redexes.get(w)
            if full is not None:
                hit = full[0] if full else None
            else:
                for idx in range(len(self.rules)):
                    m = self._first_match(idx, w)
                    if m is not None:
                        hit = Redex(idx, m[3], m[0], m[1], m[2], w)
                        break
            self._first[w] = hit
        return hit

    def _first_match(self, idx: int, w: Word):
        """First ``(path, start, end, sigma)`` of one rule, cached per word
        so shared bracket contents are scanned once."""
        memo = self._fm[idx]
        hit = memo.get(w, False)
        if hit is False:
            hit = None
            fs = w.factors
            for i, j, sigma in top_matches(self.rules[idx], fs):
                hit = ((), i, j, sigma)
                break
            else:
                for k, f in enumerate(fs):
                    if f.__class__ is Bracket:
                        m = self._first_match(idx, f.inner)
                        if m is not None:
                            hit = ((k,) + m[0], m[1], m[2], m[3])
                            break
            memo[w] = hit
        return hit

    def is_reducible(self, w: Word) -> bool:
        return self.first_redex(w) is not None

    def rhs(self, rule: int, sigma: tuple) -> Poly:
        """``R(phi(sigma))``, checked once to lie strictly below the leading
        instance.  Compatibility of the order carries this to every context."""
        k = (rule, sigma)
        hit = self._rhs.get(k)
        if hit is None:
            phi = self.rules[rule]
            hit = rhs_instance(phi, sigma)
            if self.order is not None:
                self._guard(phi, sigma, hit)
            self._rhs[k] = hit
        return hit

    def _guard(self, phi: OPI, sigma: tuple, rhs: Poly):
        if self.order.family == "opdeglex":
            # opdeglex compares (op_degree, size, breadth) first
            top = shape_of(phi._lead_shape, sigma)
            if all(shape_of(sh, sigma) < top for sh in phi._rhs_shapes):
                return
        lead = leading_instance(phi, sigma)
        lt = self.order.lt
        for u in rhs:
            if not lt(u, lead):
                raise CompatibilityError(
                    f"{phi.name} at sigma={[to_text(x) for x in sigma]} produced "
                    f"{to_text(u)}, which is not below {to_text(lead)}")

    def result(self, w: Word, redex: Redex) -> Poly:
        """``q|_{R(phi(sigma))}``: what the monomial ``w`` rewrites to."""
        hit = self._results.get(redex)
        if hit is None:
            hit = self._results[redex] = self._apply(w, redex.rule, redex.sigma, redex.path,
                                                     redex.start, redex.end)
        return hit

    def _apply(self, w, rule, sigma, path, i, j) -> Poly:
        # share one object per distinct word so later lookups hit by identity
        canon = self._canon.setdefault
        out = {}
        for m, c in self.rhs(rule, sigma).items():
            u = _replace_run(w, path, i, j, m.factors)
            out[canon(u, u)] = c
        if self.order is None and w in out:
            raise CompatibilityError(f"rule {self.rules[rule].name} is not simple at {to_text(w)}")
        return Poly._from_dict(out)

    def _step(self, w: Word):
        """What the strategy rewrites ``w`` to, or None if ``w`` is normal."""
        hit = self._steps.get(w, False)
        if hit is False:
            hit = None
            for idx in range(len(self.rules)):
                m = self._first_match(idx, w)
                if m is not None:
                    hit = self._apply(w, idx, m[3], m[0], m[1], m[2])
                    break
            self._steps[w] = hit
        return hit

    def one_step(self, f: Poly, monomial: Word, redex: Redex) -> Poly:
        c = f.coeff(monomial)
        if c == 0:
            raise ValueError(f"{to_text(monomial)} is not in the support")
        if redex not in self.find_redexes(monomial):
            raise ValueError("the redex does not apply to this monomial")
        rest = add(f, Poly.monomial(monomial), -c)
        return add(rest, self.result(monomial, redex), c)

    def steps_from(self, f: Poly) -> Iterator[tuple[Word, Redex, Poly]]:
        """Every one-step rewriting of ``f``."""
        for w in sorted(f, key=self._key, reverse=True):
            for r in self.find_redexes(w):
                yield w, r, self.one_step(f, w, r)

    # -- normal forms

    def _strategy(self, f: Poly, fuel: int, record: bool) -> NFResult:
        d = dict(f.items())
        trace: list = []
        count = [0]
        try:
            self._run_strategy(d, trace, count, fuel, record)
        except RecursionError:
            # orderless systems can nest brackets without bound
            raise FuelExhausted(Poly._from_dict(dict(d)), trace, count[0],
                                "word nesting exceeds the recursion limit") from None
        return NFResult(Poly(d.items()), trace, count[0])

    def _run_strategy(self, d: dict, trace: list, count: list, fuel: int, record: bool):
        step = self._step
        key = self._key
        # support monomials as (key, word), ascending; reducibility is tested
        # on pop so terms that cancel first are never matched
        queue = sorted((key(w), w) for w in d)
        queued = set(d)
        while queue:
            _, w = queue.pop()
            queued.discard(w)
            if w not in d:
                continue
            res = step(w)
            if res is None:
                continue
            if count[0] >= fuel:
                raise FuelExhausted(Poly(d.items()), trace, count[0])
            before = Poly(d.items()) if record else None
            c = d.pop(w)
            for u, a in res.items():
                s = d.get(u, 0) + c * a
                if s:
                    d[u] = s
                    if u not in queued:
                        insort(queue, (key(u), u))
                        queued.add(u)
                else:
                    d.pop(u, None)
            count[0] += 1
            if record:
                trace.append(Step(before, w, c, self.first_redex(w), Poly(d.items())))

    def _word_nf(self, w: Word, fuel: int) -> Poly:
        """Memoized normal form of a monomial under the strategy (ordered
        systems only, where the strategy acts linearly)."""
        hit = self._nf.get(w)
        if hit is not None:
            return hit
        budget = [fuel]
        stack = [(w, False)]
        while stack:
            u, expanded = stack.pop()
            if u in self._nf:
                continue
            res = self._step(u)
            if res is None:
                self._nf[u] = Poly.monomial(u)
                continue
            if expanded:
                acc: dict = {}
                for v, a in res.items():
                    for x, b in self._nf[v].items():
                        s = acc.get(x, 0) + a * b
                        if s:
                            acc[x] = s
                        else:
                            acc.pop(x, None)
                self._nf[u] = Poly._from_dict(acc)
                continue
            budget[0] -= 1
            if budget[0] < 0:
                raise FuelExhausted(Poly.monomial(w), [], fuel)
            stack.append((u, True))
            for v in res:
                if v not in self._nf:
                    stack.append((v, False))
        return self._nf[w]

    def normal_form(self, f: Poly | Word, fuel: int | None = None, trace: bool = False) -> NFResult:
        """Apply the deterministic strategy until no redex remains.

        The strategy rewrites the largest reducible monomial with its first
        redex.  With an order every new monomial is smaller, so the strategy
        is linear and monomial normal forms are cached.
        """
        if isinstance(f, Word):
            f = Poly.monomial(f)
        fuel = self.fuel if fuel is None else fuel
        if trace or self.order is None:
            return self._strategy(f, fuel, trace)
        acc: dict = {}
        for w, c in f.items():
            for x, b in self._word_nf(w, fuel).items():
                s = acc.get(x, 0) + c * b
                if s:
                    acc[x] = s
                else:
                    acc.pop(x, None)
        return NFResult(Poly._from_dict(acc), [], -1)

    def nf(self, f, fuel=None) -> Poly:
        return self.normal_form(f, fuel).nf

    def is_normal(self, f: Poly) -> bool:
        return not any(self.first_redex(w) is not None for w in f)

    def rewrites_to_zero(self, f: Poly, fuel: int | None = None, node_budget: int | None = None):
        """(True/False/None, trace).  None means the bounded search gave up."""
        res = self.normal_form(f, fuel, trace=False)
        if res.nf.is_zero():
            return True, res.trace
        v = self.joinable(f, Poly.zero(), node_budget)
        if v.status == "joined":
            return True, []
        return (False if v.status == "not-joined" else None), res.trace

    # -- joinability

    def _reducts(self, f: Poly) -> list[Poly]:
        return [g for _, _, g in self.steps_from(f)]

    def joinable(self, f: Poly, g: Poly, node_budget: int | None = None, fuel: int | None = None) -> JoinVerdict:
        """Normal forms first, then a bounded search of both reduct sets."""
        budget = self.node_budget if node_budget is None else node_budget
        if f == g:
            return JoinVerdict("joined", f, g, f, 1)
        if self.order is not None:
            # a difference that rewrites to 0 certifies joinability in a
            # simple system; the strategy cancels shared terms early
            try:
                if self._strategy(add(f, g, -1), self.fuel if fuel is None else fuel, False).nf.is_zero():
                    return JoinVerdict("joined", None, None, None, 1)
            except FuelExhausted:
                pass
        try:
            nf_f = self.normal_form(f, fuel).nf
            nf_g = self.normal_form(g, fuel).nf
        except FuelExhausted:
            nf_f = nf_g = None
        if nf_f is not None and nf_f == nf_g:
            return JoinVerdict("joined", nf_f, nf_g, nf_f, 2)
        seen = [{f}, {g}]
        frontier = [deque([f]), deque([g])]
        explored = 2
        side = 0
        while frontier[0] or frontier[1]:
            if not frontier[side]:
                side ^= 1
            h = frontier[side].popleft()
            for r in self._reducts(h):
                if r in seen[side]:
                    continue
                if r in seen[side ^ 1]:
                    return JoinVerdict("joined", nf_f, nf_g, r, explored)
                seen[side].add(r)
                frontier[side].append(r)
                explored += 1
                if explored > budget:
                    return JoinVerdict("unknown", nf_f, nf_g, None, explored)
            side ^= 1
        return JoinVerdict("not-joined", nf_f, nf_g, None, explored)

    # -- forks and confluence

    def forks_at(self, w: Word) -> Iterator[Fork]:
        rs = self.find_redexes(w)
        for i in range(len(rs)):
            for j in range(i + 1, len(rs)):
                yield Fork(w, self.result(w, rs[i]), self.result(w, rs[j]), rs[i], rs[j])

    def local_base_forks(self, max_size: int, alphabet: Iterable[str] | None = None) -> Iterator[Fork]:
        alpha = tuple(alphabet) if alphabet is not None else self.alphabet
        for w in enumerate_words(alpha, max_size):
            if len(self.find_redexes(w)) >= 2:
                yield from self.forks_at(w)

    def check_confluence(self, max_size: int, node_budget: int | None = None,
                         limit: int | None = None, alphabet: Iterable[str] | None = None) -> ConfluenceVerdict:
        """Join every local base-fork over words up to ``max_size``.

        ``limit`` stops after that many counterexamples; by default all are
        collected so that specific words can be looked up.
        """
        alpha = tuple(alphabet) if alphabet is not None else self.alphabet
        out = ConfluenceVerdict("confluent-up-to-bound", max_size)
        for w in enumerate_words(alpha, max_size):
            out.words += 1
            if len(self.find_redexes(w)) < 2:
                continue
            for fork in self.forks_at(w):
                out.forks += 1
                v = self.joinable(fork.left, fork.right, node_budget)
                if v.status == "not-joined":
                    out.counterexamples.append(ForkVerdict(fork, v))
                    if limit is not None and len(out.counterexamples) >= limit:
                        out.status = "counterexample"
                        return out
                elif v.status == "unknown":
                    out.unknown.append(ForkVerdict(fork, v))
        if out.counterexamples:
            out.status = "counterexample"
        elif out.unknown:
            out.status = "unknown"
        return out

    def trace_json(self, trace: list) -> dict:
        return {"steps": [s.to_json(self.rules) for s in trace]}
