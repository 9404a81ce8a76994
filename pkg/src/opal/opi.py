"""Operated polynomial identities: patterns, orientations, matching, catalog."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .poly import Poly, add, as_coeff, parse_poly, scale
from .terms import (
    Bracket,
    Context,
    Word,
    _context_for,
    _sequences,
    enumerate_words,
    parse,
    substitute,
    to_text,
    words_of_size,
)

__all__ = [
    "OPI",
    "OrientationReport",
    "make_opi",
    "instantiate",
    "leading_instance",
    "rhs_instance",
    "match_leading",
    "iter_matches",
    "top_matches",
    "is_multilinear",
    "is_phi_normal",
    "validate_orientation",
    "substitutions",
    "CatalogEntry",
    "catalog",
    "catalog_names",
    "load_opi_file",
    "opi_from_json",
]


@dataclass(frozen=True, eq=False)
class OPI:
    """An oriented pattern ``fix - R`` over variables ``x1..xk``.

    ``pattern`` is stored monic in the orientation, so ``rhs`` is simply
    ``orientation - pattern``.  ``allow_identity[i]`` says whether slot i
    may be substituted by the identity word.
    """

    name: str
    variables: tuple
    pattern: Poly
    orientation: Word
    allow_identity: tuple
    params: dict = field(default_factory=dict)
    rhs: Poly = None

    @property
    def arity(self) -> int:
        return len(self.variables)

    def __post_init__(self):
        if self.orientation not in self.pattern:
            raise ValueError(f"orientation {to_text(self.orientation)} is not in the support of {self.pattern}")
        if len(self.allow_identity) != len(self.variables):
            raise ValueError("one domain flag per variable is required")
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("pattern variables must be distinct")
        c = self.pattern.coeff(self.orientation)
        if c != 1:
            object.__setattr__(self, "pattern", scale(Fraction(1) / Fraction(c), self.pattern))
        rhs = add(Poly.monomial(self.orientation), self.pattern, -1)
        object.__setattr__(self, "rhs", rhs)
        object.__setattr__(self, "_seq", _compile(self.orientation.factors, set(self.variables)))
        object.__setattr__(self, "_vidx", {v: i for i, v in enumerate(self.variables)})
        allow = dict(zip(self.variables, self.allow_identity))
        object.__setattr__(self, "_allow", allow)
        object.__setattr__(self, "_need", _min_len(self._seq, allow))
        object.__setattr__(self, "_head", _fixed_prefix(self._seq))
        vidx = self._vidx
        object.__setattr__(self, "_lead_tmpl", _template(self.orientation.factors, vidx))
        object.__setattr__(self, "_rhs_tmpl", tuple((_template(m.factors, vidx), c) for m, c in rhs.items()))
        k = len(self.variables)
        object.__setattr__(self, "_lead_shape", _shape(self._lead_tmpl, k))
        object.__setattr__(self, "_rhs_shapes", tuple(_shape(t, k) for t, _ in self._rhs_tmpl))

    def __repr__(self):
        return f"OPI({self.name!r}, {self.pattern}, fix={to_text(self.orientation)})"

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "arity": self.arity,
            "variables": list(self.variables),
            "pattern": str(self.pattern),
            "orientation": to_text(self.orientation),
            "params": {k: str(v) for k, v in self.params.items()},
            "var_domains": ["allow-identity" if a else "forbid-identity" for a in self.allow_identity],
        }


def make_opi(name: str, pattern: str | Poly, orientation: str | Word, arity: int | None = None,
             params: dict | None = None, allow_identity: bool | Sequence[bool] = True,
             variables: Sequence[str] | None = None) -> OPI:
    params = {k: as_coeff(v) for k, v in (params or {}).items()}
    if variables is None:
        if arity is None:
            raise ValueError("give either arity or variables")
        variables = tuple(f"x{i}" for i in range(1, arity + 1))
    variables = tuple(variables)
    if isinstance(pattern, str):
        pattern = parse_poly(pattern, alphabet=variables, params=params)
    if isinstance(orientation, str):
        orientation = parse(orientation, alphabet=variables)
    if isinstance(allow_identity, bool):
        allow_identity = (allow_identity,) * len(variables)
    return OPI(name, variables, pattern, orientation, tuple(allow_identity), params)


# ---------------------------------------------------------------------------
# instantiation


def _check_sigma(phi: OPI, sigma: Sequence[Word]):
    if len(sigma) != phi.arity:
        raise ValueError(f"{phi.name} has arity {phi.arity}, got {len(sigma)} words")
    for v, u, ok in zip(phi.variables, sigma, phi.allow_identity):
        if not ok and u.is_one():
            raise ValueError(f"variable {v} of {phi.name} may not be the identity")


def _template(factors: tuple, vidx: dict) -> tuple:
    """Pattern factors as ("v", slot) | ("l", letter) | ("b", template)."""
    return tuple(("b", _template(f.inner.factors, vidx)) if isinstance(f, Bracket)
                 else ("v", vidx[f]) if f in vidx else ("l", f) for f in factors)


def _shape(tmpl: tuple, k: int) -> tuple:
    """(op_degree, size, breadth) of an instance as affine forms in the
    slots' own values: ((const, coeffs), ...) for each of the three."""
    op = [0] * k
    sz = [0] * k
    br = [0] * k
    c_op = c_sz = c_br = 0

    def walk(t, top):
        nonlocal c_op, c_sz, c_br
        for kind, x in t:
            if kind == "v":
                op[x] += 1
                sz[x] += 1
                if top:
                    br[x] += 1
            elif kind == "b":
                c_op += 1
                c_sz += 1
                if top:
                    c_br += 1
                walk(x, False)
            else:
                c_sz += 1
                if top:
                    c_br += 1

    walk(tmpl, True)
    return ((c_op, tuple(op)), (c_sz, tuple(sz)), (c_br, tuple(br)))


def shape_of(shape: tuple, sigma: tuple) -> tuple:
    """Evaluate a :func:`_shape` at a substitution without building words."""
    (a, ca), (b, cb), (c, cc) = shape
    for i, u in enumerate(sigma):
        a += ca[i] * u.op_degree
        b += cb[i] * u.size
        c += cc[i] * len(u.factors)
    return (a, b, c)


def _fill_template(tmpl: tuple, sigma: tuple) -> tuple:
    out = []
    for kind, x in tmpl:
        if kind == "v":
            out.extend(sigma[x].factors)
        elif kind == "b":
            out.append(Bracket(Word._raw(_fill_template(x, sigma))))
        else:
            out.append(x)
    return tuple(out)


def _subst_poly(f: Poly, mapping: dict) -> Poly:
    out: dict = {}
    for w, c in f.items():
        u = substitute(w, mapping)
        s = out.get(u, 0) + c
        if s:
            out[u] = s
        else:
            out.pop(u, None)
    return Poly(out.items())


def instantiate(phi: OPI, sigma: Sequence[Word]) -> Poly:
    """``phi(u1..uk)`` with like terms combined."""
    _check_sigma(phi, sigma)
    return _subst_poly(phi.pattern, dict(zip(phi.variables, sigma)))


def leading_instance(phi: OPI, sigma: Sequence[Word]) -> Word:
    _check_sigma(phi, sigma)
    return Word._raw(_fill_template(phi._lead_tmpl, tuple(sigma)))


def rhs_instance(phi: OPI, sigma: Sequence[Word]) -> Poly:
    """``R(phi(u))``: the instantiated right-hand side (no cancellation check)."""
    _check_sigma(phi, sigma)
    sigma = tuple(sigma)
    out: dict = {}
    for tmpl, c in phi._rhs_tmpl:
        u = Word._raw(_fill_template(tmpl, sigma))
        s = out.get(u, 0) + c
        if s:
            out[u] = s
        else:
            out.pop(u, None)
    return Poly._from_dict(out)


# ---------------------------------------------------------------------------
# matching


def _compile(factors: tuple, variables: set):
    """Pattern factor sequence -> tuple of ("v", name) | ("l", letter) | ("b", compiled)."""
    out = []
    for f in factors:
        if isinstance(f, Bracket):
            out.append(("b", _compile(f.inner.factors, variables)))
        elif f in variables:
            out.append(("v", f))
        else:
            out.append(("l", f))
    return tuple(out)


def _min_len(seq, allow):
    return sum(0 if (k == "v" and allow[x]) else 1 for k, x in seq)


def _fixed_prefix(seq) -> tuple:
    """Leading pattern factors that are not variables, as a cheap filter:
    ``None`` for "any bracket", else the letter itself."""
    out = []
    for kind, x in seq:
        if kind == "v":
            break
        out.append(None if kind == "b" else x)
    return tuple(out)


def _match_seq(seq, pi, target, ti, env, allow, full):
    """Yield (end, env) for matches of seq[pi:] against target from ti."""
    if pi == len(seq):
        if not full or ti == len(target):
            yield ti, env
        return
    kind, x = seq[pi]
    if kind == "l":
        if ti < len(target) and target[ti] == x:
            yield from _match_seq(seq, pi + 1, target, ti + 1, env, allow, full)
    elif kind == "b":
        if ti < len(target):
            t = target[ti]
            if isinstance(t, Bracket):
                if len(x) == 1 and x[0][0] == "v" and x[0][1] not in env:
                    # [x] binds the whole inner word
                    v = x[0][1]
                    inner = t.inner.factors
                    if inner or allow[v]:
                        env2 = dict(env)
                        env2[v] = inner
                        yield from _match_seq(seq, pi + 1, target, ti + 1, env2, allow, full)
                    return
                for _, env2 in _match_seq(x, 0, t.inner.factors, 0, env, allow, True):
                    yield from _match_seq(seq, pi + 1, target, ti + 1, env2, allow, full)
    else:
        bound = env.get(x)
        if bound is not None:
            n = len(bound)
            if tuple(target[ti:ti + n]) == bound:
                yield from _match_seq(seq, pi + 1, target, ti + n, env, allow, full)
            return
        lo = ti if allow[x] else ti + 1
        rest = _min_len(seq[pi + 1:], allow)
        hi = len(target) - rest
        if full and pi == len(seq) - 1:
            lo = max(lo, len(target))
        for end in range(lo, hi + 1):
            env2 = dict(env)
            env2[x] = tuple(target[ti:end])
            yield from _match_seq(seq, pi + 1, target, end, env2, allow, full)


def top_matches(phi: OPI, target: tuple):
    """Yield ``(start, end, sigma)`` for matches in one factor sequence."""
    seq = phi._seq
    allow = phi._allow
    head = phi._head
    variables = phi.variables
    raw = Word._raw
    for i in range(len(target) - phi._need + 1):
        for k, h in enumerate(head):
            t = target[i + k]
            if (t.__class__ is not Bracket) if h is None else (t != h):
                break
        else:
            for end, env in _match_seq(seq, 0, target, i, {}, allow, False):
                if end > i:  # skip empty redexes
                    yield i, end, tuple(raw(env.get(v, ())) for v in variables)


def iter_matches(phi: OPI, w: Word):
    """Lazily yield ``(path, start, end, sigma)`` in placement order."""
    stack = [((), w.factors)]
    while stack:
        path, target = stack.pop()
        for i, end, sigma in top_matches(phi, target):
            yield path, i, end, sigma
        # pre-order: push children in reverse so the first bracket comes next
        for j in range(len(target) - 1, -1, -1):
            f = target[j]
            if f.__class__ is Bracket:
                stack.append((path + (j,), f.inner.factors))


def match_leading(phi: OPI, w: Word) -> list[tuple[Context, tuple]]:
    """All ``(q, sigma)`` with ``plug(q, leading_instance(phi, sigma)) == w``."""
    return [(_context_for(w, path, i, j), sigma) for path, i, j, sigma in iter_matches(phi, w)]


def is_multilinear(phi: OPI) -> bool:
    for w in phi.pattern:
        counts = _letter_counts(w)
        if any(counts.get(v, 0) != 1 for v in phi.variables):
            return False
    return True


def _letter_counts(w: Word, acc=None) -> dict:
    acc = {} if acc is None else acc
    for f in w.factors:
        if isinstance(f, Bracket):
            _letter_counts(f.inner, acc)
        elif isinstance(f, str):
            acc[f] = acc.get(f, 0) + 1
    return acc


def is_phi_normal(f: Poly, phi: OPI) -> bool:
    """True iff no monomial of ``f`` contains an instance of the orientation.

    Pattern variables occurring in ``f`` are treated as plain letters.
    """
    return not any(match_leading(phi, w) for w in f)


# ---------------------------------------------------------------------------
# orientation validation


@dataclass
class OrientationReport:
    ok: bool
    checked: int = 0
    reason: str | None = None
    sigma: tuple | None = None
    witness: Word | None = None
    instance: Poly | None = None

    def to_json(self):
        return {
            "ok": self.ok,
            "checked": self.checked,
            "reason": self.reason,
            "sigma": [to_text(u) for u in self.sigma] if self.sigma is not None else None,
            "witness": to_text(self.witness) if self.witness is not None else None,
            "instance": str(self.instance) if self.instance is not None else None,
        }


def substitutions(phi: OPI, alphabet: Iterable[str], max_total: int):
    """All sigma whose total size is at most ``max_total``, by total size."""
    alpha = tuple(alphabet)
    k = phi.arity
    by_size = [words_of_size(alpha, s) for s in range(max_total + 1)]
    for total in range(max_total + 1):
        for sizes in _compositions(total, k):
            pools = []
            for s, ok in zip(sizes, phi.allow_identity):
                if s == 0 and not ok:
                    break
                pools.append(by_size[s])
            else:
                yield from itertools.product(*pools)


def _compositions(total, k):
    if k == 0:
        if total == 0:
            yield ()
        return
    if k == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, k - 1):
            yield (first,) + rest


def _check_instance(phi, ord, sigma):
    inst = instantiate(phi, sigma)
    lead = leading_instance(phi, sigma)
    c = inst.coeff(lead)
    if c == 0:
        return "orientation cancels", lead, inst
    if c != 1:
        return "orientation coefficient altered by collision", lead, inst
    if ord is not None:
        k = ord.key(lead)
        for u in inst:
            if u != lead and ord.key(u) > k:
                return "orientation is not the leading monomial", u, inst
    return None


def validate_orientation(phi: OPI, ord, alphabet: Iterable[str], sample_size: int = 200,
                         max_total: int = 4) -> OrientationReport:
    """Check that the orientation leads every sampled instance.

    The generic instance (variables as fresh letters) is checked first, then
    the first ``sample_size`` substitutions by total size.
    """
    generic = tuple(Word._raw((v,)) for v in phi.variables)
    checked = 0
    candidates = itertools.chain([generic], itertools.islice(substitutions(phi, alphabet, max_total), sample_size))
    for sigma in candidates:
        checked += 1
        bad = _check_instance(phi, ord, sigma)
        if bad is not None:
            reason, witness, inst = bad
            return OrientationReport(False, checked, reason, tuple(sigma), witness, inst)
    return OrientationReport(True, checked)


# ---------------------------------------------------------------------------
# catalog


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    rules: tuple
    order_family: str | None
    note: str = ""


def _rb_type(name, B, params, order="opdeglex"):
    return make_opi(name, f"[x1][x2] - [{B}]", "[x1][x2]", arity=2, params=params)


def _diff_type(name, N, params):
    return make_opi(name, f"[x1 x2] - ({N})", "[x1 x2]", arity=2, params=params, allow_identity=False)


_AVERAGING_CASES = {
    "case1": ("[x1][x2]", "[x1[x2]]"),
    "case2": ("[x1][x2]", "[[x1]x2]"),
    "case3": ("[[x1]x2]", "[x1[x2]]"),
    "case4": ("[[x1]x2]", "[[x1]x2]"),
}


def _lam(params, default=0):
    if "lambda" in params:
        return as_coeff(params["lambda"])
    if "mu" in params:
        mu = as_coeff(params["mu"])
        return -mu * mu
    return default


def catalog(name: str, **params) -> CatalogEntry:
    """Build a named entry.  Accepted parameters: ``lambda`` (or ``mu`` for
    modified-rb), ``orientation`` for the averaging system, ``N``/``B`` for
    the generic types."""
    key = name.strip().lower()
    if key == "endomorphism":
        return CatalogEntry(key, (_diff_type(key, "[x1][x2]", {}),), "difflex")
    if key == "differential":
        lam = _lam(params)
        return CatalogEntry(key, (_diff_type(key, "[x1]x2 + x1[x2] + lambda*[x1][x2]", {"lambda": lam}),), "difflex")
    if key == "differential-type":
        N = params.get("N")
        if N is None:
            raise ValueError("differential-type needs N")
        return CatalogEntry(key, (_diff_type(key, N, _num_params(params)),), "difflex")
    if key == "rota-baxter":
        lam = _lam(params)
        return CatalogEntry(key, (_rb_type(key, "x1[x2] + [x1]x2 + lambda*x1 x2", {"lambda": lam}),), "opdeglex")
    if key == "rota-baxter-type":
        B = params.get("B")
        if B is None:
            raise ValueError("rota-baxter-type needs B")
        return CatalogEntry(key, (_rb_type(key, B, _num_params(params)),), "opdeglex")
    if key == "average":
        return CatalogEntry(key, (_rb_type(key, "x1[x2]", {}),), "opdeglex")
    if key == "inverse-average":
        return CatalogEntry(key, (_rb_type(key, "[x1]x2", {}),), "opdeglex")
    if key == "reynolds":
        return CatalogEntry(key, (_rb_type(key, "x1[x2] + [x1]x2 - [x1][x2]", {}),), "opdeglex")
    if key == "nijenhuis":
        return CatalogEntry(key, (_rb_type(key, "x1[x2] + [x1]x2 - [x1 x2]", {}),), "opdeglex")
    if key == "td":
        return CatalogEntry(key, (_rb_type(key, "x1[x2] + [x1]x2 - x1[1]x2", {}),), "opdeglex")
    if key == "modified-rb":
        lam = _lam(params)
        phi = make_opi(key, "[x1][x2] - [x1[x2]] - [[x1]x2] - lambda*x1 x2", "[x1][x2]",
                       arity=2, params={"lambda": lam})
        return CatalogEntry(key, (phi,), "opdeglex")
    if key == "square-zero":
        return CatalogEntry(key, (make_opi(key, "[[x1]]", "[[x1]]", arity=1),), "opdeglex")
    if key == "averaging":
        case = str(params.get("orientation", "case1")).lower()
        if case not in _AVERAGING_CASES:
            raise ValueError(f"averaging orientation must be one of {sorted(_AVERAGING_CASES)}")
        o1, o2 = _AVERAGING_CASES[case]
        phi1 = make_opi("phi1", "[x1][x2] - [[x1]x2]", o1, arity=2, allow_identity=False)
        phi2 = make_opi("phi2", "[x1[x2]] - [[x1]x2]", o2, arity=2, allow_identity=False)
        return CatalogEntry(f"averaging-{case}", (phi1, phi2), None)
    raise ValueError(f"unknown OPI {name!r}; known: {', '.join(catalog_names())}")


def _num_params(params):
    return {k: v for k, v in params.items() if k not in ("N", "B", "orientation")}


def catalog_names() -> list[str]:
    return [
        "endomorphism", "differential", "differential-type", "rota-baxter", "rota-baxter-type",
        "average", "inverse-average", "reynolds", "nijenhuis", "td", "modified-rb",
        "square-zero", "averaging",
    ]


def opi_from_json(obj: dict) -> OPI:
    arity = int(obj["arity"])
    params = {k: Fraction(str(v)) for k, v in obj.get("params", {}).items()}
    doms = obj.get("var_domains")
    if doms is None:
        allow = True
    else:
        allow = []
        for d in doms:
            if d in (True, "allow", "allow-identity"):
                allow.append(True)
            elif d in (False, "forbid", "forbid-identity"):
                allow.append(False)
            else:
                raise ValueError(f"bad var_domain {d!r}")
    return make_opi(obj.get("name", "custom"), obj["pattern"], obj["orientation"], arity=arity,
                    params=params, allow_identity=allow, variables=obj.get("variables"))


def load_opi_file(path: str) -> tuple[list[OPI], str | None]:
    """Read one OPI object or a list of them; returns (rules, order spec)."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    items = data if isinstance(data, list) else [data]
    order = None
    for it in items:
        order = order or it.get("order")
    return [opi_from_json(it) for it in items], order
