"""Bracketed words: elements of the free operated monoid over an alphabet.

A word is a flat sequence of factors.  A factor is a letter (a ``str``), a
:class:`Bracket` wrapping another word, or, inside contexts only, a
:class:`Hole`.  The empty sequence is the identity ``1``.

Text grammar::

    word := "1" | term+
    term := IDENT | "[" word "]"

Juxtaposition is the product; ``[...]`` is the operator.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

__all__ = [
    "Bracket",
    "Hole",
    "Word",
    "Context",
    "MultiContext",
    "Placement",
    "Relation",
    "ParseError",
    "ONE",
    "STAR",
    "word",
    "concat",
    "bracket",
    "plug",
    "plug_multi",
    "substitute",
    "placements_of",
    "all_subword_placements",
    "classify",
    "parse",
    "parse_context",
    "to_text",
    "enumerate_words",
    "words_of_size",
    "structural_key",
]

IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*")


class Hole:
    """The placeholder of a context.  ``Hole(0)`` is the single hole."""

    __slots__ = ("index",)

    def __init__(self, index: int = 0):
        self.index = index

    def __eq__(self, other):
        return isinstance(other, Hole) and other.index == self.index

    def __hash__(self):
        return hash(("hole", self.index))

    def __repr__(self):
        return "Hole()" if self.index == 0 else f"Hole({self.index})"


class Bracket:
    """A single factor ``[inner]``."""

    __slots__ = ("inner", "_hash")

    def __init__(self, inner: "Word"):
        self.inner = inner
        self._hash = None

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, Bracket) and self.inner == other.inner

    def __hash__(self):
        h = self._hash
        if h is None:
            h = self._hash = hash(("br", self.inner))
        return h

    def __repr__(self):
        return f"Bracket({self.inner!r})"


class Word:
    """An immutable bracketed word, kept in canonical flat form."""

    __slots__ = ("factors", "_hash", "_size", "_deg", "_letters")

    def __init__(self, factors: Iterable = ()):
        flat = []
        for f in factors:
            if isinstance(f, Word):
                flat.extend(f.factors)
            elif isinstance(f, (str, Bracket, Hole)):
                flat.append(f)
            else:
                raise TypeError(f"not a factor: {f!r}")
        self.factors = tuple(flat)
        self._hash = None
        self._size = None
        self._deg = None
        self._letters = None

    @classmethod
    def _raw(cls, factors: tuple) -> "Word":
        # caller guarantees a flat tuple of factors
        w = cls.__new__(cls)
        w.factors = factors
        w._hash = None
        w._size = None
        w._deg = None
        w._letters = None
        return w

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, Word) and self.factors == other.factors

    def __hash__(self):
        h = self._hash
        if h is None:
            h = self._hash = hash(self.factors)
        return h

    def __len__(self):
        return len(self.factors)

    def __bool__(self):
        return bool(self.factors)

    def __iter__(self):
        return iter(self.factors)

    def __mul__(self, other):
        if isinstance(other, Word):
            return concat(self, other)
        return NotImplemented

    def __repr__(self):
        return f"Word({to_text(self)!r})"

    def __str__(self):
        return to_text(self)

    def is_one(self) -> bool:
        return not self.factors

    @property
    def breadth(self) -> int:
        return len(self.factors)

    @property
    def size(self) -> int:
        """Letter occurrences plus bracket nodes (holes count as 0)."""
        s = self._size
        if s is None:
            s = 0
            for f in self.factors:
                if isinstance(f, Bracket):
                    s += 1 + f.inner.size
                elif isinstance(f, str):
                    s += 1
            self._size = s
        return s

    @property
    def op_degree(self) -> int:
        """Number of bracket nodes."""
        d = self._deg
        if d is None:
            d = 0
            for f in self.factors:
                if isinstance(f, Bracket):
                    d += 1 + f.inner.op_degree
            self._deg = d
        return d

    @property
    def letter_count(self) -> int:
        n = self._letters
        if n is None:
            n = 0
            for f in self.factors:
                if isinstance(f, Bracket):
                    n += f.inner.letter_count
                elif isinstance(f, str):
                    n += 1
            self._letters = n
        return n

    def letters(self) -> set:
        out = set()
        for f in self.factors:
            if isinstance(f, Bracket):
                out |= f.inner.letters()
            elif isinstance(f, str):
                out.add(f)
        return out

    def holes(self) -> list:
        out = []
        for f in self.factors:
            if isinstance(f, Bracket):
                out.extend(f.inner.holes())
            elif isinstance(f, Hole):
                out.append(f.index)
        return out


ONE = Word._raw(())


def word(text: str, alphabet: Iterable[str] | None = None) -> Word:
    """Shorthand for :func:`parse`."""
    return parse(text, alphabet)


def concat(a: Word, b: Word) -> Word:
    if not a.factors:
        return b
    if not b.factors:
        return a
    return Word._raw(a.factors + b.factors)


def bracket(w: Word) -> Word:
    return Word._raw((Bracket(w),))


# ---------------------------------------------------------------------------
# contexts


def _hole_path(w: Word, index: int = 0):
    """Path to the hole: list of factor indices through brackets, then the
    hole's own index in the innermost sequence."""
    for i, f in enumerate(w.factors):
        if isinstance(f, Hole):
            if f.index == index:
                return [i]
        elif isinstance(f, Bracket):
            sub = _hole_path(f.inner, index)
            if sub is not None:
                return [i] + sub
    return None


def _replace_at(w: Word, path: Sequence[int], repl: tuple) -> Word:
    i = path[0]
    fs = w.factors
    if len(path) == 1:
        return Word._raw(fs[:i] + repl + fs[i + 1:])
    inner = _replace_at(fs[i].inner, path[1:], repl)
    return Word._raw(fs[:i] + (Bracket(inner),) + fs[i + 1:])


class Context:
    """A word with exactly one hole."""

    __slots__ = ("skeleton", "_path")

    def __init__(self, skeleton: Word):
        holes = skeleton.holes()
        if holes != [0]:
            raise ValueError(f"a context needs exactly one hole, got {holes}")
        self.skeleton = skeleton
        self._path = None

    @classmethod
    def _trusted(cls, skeleton: Word, path=None) -> "Context":
        c = cls.__new__(cls)
        c.skeleton = skeleton
        c._path = path
        return c

    @property
    def path(self) -> list:
        if self._path is None:
            self._path = _hole_path(self.skeleton)
        return self._path

    def is_trivial(self) -> bool:
        return len(self.skeleton.factors) == 1 and isinstance(self.skeleton.factors[0], Hole)

    def __eq__(self, other):
        return isinstance(other, Context) and self.skeleton == other.skeleton

    def __hash__(self):
        return hash(("ctx", self.skeleton))

    def __repr__(self):
        return f"Context({to_text(self.skeleton)!r})"

    def __str__(self):
        return to_text(self.skeleton)

    def compose(self, inner: "Context") -> "Context":
        """The context ``self|_{inner}``."""
        return Context._trusted(_replace_at(self.skeleton, self.path, inner.skeleton.factors))


STAR = Context._trusted(Word._raw((Hole(0),)), [0])


class MultiContext:
    """A word with holes ``Hole(1) .. Hole(k)``, each exactly once."""

    __slots__ = ("skeleton", "k")

    def __init__(self, skeleton: Word, k: int | None = None):
        holes = sorted(skeleton.holes())
        if k is None:
            k = len(holes)
        if holes != list(range(1, k + 1)):
            raise ValueError(f"expected holes 1..{k} once each, got {holes}")
        self.skeleton = skeleton
        self.k = k

    def __eq__(self, other):
        return isinstance(other, MultiContext) and self.skeleton == other.skeleton

    def __hash__(self):
        return hash(("mctx", self.skeleton))

    def __repr__(self):
        return f"MultiContext({to_text(self.skeleton)!r})"


def plug(q: Context, u: Word) -> Word:
    """Replace the hole of ``q`` by ``u``."""
    return _replace_at(q.skeleton, q.path, u.factors)


def _fill(w: Word, mapping: dict) -> Word:
    out = []
    for f in w.factors:
        if isinstance(f, Bracket):
            out.append(Bracket(_fill(f.inner, mapping)))
        elif isinstance(f, Hole):
            out.extend(mapping[f.index].factors)
        else:
            out.append(f)
    return Word._raw(tuple(out))


def plug_multi(p: MultiContext, us: Sequence[Word]) -> Word:
    if len(us) != p.k:
        raise ValueError(f"arity mismatch: context has {p.k} holes, got {len(us)} words")
    return _fill(p.skeleton, {i + 1: u for i, u in enumerate(us)})


def substitute(w: Word, mapping: dict) -> Word:
    """Replace letters by words wherever they occur (no hole semantics)."""
    out = []
    changed = False
    for f in w.factors:
        if isinstance(f, Bracket):
            inner = substitute(f.inner, mapping)
            if inner is f.inner:
                out.append(f)
            else:
                out.append(Bracket(inner))
                changed = True
        elif isinstance(f, str) and f in mapping:
            out.extend(mapping[f].factors)
            changed = True
        else:
            out.append(f)
    if not changed:
        return w
    return Word._raw(tuple(out))


# ---------------------------------------------------------------------------
# placements


@dataclass(frozen=True)
class Placement:
    subword: Word
    context: Context

    def ambient(self) -> Word:
        return plug(self.context, self.subword)


def _sequences(w: Word, path=()):
    """Every factor sequence of ``w`` in pre-order, with its bracket path."""
    yield path, w.factors
    for i, f in enumerate(w.factors):
        if isinstance(f, Bracket):
            yield from _sequences(f.inner, path + (i,))


def _context_for(w: Word, path: tuple, i: int, j: int) -> Context:
    skel = _replace_run(w, path, i, j, (Hole(0),))
    return Context._trusted(skel, list(path) + [i])


def _replace_run(w: Word, path: tuple, i: int, j: int, repl: tuple) -> Word:
    fs = w.factors
    if not path:
        return Word._raw(fs[:i] + repl + fs[j:])
    k = path[0]
    inner = _replace_run(fs[k].inner, path[1:], i, j, repl)
    return Word._raw(fs[:k] + (Bracket(inner),) + fs[k + 1:])


def all_subword_placements(w: Word) -> list[Placement]:
    """Every non-identity contiguous factor run at every depth."""
    out = []
    for path, seq in _sequences(w):
        n = len(seq)
        for i in range(n):
            for j in range(i + 1, n + 1):
                out.append(Placement(Word._raw(seq[i:j]), _context_for(w, path, i, j)))
    return out


def placements_of(u: Word, w: Word) -> list[Context]:
    if u.is_one():
        raise ValueError("the identity is a subword everywhere; placements_of(1, w) is excluded")
    b = len(u.factors)
    target = u.factors
    out = []
    for path, seq in _sequences(w):
        for i in range(len(seq) - b + 1):
            if seq[i:i + b] == target:
                out.append(_context_for(w, path, i, i + b))
    return out


def _position(p: Placement) -> tuple[tuple, int, int]:
    path = p.context.path
    return tuple(path[:-1]), path[-1], path[-1] + len(p.subword.factors)


@dataclass(frozen=True)
class Relation:
    """Relative location of two placements, with witnesses.

    ``separated``: ``p`` (two-hole context), ``a`` and ``b`` with ambient
    ``p|_{a,b}``.  ``nested``: ``q`` with ``outer = q|_{inner}`` and
    ``outer_first`` telling which placement is the outer one.
    ``intersecting``: ``q``, ``a``, ``b``, ``c`` with ambient ``q|_{abc}``;
    ``first_left`` is True when the first placement covers ``ab``.
    """

    kind: str
    witnesses: dict


def classify(p1: Placement, p2: Placement, w: Word) -> Relation:
    if p1.ambient() != w or p2.ambient() != w:
        raise ValueError("both placements must reproduce the ambient word")
    path1, i1, j1 = _position(p1)
    path2, i2, j2 = _position(p2)

    def contains(pa, ia, ja, pb, ib, jb):
        if len(pb) < len(pa) or pb[:len(pa)] != pa:
            return False
        if len(pb) == len(pa):
            return ia <= ib and jb <= ja
        return ia <= pb[len(pa)] < ja

    for outer, inner, first in ((p1, p2, True), (p2, p1, False)):
        po, io, jo = _position(outer)
        pi, ii, ji = _position(inner)
        if contains(po, io, jo, pi, ii, ji):
            # context of the inner run relative to the outer subword
            rel_path = pi[len(po):]
            if rel_path:
                rel_path = (rel_path[0] - io,) + rel_path[1:]
                q = _context_for(outer.subword, rel_path, ii, ji)
            else:
                q = _context_for(outer.subword, (), ii - io, ji - io)
            return Relation("nested", {"q": q, "outer_first": first})

    if path1 == path2 and (i1 < i2 < j1 < j2 or i2 < i1 < j2 < j1):
        seq = dict(_sequences(w))[path1]
        first_left = i1 < i2
        lo, mid1, mid2, hi = (i1, i2, j1, j2) if first_left else (i2, i1, j2, j1)
        q = _context_for(w, path1, lo, hi)
        return Relation(
            "intersecting",
            {
                "q": q,
                "a": Word._raw(seq[lo:mid1]),
                "b": Word._raw(seq[mid1:mid2]),
                "c": Word._raw(seq[mid2:hi]),
                "first_left": first_left,
            },
        )

    # disjoint: cut both runs out of w
    first_pos, second_pos = ((path1, i1, j1, 1), (path2, i2, j2, 2))
    # replace the later-in-sequence run first so indices stay valid when the
    # two runs share a sequence
    order = sorted([first_pos, second_pos], key=lambda t: (t[0], t[1]), reverse=True)
    skel = w
    for path, i, j, k in order:
        skel = _replace_run(skel, path, i, j, (Hole(k),))
    return Relation("separated", {"p": MultiContext(skel, 2), "a": p1.subword, "b": p2.subword})


# ---------------------------------------------------------------------------
# text


class ParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


_TOKEN_RE = re.compile(r"\s*(?:(\[)|(\])|([A-Za-z][A-Za-z0-9_]*)|(1(?![0-9]))|(\*[0-9]*))")


def _tokenize(text: str, holes: bool):
    pos = 0
    out = []
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastindex)
        if m.group(1):
            out.append(("[", start))
        elif m.group(2):
            out.append(("]", start))
        elif m.group(3):
            out.append(("id", start, m.group(3)))
        elif m.group(4):
            out.append(("one", start))
        else:
            if not holes:
                raise ParseError("holes are not allowed here", start)
            idx = m.group(5)[1:]
            out.append(("hole", start, int(idx) if idx else 0))
        pos = m.end()
    return out


def _parse_tokens(tokens, text_len, alphabet, holes):
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def parse_word(closing):
        nonlocal pos
        tok = peek()
        if tok is not None and tok[0] == "one":
            pos += 1
            nxt = peek()
            if nxt is not None and not (closing and nxt[0] == "]"):
                raise ParseError("'1' must stand alone", nxt[1])
            return ONE
        factors = []
        while True:
            tok = peek()
            if tok is None or tok[0] == "]":
                break
            if tok[0] == "[":
                pos += 1
                inner = parse_word(True)
                close = peek()
                if close is None or close[0] != "]":
                    raise ParseError("expected ']'", close[1] if close else text_len)
                pos += 1
                factors.append(Bracket(inner))
            elif tok[0] == "id":
                name = tok[2]
                if alphabet is not None and name not in alphabet:
                    raise ParseError(f"unknown letter {name!r}", tok[1])
                factors.append(name)
                pos += 1
            elif tok[0] == "hole":
                factors.append(Hole(tok[2]))
                pos += 1
            else:
                raise ParseError("'1' must stand alone", tok[1])
        if not factors:
            where = peek()[1] if peek() else text_len
            raise ParseError("empty word (write 1 for the identity)", where)
        return Word._raw(tuple(factors))

    w = parse_word(False)
    if pos != len(tokens):
        raise ParseError("unbalanced ']'", tokens[pos][1])
    return w


def parse(text: str, alphabet: Iterable[str] | None = None) -> Word:
    """Parse a word.  With ``alphabet`` given, unknown letters are errors."""
    alpha = set(alphabet) if alphabet is not None else None
    tokens = _tokenize(text, holes=False)
    if not tokens:
        raise ParseError("empty input", 0)
    return _parse_tokens(tokens, len(text), alpha, holes=False)


def parse_context(text: str, alphabet: Iterable[str] | None = None) -> Context | MultiContext:
    """Parse a word containing ``*`` (single hole) or ``*1 .. *k``."""
    alpha = set(alphabet) if alphabet is not None else None
    tokens = _tokenize(text, holes=True)
    if not tokens:
        raise ParseError("empty input", 0)
    w = _parse_tokens(tokens, len(text), alpha, holes=True)
    if w.holes() == [0]:
        return Context(w)
    return MultiContext(w)


def to_text(w: Word) -> str:
    if not w.factors:
        return "1"
    parts = []
    prev_letter = False
    for f in w.factors:
        if isinstance(f, Bracket):
            parts.append("[" + to_text(f.inner) + "]")
            prev_letter = False
        else:
            s = f if isinstance(f, str) else ("*" if f.index == 0 else f"*{f.index}")
            if prev_letter:
                parts.append(" ")
            parts.append(s)
            prev_letter = True
    return "".join(parts)


# ---------------------------------------------------------------------------
# enumeration


@lru_cache(maxsize=None)
def _factors_of_size(alphabet: tuple, n: int) -> tuple:
    if n == 1:
        return alphabet + (Bracket(ONE),)
    return tuple(Bracket(w) for w in words_of_size(alphabet, n - 1))


@lru_cache(maxsize=None)
def words_of_size(alphabet: tuple, n: int) -> tuple:
    """All words of size exactly ``n``, ordered by first-factor size, then
    factor order, then the remainder recursively."""
    if n == 0:
        return (ONE,)
    out = []
    for k in range(1, n + 1):
        rests = words_of_size(alphabet, n - k)
        for f in _factors_of_size(alphabet, k):
            for rest in rests:
                out.append(Word._raw((f,) + rest.factors))
    return tuple(out)


def enumerate_words(alphabet: Iterable[str], max_size: int) -> list[Word]:
    """All words of size <= ``max_size``, each once, by size."""
    if max_size < 0:
        raise ValueError("max_size must be >= 0")
    alpha = tuple(alphabet)
    out = []
    for n in range(max_size + 1):
        out.extend(words_of_size(alpha, n))
    return out


def _factor_key(f):
    if isinstance(f, Bracket):
        return (0, structural_key(f.inner))
    if isinstance(f, str):
        return (1, f)
    return (2, f.index)


def structural_key(w: Word) -> tuple:
    """A fixed total order on words, independent of any monomial order."""
    return (w.size, tuple(_factor_key(f) for f in w.factors))


def iter_factor_runs(w: Word) -> Iterator[tuple[tuple, int, int]]:
    """(path, i, j) for every non-empty run, in placement order."""
    for path, seq in _sequences(w):
        n = len(seq)
        for i in range(n):
            for j in range(i + 1, n + 1):
                yield path, i, j
