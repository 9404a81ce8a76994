from __future__ import annotations

from fractions import Fraction

from hypothesis import strategies as st

from opal.poly import Poly
from opal.terms import Bracket, Word

LETTERS = ("z1", "z2")


def words(letters=LETTERS, max_leaves=6):
    """Random bracketed words, including the identity and empty brackets."""
    factor = st.recursive(
        st.sampled_from(letters) | st.just(Bracket(Word())),
        lambda inner: st.lists(inner, min_size=1, max_size=3).map(lambda fs: Bracket(Word(fs))),
        max_leaves=max_leaves,
    )
    return st.lists(factor, max_size=3).map(Word)


coeffs = st.one_of(
    st.integers(-5, 5),
    st.builds(Fraction, st.integers(-5, 5), st.integers(1, 4)),
)


def polys(letters=LETTERS, max_terms=4):
    return st.lists(st.tuples(words(letters, 4), coeffs), max_size=max_terms).map(Poly)


# criterion number -> (passed, detail); filled by the acceptance suite
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
