from __future__ import annotations

import copy
from fractions import Fraction

import pytest

from opal import reproduce as repro
from opal.reproduce import TARGETS, load_golden, reproduce, type_identity_instances


def test_golden_files_load():
    for t in TARGETS:
        assert load_golden(t)


def test_thm_4_10_default_weight():
    rep = reproduce("thm-4.10")
    assert rep.ok, rep.mismatches
    assert rep.data["terms"] == 9 and rep.data["left"] == rep.data["right"]


@pytest.mark.parametrize("lam", ["0", "-1", "2/3"])
def test_thm_4_10_other_weights(lam):
    rep = reproduce("thm-4.10", lam=Fraction(lam))
    assert rep.ok, rep.mismatches
    assert rep.data["terms"] == (5 if lam == "0" else 9)


def test_cor_4_11_small():
    rep = reproduce("cor-4.11", max_size=4)
    assert rep.ok, rep.mismatches
    assert [r["irr"] for r in rep.data["rows"]] == [1, 3, 8, 22, 64]
    assert rep.data["rows"][0]["rank"] == 0


@pytest.mark.slow
def test_prop_2_20_table():
    rep = reproduce("prop-2.20")
    assert rep.ok, rep.mismatches
    assert len(rep.data["rows"]) == 4
    case3 = rep.data["rows"][2]
    assert set(case3["normal_forms"][0]) == {"[z1][[z2]]", "[[z1]][z2]"}


@pytest.mark.slow
@pytest.mark.parametrize("target", ["ex-4.2", "ex-4.3"])
def test_examples(target):
    rep = reproduce(target)
    assert rep.ok, rep.mismatches
    assert all(r["identity_failures"] == 0 for r in rep.data["rows"])


def test_mismatch_is_reported(monkeypatch):
    real = load_golden("cor-4.11")
    bad = copy.deepcopy(real)
    bad["irr"][2] = 9
    monkeypatch.setattr(repro, "load_golden", lambda t: bad if t == "cor-4.11" else real)
    rep = reproduce("cor-4.11", max_size=3)
    assert not rep.ok
    assert rep.mismatches == ["n=2 irr count: expected 9, got 8"]


def test_unknown_target():
    with pytest.raises(ValueError):
        reproduce("thm-9.99")


def test_identity_instances_respect_domains():
    for u, v, w, _ in type_identity_instances("differential", {"lambda": 1}, ["z"], 2):
        assert not (u.is_one() or v.is_one() or w.is_one())
    n = sum(1 for _ in type_identity_instances("rota-baxter", {"lambda": 1}, ["z"], 1))
    assert n == 3 ** 3
