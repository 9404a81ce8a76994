from __future__ import annotations

import json
import os
import subprocess
import sys

import pytest

from opal.cli import EXIT_EXHAUSTED, EXIT_FAIL, EXIT_OK, EXIT_USAGE, main


def run(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


class TestNF:
    def test_rota_baxter(self, capsys):
        rc, out, _ = run(capsys, "nf", "--opi", "rota-baxter", "--lambda", "1", "[z1][z2]")
        assert rc == EXIT_OK
        assert out.strip() == "[z1[z2]] + [[z1]z2] + [z1 z2]"

    def test_leibniz_trace(self, capsys):
        rc, out, _ = run(capsys, "nf", "--opi", "differential", "--lambda", "0", "--letters", "z1,z2,z3",
                         "--trace", "[z1 z2 z3]")
        lines = out.splitlines()
        assert rc == EXIT_OK and len(lines) > 1
        assert set(lines[0].split(" + ")) == {"[z1]z2 z3", "z1[z2]z3", "z1 z2[z3]"}

    def test_normal_input_echoed(self, capsys):
        rc, out, _ = run(capsys, "nf", "--opi", "rota-baxter", "--json", "z1[z2]")
        data = json.loads(out)
        assert rc == EXIT_OK and data["nf"] == "z1[z2]" and data["steps"] == []

    def test_parse_error(self, capsys):
        rc, _, err = run(capsys, "nf", "--opi", "rota-baxter", "[z1")
        assert rc == EXIT_USAGE and "error" in err

    def test_fuel_exhausted(self, capsys):
        rc, out, _ = run(capsys, "nf", "--opi", "reynolds", "--order", "none", "--fuel", "20", "[z1][z2]")
        assert rc == EXIT_EXHAUSTED and "fuel exhausted" in out

    def test_reynolds_rejected_under_order(self, capsys):
        rc, _, err = run(capsys, "nf", "--opi", "reynolds", "[z1][z2]")
        assert rc == EXIT_USAGE

    def test_unknown_opi(self, capsys):
        rc, _, err = run(capsys, "nf", "--opi", "bogus", "z1")
        assert rc == EXIT_USAGE and "unknown OPI" in err

    def test_bad_flag(self, capsys):
        assert run(capsys, "nf", "--max-size", "-3", "z1")[0] == EXIT_USAGE
        assert run(capsys, "confluence", "--max-size", "-1")[0] == EXIT_USAGE


class TestVerdicts:
    def test_empty_system_confluent(self, capsys):
        rc, out, _ = run(capsys, "confluence", "--max-size", "3")
        assert rc == EXIT_OK and out.startswith("confluent-up-to-bound")

    def test_averaging_counterexample(self, capsys):
        rc, out, _ = run(capsys, "confluence", "--system", "averaging", "--orientation", "case1",
                         "--max-size", "7", "--json")
        data = json.loads(out)
        assert rc == EXIT_FAIL and data["status"] == "counterexample"
        assert "[[z1][z2]]" in {c["word"] for c in data["counterexamples"]}
        rc2, _, _ = run(capsys, "confluence", "--system", "averaging", "--orientation", "case1",
                        "--max-size", "7", "--expect-fail")
        assert rc2 == EXIT_OK

    def test_nijenhuis(self, capsys):
        rc, out, _ = run(capsys, "confluence", "--opi", "nijenhuis", "--max-size", "6")
        assert rc == EXIT_OK, out

    def test_thm41(self, capsys):
        rc, out, _ = run(capsys, "thm41", "--opi", "modified-rb", "--lambda", "-1", "--max-inst", "2")
        assert rc == EXIT_OK
        assert "multilinear=True phi-normal=True cond1=True" in out and "cond2=True" in out

    def test_thm41_square_zero(self, capsys):
        rc, out, _ = run(capsys, "thm41", "--opi", "square-zero", "--letters", "x", "--json")
        data = json.loads(out)
        assert rc == EXIT_FAIL and data["cond2"] is False

    def test_gs(self, capsys):
        rc, out, _ = run(capsys, "gs", "--opi", "endomorphism", "--max-inst", "3")
        assert rc == EXIT_OK and out.startswith("gs-up-to-bound")

    def test_basis(self, capsys):
        rc, out, _ = run(capsys, "basis", "--opi", "modified-rb", "--max-size", "6", "--letters", "z", "--json")
        data = json.loads(out)
        assert rc == EXIT_OK
        assert len(data["irr"]) == 625 and all("][" not in w for w in data["irr"])
        assert [r["verdict"] for r in data["truncation"]] == ["pass"] * 7

    def test_text_and_json_agree(self, capsys):
        _, text, _ = run(capsys, "gs", "--opi", "rota-baxter", "--lambda", "1", "--letters", "z", "--max-inst", "2")
        _, js, _ = run(capsys, "gs", "--opi", "rota-baxter", "--lambda", "1", "--letters", "z", "--max-inst", "2",
                       "--json")
        assert text.split(":")[0] == json.loads(js)["status"]

    def test_opi_file(self, capsys, tmp_path):
        path = tmp_path / "nij.json"
        path.write_text(json.dumps({"name": "nij", "arity": 2, "order": "opdeglex",
                                    "pattern": "[x1][x2] - [x1[x2]] - [[x1]x2] + [[x1 x2]]",
                                    "orientation": "[x1][x2]"}))
        rc, out, _ = run(capsys, "confluence", "--opi-file", str(path), "--max-size", "5")
        assert rc == EXIT_OK


class TestReproduce:
    def test_thm_4_10(self, capsys):
        rc, out, _ = run(capsys, "reproduce", "thm-4.10")
        assert rc == EXIT_OK and "final polynomials equal: True; 9 monomials each" in out

    def test_cor_4_11_json(self, capsys):
        rc, out, _ = run(capsys, "reproduce", "cor-4.11", "--max-size", "3", "--json")
        data = json.loads(out)
        assert rc == EXIT_OK and data["ok"] and data["rows"][0]["irr"] == 1

    def test_unknown_target(self, capsys):
        assert run(capsys, "reproduce", "nope")[0] == EXIT_USAGE


def test_console_entry_point_and_backend_switch():
    env = dict(os.environ, OPAL_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import opal.kernels as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
    res = subprocess.run([sys.executable, "-m", "opal.cli", "nf", "--opi", "rota-baxter", "[z1][z2]"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == "[z1[z2]] + [[z1]z2]"
