"""Compare the compiled and pure-Python modular rank kernels.

Matrices are the one-step relation matrices built by the truncated-ideal
check, so the benchmark measures the workload the kernels actually see.

    python benchmarks/bench_rank.py --repeat 3
"""

from __future__ import annotations

import argparse
import statistics
import time

from opal import _rank_py, linalg
from opal.gsbasis import _closure, _columns, _to_sparse, ideal_rows
from opal.opi import catalog
from opal.orders import op_deg_lex
from opal.rewrite import RewriteSystem
from opal.terms import enumerate_words

try:
    from opal import _rankcore
except ImportError:  # extension not built
    _rankcore = None

CASES = [
    ("modified-rb(1), z, n=6", "modified-rb", {"lambda": 1}, ["z"], 6),
    ("rota-baxter(1), z1 z2, n=5", "rota-baxter", {"lambda": 1}, ["z1", "z2"], 5),
    ("averaging case1, z1 z2, n=6", "averaging", {"orientation": "case1"}, ["z1", "z2"], 6),
    ("nijenhuis, z1 z2, n=6", "nijenhuis", {}, ["z1", "z2"], 6),
]


def relation_matrix(name, params, letters, n):
    entry = catalog(name, **params)
    order = op_deg_lex(letters) if entry.order_family else None
    sys = RewriteSystem(entry.rules, letters, order)
    words = _closure(sys, enumerate_words(letters, n))
    cols = _columns(sys, words)
    rows = _to_sparse(ideal_rows(sys, words), cols)
    return rows, len(cols)


def timed(fn, repeat):
    out, times = None, []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return out, statistics.median(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--prime", type=int, default=linalg.DEFAULT_PRIME)
    ap.add_argument("--rational", action="store_true", help="also time exact rational elimination")
    args = ap.parse_args(argv)

    print(f"{'matrix':<30} {'rows':>7} {'cols':>7} {'rank':>7} {'python s':>9} {'cython s':>9} {'speedup':>8}"
          + (f" {'exact s':>8}" if args.rational else ""))
    for label, name, params, letters, n in CASES:
        rows, ncols = relation_matrix(name, params, letters, n)
        packed, _ = linalg.pack_rows(rows, args.prime)
        r_py, t_py = timed(lambda: _rank_py.rank_mod_p(packed, ncols, args.prime), args.repeat)
        if _rankcore is not None:
            r_cy, t_cy = timed(lambda: _rankcore.rank_mod_p(packed, ncols, args.prime), args.repeat)
            if r_cy != r_py:
                raise SystemExit(f"{label}: kernels disagree ({r_py} vs {r_cy})")
            cy, speed = f"{t_cy:9.3f}", f"{t_py / t_cy:7.1f}x"
        else:
            cy, speed = f"{'-':>9}", f"{'-':>8}"
        line = f"{label:<30} {len(rows):>7} {ncols:>7} {r_py:>7} {t_py:9.3f} {cy} {speed}"
        if args.rational:
            _, t_q = timed(lambda: linalg.rank_rational(rows), 1)
            line += f" {t_q:8.3f}"
        print(line)
    if _rankcore is None:
        print("compiled kernel not built; run `pip install -e . --no-build-isolation`")


if __name__ == "__main__":
    main()
