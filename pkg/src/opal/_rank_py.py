"""Pure-Python sparse rank over GF(p); the fallback for the compiled core."""

from __future__ import annotations


def rank_mod_p(rows, ncols: int, p: int) -> int:
    """Rank of sparse rows over GF(p).

    ``rows`` is a sequence of ``(cols, vals)`` pairs with ``0 <= col < ncols``.
    Column 0 is treated as the leading column.
    """
    pivots: dict = {}
    rank = 0
    for cols, vals in rows:
        row = {}
        for c, v in zip(cols, vals):
            v %= p
            if v:
                row[c] = (row.get(c, 0) + v) % p
                if not row[c]:
                    del row[c]
        while row:
            j = min(row)
            piv = pivots.get(j)
            if piv is None:
                inv = pow(row[j], p - 2, p)
                pivots[j] = {c: (v * inv) % p for c, v in row.items()}
                rank += 1
                break
            f = row[j]
            for c, v in piv.items():
                x = (row.get(c, 0) - f * v) % p
                if x:
                    row[c] = x
                else:
                    row.pop(c, None)
    return rank
