# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled sparse rank over GF(p)."""

from array import array
from libc.stdlib cimport calloc, free


def rank_mod_p(rows, Py_ssize_t ncols, long long p):
    """Same contract as ``opal._rank_py.rank_mod_p``."""
    if p <= 1 or p >= 2147483648:
        raise ValueError("p must be a prime below 2**31")
    cdef long long *acc = <long long *> calloc(ncols + 1, sizeof(long long))
    if acc == NULL:
        raise MemoryError()
    cdef list pivots = [None] * ncols
    cdef Py_ssize_t rank = 0, j, k, n, lo, hi, c
    cdef long long f, v, inv
    cdef long long[:] pc
    cdef long long[:] pv
    try:
        for cols, vals in rows:
            n = len(cols)
            if n == 0:
                continue
            lo = ncols
            hi = -1
            for k in range(n):
                c = cols[k]
                if c < 0 or c >= ncols:
                    raise IndexError("column out of range")
                v = vals[k] % p
                if v < 0:
                    v += p
                acc[c] = (acc[c] + v) % p
                if c < lo:
                    lo = c
                if c > hi:
                    hi = c
            # only columns in [lo, hi] can be nonzero; hi grows with pivots
            j = lo
            while j <= hi:
                if acc[j] != 0:
                    piv = pivots[j]
                    if piv is None:
                        inv = pow(acc[j], p - 2, p)
                        nc = array("q")
                        nv = array("q")
                        for k in range(j, hi + 1):
                            if acc[k] != 0:
                                nc.append(k)
                                nv.append((acc[k] * inv) % p)
                                acc[k] = 0
                        pivots[j] = (nc, nv)
                        rank += 1
                        break
                    pc = piv[0]
                    pv = piv[1]
                    f = acc[j]
                    if pc[pc.shape[0] - 1] > hi:
                        hi = pc[pc.shape[0] - 1]
                    for k in range(pc.shape[0]):
                        c = pc[k]
                        acc[c] = (acc[c] - f * pv[k]) % p
                        if acc[c] < 0:
                            acc[c] += p
                j += 1
    finally:
        free(acc)
    return rank
