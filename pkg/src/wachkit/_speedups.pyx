# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for truncated series arithmetic over Z/p^N.

Same contracts as ``_fallback``; coefficients must fit the 64-bit fast path
(modulus below 2^63, enforced by the dispatcher via MOD_LIMIT).  Products are
taken through a 128-bit intermediate, so no modulus/coefficient combination in
range can overflow.
"""

from libc.stdlib cimport malloc, free

cdef extern from *:
    ctypedef unsigned long long u128 "unsigned __int128"

MOD_LIMIT = 1 << 63

ctypedef unsigned long long u64


cdef u64* _to_buf(list xs, Py_ssize_t n) except NULL:
    cdef u64* buf = <u64*> malloc(n * sizeof(u64))
    if buf == NULL:
        raise MemoryError()
    cdef Py_ssize_t i
    for i in range(n):
        buf[i] = <u64> xs[i]
    return buf


cdef void _mul_into(u64* a, Py_ssize_t la, u64* b, Py_ssize_t lb,
                    u64 pn, u64* out, Py_ssize_t lo) noexcept nogil:
    cdef Py_ssize_t i, j, top
    cdef u64 ai, acc
    for i in range(lo):
        out[i] = 0
    cdef Py_ssize_t imax = la if la < lo else lo
    for i in range(imax):
        ai = a[i]
        if ai == 0:
            continue
        top = lb if lb < lo - i else lo - i
        for j in range(top):
            if b[j] != 0:
                acc = out[i + j] + <u64>((<u128> ai * b[j]) % pn)
                if acc >= pn:
                    acc -= pn
                out[i + j] = acc


def series_mul(list a, list b, pn, out_len):
    """Truncated product of coefficient lists a, b modulo pn."""
    cdef Py_ssize_t la = len(a), lb = len(b), lo = out_len
    cdef u64 m = <u64> pn
    cdef u64* pa = _to_buf(a, la)
    cdef u64* pb = NULL
    cdef u64* po = NULL
    try:
        pb = _to_buf(b, lb)
        po = <u64*> malloc(lo * sizeof(u64))
        if po == NULL:
            raise MemoryError()
        with nogil:
            _mul_into(pa, la, pb, lb, m, po, lo)
        return [po[i] for i in range(lo)]
    finally:
        free(pa)
        if pb != NULL:
            free(pb)
        if po != NULL:
            free(po)


def series_compose(list f, list g, pn, out_len):
    """Horner evaluation f(g(X)) truncated to out_len; requires g[0] == 0."""
    cdef Py_ssize_t lf = len(f), lg = len(g), lo = out_len
    cdef u64 m = <u64> pn
    if lf == 0:
        return [0] * out_len
    cdef u64* pg = _to_buf(g, lg)
    cdef u64* cur = NULL
    cdef u64* nxt = NULL
    cdef Py_ssize_t i, k
    try:
        cur = <u64*> malloc(lo * sizeof(u64))
        nxt = <u64*> malloc(lo * sizeof(u64))
        if cur == NULL or nxt == NULL:
            raise MemoryError()
        with nogil:
            for i in range(lo):
                cur[i] = 0
        cur[0] = <u64> (f[lf - 1] % pn)
        for k in range(lf - 2, -1, -1):
            with nogil:
                _mul_into(cur, lo, pg, lg, m, nxt, lo)
            cur, nxt = nxt, cur
            cur[0] = <u64> ((cur[0] + <u64> (f[k] % pn)) % m)
        return [cur[i] for i in range(lo)]
    finally:
        free(pg)
        if cur != NULL:
            free(cur)
        if nxt != NULL:
            free(nxt)
