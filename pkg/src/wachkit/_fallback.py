"""Pure-Python kernels for truncated series arithmetic over Z/p^N.

Series are plain lists of canonical residues in [0, pn), index k holding the
coefficient of X^k.  These functions are the portable twins of the compiled
routines in ``_speedups``; they work for any modulus (arbitrary-size Python
ints) and are selected automatically when the extension is unavailable or the
modulus exceeds the 64-bit fast path.
"""

from __future__ import annotations


def series_mul(a: list, b: list, pn: int, out_len: int) -> list:
    """Truncated product of coefficient lists a, b modulo pn."""
    la, lb = len(a), len(b)
    out = [0] * out_len
    for i in range(min(la, out_len)):
        ai = a[i]
        if ai == 0:
            continue
        top = min(lb, out_len - i)
        for j in range(top):
            bj = b[j]
            if bj:
                out[i + j] = (out[i + j] + ai * bj) % pn
    return out


def series_compose(f: list, g: list, pn: int, out_len: int) -> list:
    """Horner evaluation f(g(X)) truncated to out_len; requires g[0] == 0."""
    if not f:
        return [0] * out_len
    out = [0] * out_len
    out[0] = f[-1] % pn
    for k in range(len(f) - 2, -1, -1):
        out = series_mul(out, g, pn, out_len)
        out[0] = (out[0] + f[k]) % pn
    return out
