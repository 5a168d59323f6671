"""Kernel dispatch: compiled fast path when available, pure Python otherwise.

The compiled extension handles moduli below 2^63 (products go through a
128-bit intermediate).  Larger moduli, a missing extension, or the
``WACHKIT_PURE=1`` environment variable route to the pure-Python fallback.
Both backends implement identical contracts and are cross-checked in the test
suite.
"""

from __future__ import annotations

import os

from . import _fallback

try:  # pragma: no cover - exercised indirectly
    from . import _speedups  # type: ignore[attr-defined]

    _HAVE_SPEEDUPS = True
    _MOD_LIMIT = _speedups.MOD_LIMIT
except ImportError:  # pragma: no cover
    _speedups = None
    _HAVE_SPEEDUPS = False
    _MOD_LIMIT = 0


def _use_compiled(pn: int) -> bool:
    if not _HAVE_SPEEDUPS or pn >= _MOD_LIMIT:
        return False
    return os.environ.get("WACHKIT_PURE", "") != "1"


def backend_name(pn: int) -> str:
    """Name of the backend that will serve a given modulus."""
    return "compiled" if _use_compiled(pn) else "pure"


def series_mul(a: list, b: list, pn: int, out_len: int) -> list:
    if _use_compiled(pn):
        return _speedups.series_mul(a, b, pn, out_len)
    return _fallback.series_mul(a, b, pn, out_len)


def series_compose(f: list, g: list, pn: int, out_len: int) -> list:
    if _use_compiled(pn):
        return _speedups.series_compose(f, g, pn, out_len)
    return _fallback.series_compose(f, g, pn, out_len)
