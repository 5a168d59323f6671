"""JSON file formats (bit-exact, deterministic).

All integers serialize as decimal strings to avoid 64-bit ambiguity across
consumers; series are degree-ascending coefficient arrays; matrices are
row-major nested arrays.  Canonical output (sorted keys, two-space indent,
trailing newline) makes identical inputs produce byte-identical artifacts.

Schemas:

* FLModule:   {"kind": "fl", "p": int, "N": int, "weights": [int, ...],
               "A": [["dec", ...], ...], "labels": [str, ...]?}
* WachModule: {"kind": "wach", "p": int, "N": int, "M_pi0": int,
               "chi_gamma": "dec", "C": [[[coeff, ...], ...], ...],
               "G": like C, "meta": {"weights": [...], "iterations_used": n}}
* perturbed:  {"kind": "perturbed", "fl": FLModule, "C": like wach C}
* reports:    {"checks": [{"name": str, "pass": bool, "detail": str}, ...],
               "seed": int}
"""

from __future__ import annotations

import json

from .cyclo import get_context
from .errors import SchemaError
from .flmod import FLModule, make_fl
from .padic import PMatrix
from .series import PI0, TruncSeries
from .wach import SeriesMat, WachModule, smat


def dumps_canonical(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _need(data: dict, field: str, where: str):
    if field not in data:
        raise SchemaError(f"{where}: missing field {field!r}")
    return data[field]


def _as_int(value, where: str) -> int:
    try:
        return int(value)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{where}: expected a decimal integer, got {value!r}") from exc


def fl_to_dict(m: FLModule) -> dict:
    out = {
        "kind": "fl",
        "p": m.p,
        "N": m.N,
        "weights": list(m.weights),
        "A": [[str(x) for x in m.A.row(i)] for i in range(m.rank)],
    }
    if m.labels:
        out["labels"] = list(m.labels)
    return out


def fl_from_dict(data: dict, where: str = "fl") -> FLModule:
    if _need(data, "kind", where) != "fl":
        raise SchemaError(f"{where}: kind must be 'fl'")
    p = _as_int(_need(data, "p", where), f"{where}.p")
    N = _as_int(_need(data, "N", where), f"{where}.N")
    weights = _need(data, "weights", where)
    if not isinstance(weights, list) or not weights:
        raise SchemaError(f"{where}.weights: expected a nonempty list")
    rows = _need(data, "A", where)
    d = len(weights)
    if not isinstance(rows, list) or len(rows) != d or any(
        not isinstance(r, list) or len(r) != d for r in rows
    ):
        raise SchemaError(f"{where}.A: expected a {d}x{d} matrix")
    entries = tuple(
        _as_int(x, f"{where}.A[{i}][{j}]") for i, r in enumerate(rows) for j, x in enumerate(r)
    )
    A = PMatrix(d, d, entries, p, N)
    labels = data.get("labels")
    return make_fl(p, N, [_as_int(w, f"{where}.weights") for w in weights], A, labels)


def _smat_to_json(M: SeriesMat) -> list:
    return [[[str(c) for c in e.coeffs] for e in row] for row in M]


def _smat_from_json(data, p: int, N: int, where: str) -> SeriesMat:
    if not isinstance(data, list) or not data:
        raise SchemaError(f"{where}: expected a nonempty nested array")
    rows = []
    for i, row in enumerate(data):
        if not isinstance(row, list) or len(row) != len(data):
            raise SchemaError(f"{where}[{i}]: expected a square matrix of series")
        rows.append(
            [
                TruncSeries(
                    PI0,
                    p,
                    N,
                    tuple(_as_int(c, f"{where}[{i}][{j}]") for c in entry),
                )
                for j, entry in enumerate(row)
            ]
        )
    return smat(rows)


def wach_to_dict(w: WachModule) -> dict:
    return {
        "kind": "wach",
        "p": w.ctx.p,
        "N": w.ctx.N,
        "M_pi0": w.ctx.profile.M_pi0,
        "chi_gamma": str(w.ctx.chi_gamma),
        "C": _smat_to_json(w.C),
        "G": _smat_to_json(w.G),
        "meta": {
            "weights": list(w.weights),
            "iterations_used": w.iterations_used,
        },
    }


def wach_from_dict(data: dict, where: str = "wach") -> WachModule:
    if _need(data, "kind", where) != "wach":
        raise SchemaError(f"{where}: kind must be 'wach'")
    p = _as_int(_need(data, "p", where), f"{where}.p")
    N = _as_int(_need(data, "N", where), f"{where}.N")
    m_pi0 = _as_int(_need(data, "M_pi0", where), f"{where}.M_pi0")
    chi = _as_int(_need(data, "chi_gamma", where), f"{where}.chi_gamma")
    ctx = get_context(p, N, m_pi0, chi)
    C = _smat_from_json(_need(data, "C", where), p, N, f"{where}.C")
    G = _smat_from_json(_need(data, "G", where), p, N, f"{where}.G")
    meta = _need(data, "meta", where)
    weights = tuple(_as_int(x, f"{where}.meta.weights") for x in _need(meta, "weights", f"{where}.meta"))
    if len(weights) != len(C):
        raise SchemaError(f"{where}: weights length differs from matrix rank")
    iters = _as_int(meta.get("iterations_used", 0), f"{where}.meta.iterations_used")
    return WachModule(ctx=ctx, weights=weights, C=C, G=G, source=None, iterations_used=iters)


def report_to_dict(checks, seed: int | None = None) -> dict:
    out = {
        "checks": [
            {"name": name, "pass": bool(ok), "detail": detail}
            for (name, ok, detail) in checks
        ]
    }
    if seed is not None:
        out["seed"] = seed
    return out


def load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise SchemaError(f"{path}: no such file") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON at line {exc.lineno}") from exc
