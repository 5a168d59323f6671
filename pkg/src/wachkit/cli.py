"""Command-line front end.

Subcommands: build, verify, reduce, tensor, normalize, roundtrip.  Inputs are
the JSON formats of :mod:`wachkit.serialize`; outputs are canonical JSON
(identical inputs and flags give byte-identical files).  Exit codes: 0 all
checks pass, 1 parse/schema error, 2 validation error, 3 convergence failure,
4 axiom or check failure.
"""

from __future__ import annotations

import argparse
import sys

from .cyclo import get_context
from .errors import (
    AxiomViolation,
    InvalidInput,
    NoConvergence,
    NotCongruent,
    NotDivisible,
    NotInS0,
    PrecisionExhausted,
    SchemaError,
    ValidationFailed,
    WachkitError,
    WeightOverflow,
)
from .flmod import tensor_fl
from .reduction import normalize_basis, recover_filtration, roundtrip_check
from .serialize import (
    dumps_canonical,
    fl_from_dict,
    fl_to_dict,
    load_json,
    report_to_dict,
    wach_from_dict,
    wach_to_dict,
    _smat_from_json,
    _smat_to_json,
)
from .suite import generate_suite
from .wach import solve_wach, tensor_wach, verify_wach_axioms

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_VALIDATION = 2
EXIT_CONVERGENCE = 3
EXIT_CHECK = 4


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _context_for(data: dict, args) -> "object":
    p = int(data["p"])
    N = args.prec_p or int(data["N"])
    m_pi0 = args.prec_pi0 or N
    chi = args.chi_gamma
    return get_context(p, N, m_pi0, chi)


def _cmd_build(args) -> int:
    data = load_json(args.input)
    m = fl_from_dict(data)
    if args.prec_p:
        m = fl_from_dict({**data, "N": args.prec_p})
    ctx = _context_for(data, args)
    w = solve_wach(m, ctx, max_iter=args.max_iter)
    _emit(dumps_canonical(wach_to_dict(w)), args.out)
    return EXIT_OK


def _cmd_verify(args) -> int:
    w = wach_from_dict(load_json(args.input))
    report = verify_wach_axioms(w)
    payload = report_to_dict(
        [(c.name, c.ok, c.detail) for c in report.checks], seed=args.seed
    )
    _emit(dumps_canonical(payload), args.out)
    return EXIT_OK if report.ok else EXIT_CHECK


def _cmd_reduce(args) -> int:
    data = load_json(args.input)
    kind = data.get("kind")
    if kind == "fl":
        m = fl_from_dict(data)
        ctx = _context_for(data, args)
        w = solve_wach(m, ctx, max_iter=args.max_iter)
        h_max = m.h
    elif kind == "wach":
        w = wach_from_dict(data)
        h_max = args.h_max if args.h_max is not None else max(w.weights, default=0)
    else:
        raise SchemaError("reduce expects an 'fl' or 'wach' input")
    if args.h_max is not None:
        h_max = args.h_max
    red = recover_filtration(w, h_max)
    payload = {
        "kind": "reduction",
        "fil_ranks": list(red.fil_ranks),
        "weights": list(red.weights_recovered),
        "A_recovered": [
            [str(x) for x in red.A_recovered.row(i)] for i in range(red.d)
        ],
        "adapted_basis": [
            [str(x) for x in red.adapted_basis.row(i)] for i in range(red.d)
        ],
        "fil_generators": [
            [[str(x) for x in lat.row(i)] for i in range(lat.rows)]
            for lat in red.fil_generators
        ],
    }
    _emit(dumps_canonical(payload), args.out)
    return EXIT_OK


def _cmd_tensor(args) -> int:
    d1 = load_json(args.inputs[0])
    d2 = load_json(args.inputs[1])
    kinds = (d1.get("kind"), d2.get("kind"))
    if kinds == ("fl", "fl"):
        m = tensor_fl(fl_from_dict(d1), fl_from_dict(d2))
        _emit(dumps_canonical(fl_to_dict(m)), args.out)
    elif kinds == ("wach", "wach"):
        w = tensor_wach(wach_from_dict(d1), wach_from_dict(d2))
        _emit(dumps_canonical(wach_to_dict(w)), args.out)
    else:
        raise SchemaError("tensor expects two 'fl' files or two 'wach' files")
    return EXIT_OK


def _cmd_normalize(args) -> int:
    data = load_json(args.input)
    if data.get("kind") != "perturbed":
        raise SchemaError("normalize expects a 'perturbed' input")
    m = fl_from_dict(data["fl"], where="perturbed.fl")
    ctx = _context_for(data["fl"], args)
    C_pert = _smat_from_json(data["C"], m.p, ctx.N, "perturbed.C")
    P = normalize_basis(C_pert, m, ctx, max_iter=args.max_iter)
    payload = {
        "kind": "base_change",
        "P": _smat_to_json(P),
        "checks": [{"name": "residual_zero", "pass": True, "detail": ""}],
    }
    _emit(dumps_canonical(payload), args.out)
    return EXIT_OK


def _cmd_roundtrip(args) -> int:
    if args.generate:
        primes = tuple(int(x) for x in args.primes.split(","))
        modules = generate_suite(
            args.seed, primes=primes, count=args.count, max_rank=args.max_rank
        )
    else:
        if not args.input:
            raise SchemaError("roundtrip needs -i FILE or --generate")
        modules = [fl_from_dict(load_json(args.input))]
    checks = []
    all_ok = True
    for idx, m in enumerate(modules):
        ctx = get_context(m.p, m.N, args.prec_pi0 or m.N, args.chi_gamma)
        rep = roundtrip_check(m, ctx, seed=args.seed + idx)
        ok = rep.ok
        all_ok = all_ok and ok
        detail = "; ".join(f"{n}:{'ok' if o else 'FAIL ' + d}" for n, o, d in rep.checks)
        checks.append(
            (f"module_{idx}_p{m.p}_d{m.rank}", ok, detail)
        )
    _emit(dumps_canonical(report_to_dict(checks, seed=args.seed)), args.out)
    return EXIT_OK if all_ok else EXIT_CHECK


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="wachkit",
        description="Exact (phi, Gamma)-module construction and verification over Z/p^N",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, needs_input=True):
        if needs_input:
            sp.add_argument("-i", "--input", required=True, help="input JSON file")
        sp.add_argument("--out", help="output path (default: stdout)")
        sp.add_argument("--prec-p", type=int, help="override p-adic precision N")
        sp.add_argument("--prec-pi0", type=int, help="override series order M_pi0")
        sp.add_argument("--chi-gamma", type=int, help="override chi(gamma), default 1+p")
        sp.add_argument("--max-iter", type=int, help="iteration budget override")
        sp.add_argument("--seed", type=int, default=0, help="seed for randomized checks")

    common(sub.add_parser("build", help="solve the (phi, Gamma)-matrices of a module"))
    common(sub.add_parser("verify", help="check the structural axioms of a solved file"))
    rp = sub.add_parser("reduce", help="reduce mod pi0 and recover the filtration")
    common(rp)
    rp.add_argument("--h-max", type=int, help="largest filtration step to recover")
    tp = sub.add_parser("tensor", help="tensor two modules")
    tp.add_argument("inputs", nargs=2, help="two input JSON files")
    tp.add_argument("--out", help="output path (default: stdout)")
    tp.add_argument("--prec-p", type=int)
    tp.add_argument("--prec-pi0", type=int)
    tp.add_argument("--chi-gamma", type=int)
    tp.add_argument("--max-iter", type=int)
    tp.add_argument("--seed", type=int, default=0)
    common(sub.add_parser("normalize", help="solve the basis-normalization recursion"))
    rt = sub.add_parser("roundtrip", help="build, reduce and recognize; report pass/fail")
    rt.add_argument("-i", "--input", help="input FL JSON file")
    rt.add_argument("--generate", action="store_true", help="generate a seeded suite instead")
    rt.add_argument("--count", type=int, default=30)
    rt.add_argument("--primes", default="3,5,7")
    rt.add_argument("--max-rank", type=int, default=3)
    rt.add_argument("--out", help="output path (default: stdout)")
    rt.add_argument("--prec-p", type=int)
    rt.add_argument("--prec-pi0", type=int)
    rt.add_argument("--chi-gamma", type=int)
    rt.add_argument("--max-iter", type=int)
    rt.add_argument("--seed", type=int, default=0)
    return ap


_HANDLERS = {
    "build": _cmd_build,
    "verify": _cmd_verify,
    "reduce": _cmd_reduce,
    "tensor": _cmd_tensor,
    "normalize": _cmd_normalize,
    "roundtrip": _cmd_roundtrip,
}


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ValidationFailed, WeightOverflow, InvalidInput, NotInS0) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (NoConvergence,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (AxiomViolation, NotCongruent, NotDivisible, PrecisionExhausted) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except WachkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
