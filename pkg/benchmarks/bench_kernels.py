"""Compare the compiled and pure-Python series kernels.

Usage: python benchmarks/bench_kernels.py [--repeat N]

Times truncated multiplication and Horner composition at the orders the
library actually uses (the guard orders of the default profiles), plus one
full context bootstrap and one rank-3 solve per backend.
"""

from __future__ import annotations

import argparse
import random
import time

from wachkit import _fallback
from wachkit.cyclo import build_context, guard_order
from wachkit.flmod import make_fl
from wachkit.series import default_pi_order
from wachkit.suite import random_unit_matrix
from wachkit.wach import solve_wach

try:
    from wachkit import _speedups
except ImportError:
    _speedups = None


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernels(repeat: int) -> None:
    rng = random.Random(0)
    for p in (3, 7, 13):
        pn = p**16
        order = default_pi_order(p, guard_order(p, 16, 16))
        a = [rng.randrange(pn) for _ in range(order)]
        b = [rng.randrange(pn) for _ in range(order)]
        g = [0] + [rng.randrange(pn) for _ in range(order - 1)]
        rows = [("pure", _fallback)]
        if _speedups is not None and pn < _speedups.MOD_LIMIT:
            rows.append(("compiled", _speedups))
        print(f"\np = {p}, modulus p^16, order {order}")
        for name, mod in rows:
            t_mul = _time(lambda: mod.series_mul(a, b, pn, order), repeat)
            t_comp = _time(lambda: mod.series_compose(a, g, pn, order), repeat)
            print(f"  {name:>8}: mul {t_mul * 1e3:8.2f} ms   compose {t_comp * 1e3:8.2f} ms")
        if len(rows) == 2:
            speed = _time(lambda: rows[1][1].series_compose(a, g, pn, order), repeat)
            base = _time(lambda: rows[0][1].series_compose(a, g, pn, order), repeat)
            print(f"  compose speedup: {base / speed:.1f}x")


def bench_pipeline() -> None:
    import os

    for forced, label in ((None, "auto"), ("1", "pure")):
        if forced is None:
            os.environ.pop("WACHKIT_PURE", None)
        else:
            os.environ["WACHKIT_PURE"] = forced
        rng = random.Random(1)
        t0 = time.perf_counter()
        ctx = build_context(5)
        t1 = time.perf_counter()
        m = make_fl(5, 16, (0, 1, 3), random_unit_matrix(rng, 3, 5, 16))
        solve_wach(m, ctx)
        t2 = time.perf_counter()
        print(f"{label:>8}: context(p=5) {t1 - t0:6.2f} s   rank-3 solve {t2 - t1:6.2f} s")
    os.environ.pop("WACHKIT_PURE", None)


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print("kernel backends:", "compiled available" if _speedups else "pure only")
    bench_kernels(args.repeat)
    print("\nend-to-end (fresh contexts; pure pass may take a while)")
    bench_pipeline()


if __name__ == "__main__":
    main()
