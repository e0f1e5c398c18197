"""Compare the compiled and pure-Python Q(i) kernels.

Usage: python benchmarks/bench_kernels.py [--repeat N] [--json]

Times raw ``gauss_matmul`` on dense random matrices, then an end-to-end run of
``unitriangular_factor_sp`` on random Sp4 matrices with each backend swapped in.
"""

import argparse
import json
import random
import sys
import timeit

from sympfact import kernels
from sympfact.randgen import rand_scalar, rand_sp
from sympfact.spfact import unitriangular_factor_sp


def available_backends():
    out = {"python": kernels.backend_module("python")}
    try:
        out["cython"] = kernels.backend_module("cython")
    except ImportError:
        pass
    return out


def bench_matmul(mod, size, repeat, rng):
    A = [rand_scalar(rng, 1000, 1000) for _ in range(size * size)]
    B = [rand_scalar(rng, 1000, 1000) for _ in range(size * size)]
    number = max(1, 2000 // size ** 2)
    t = min(timeit.repeat(lambda: mod.gauss_matmul(A, B, size, size, size),
                          number=number, repeat=repeat))
    return t / number


def bench_factor(mod, count, repeat):
    mats = [rand_sp(random.Random(k), 2, 10) for k in range(count)]
    saved = kernels.gauss_matmul, kernels.gauss_is_identity
    kernels.gauss_matmul, kernels.gauss_is_identity = mod.gauss_matmul, mod.gauss_is_identity
    try:
        return min(timeit.repeat(lambda: [unitriangular_factor_sp(M) for M in mats],
                                 number=1, repeat=repeat))
    finally:
        kernels.gauss_matmul, kernels.gauss_is_identity = saved


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--json", action="store_true", help="print results as JSON")
    args = p.parse_args(argv)
    backends = available_backends()
    if "cython" not in backends:
        print("compiled kernels not built; timing the Python backend only", file=sys.stderr)
    rows = []
    for size in (2, 4, 8, 16):
        rec = {"case": f"matmul {size}x{size}"}
        for name, mod in backends.items():
            rec[name] = bench_matmul(mod, size, args.repeat, random.Random(size))
        rows.append(rec)
    rec = {"case": "factor 20 x Sp4"}
    for name, mod in backends.items():
        rec[name] = bench_factor(mod, 20, args.repeat)
    rows.append(rec)
    if args.json:
        print(json.dumps(rows, indent=2))
        return 0
    print(f"{'case':<18}{'python (s)':>14}{'cython (s)':>14}{'speedup':>10}")
    for r in rows:
        py, cy = r["python"], r.get("cython")
        cy_s = f"{cy:14.2e}" if cy is not None else f"{'n/a':>14}"
        sp = f"{py / cy:9.2f}x" if cy else f"{'':>10}"
        print(f"{r['case']:<18}{py:14.2e}{cy_s}{sp}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
