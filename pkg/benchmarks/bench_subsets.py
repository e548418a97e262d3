"""Compare the compiled and NumPy subset kernels, and an end-to-end sweep.

Usage: ``python benchmarks/bench_subsets.py [--repeat R]``.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from framekit import _kernels
from framekit.subsets import combinations_array

CASES = [(3, 8, 3), (4, 10, 4), (4, 12, 6), (6, 12, 6), (6, 14, 8)]


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def kernel_table(repeat):
    rng = np.random.default_rng(0)
    have_c = "cython" in _kernels.available_backends()
    if have_c:
        from framekit._kernels import _csubsets
    print(f"{'d':>3} {'N':>3} {'k':>3} {'blocks':>7} {'python':>10} {'cython':>10} "
          f"{'jacobi':>10} {'lapack':>10} {'speedup':>8}")
    for d, n, k in CASES:
        A = np.ascontiguousarray(rng.standard_normal((d, n)) + 1j * rng.standard_normal((d, n)))
        S = combinations_array(n, k)
        tp = best(lambda: _kernels.subset_singular_extremes(A, S, backend="python"), repeat)
        row = f"{d:>3} {n:>3} {k:>3} {len(S):>7} {tp * 1e3:>8.2f}ms"
        if have_c:
            tc = best(lambda: _kernels.subset_singular_extremes(A, S, backend="cython"), repeat)
            tj = best(lambda: _csubsets.subset_singular_extremes(A, S, method="jacobi"), repeat)
            tl = best(lambda: _csubsets.subset_singular_extremes(A, S, method="lapack"), repeat)
            row += f" {tc * 1e3:>8.2f}ms {tj * 1e3:>8.2f}ms {tl * 1e3:>8.2f}ms {tp / tc:>7.1f}x"
        print(row)


SWEEP = (
    "import time; from framekit.verify import run_suite; t = time.perf_counter(); "
    "[run_suite(n, 0) for n in ('mrc-duality', 'unitary-invariance', 'excess-robustness')]; "
    "print(time.perf_counter() - t)"
)


def sweep(pure):
    env = dict(os.environ)
    env.pop("FRAMEKIT_PURE_PYTHON", None)
    if pure:
        env["FRAMEKIT_PURE_PYTHON"] = "1"
    out = subprocess.run([sys.executable, "-c", SWEEP], env=env, capture_output=True,
                         text=True, check=True)
    return float(out.stdout.strip())


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    print(f"backends: {', '.join(_kernels.available_backends())} (default {_kernels.BACKEND})\n")
    kernel_table(args.repeat)
    print("\nsuite sweep (mrc-duality, unitary-invariance, excess-robustness):")
    tp = sweep(pure=True)
    print(f"  python {tp:.2f}s")
    if "cython" in _kernels.available_backends():
        tc = sweep(pure=False)
        print(f"  cython {tc:.2f}s ({tp / tc:.1f}x)")


if __name__ == "__main__":
    main()
