"""Compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--Q 2000] [--repeat 3]

Each row times one workload on both backends (best of ``--repeat``) and
checks that the two results agree before reporting the speedup.
"""

import argparse
import sys
import time
from fractions import Fraction

import numpy as np

from nearcurve import _backend
from nearcurve.counting import count
from nearcurve.curves import standard_curves
from nearcurve.harmonic import curve_sequence, exp_sum, oscillatory_integral, weyl_sums


def best_of(fn, repeat):
    times, out = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def workloads(Q):
    curves = standard_curves()
    par, circ = curves["parabola"], curves["circle-arc"]
    sample = curve_sequence(par, max(Q // 10, 10))
    return [
        ("count raw float (parabola)", lambda b: count(par, Q, 0.2137, "raw", backend=b).count),
        ("count reduced exact (parabola)",
         lambda b: count(par, Q, Fraction(1, 5), "reduced", backend=b).count),
        ("count tilde float (circle-arc)", lambda b: count(circ, Q, 0.17, "tilde", backend=b).count),
        ("curve_sequence exact", lambda b: curve_sequence(par, Q // 2, backend=b).values),
        ("exp_sum float, 200 q", lambda b: [exp_sum(circ, 3, q, backend=b) for q in range(1, 201)]),
        ("oscillatory_integral q=1e4", lambda b: oscillatory_integral(par, 1, 3, 10_000, backend=b)),
        ("weyl_sums K=200", lambda b: weyl_sums(sample, 200, backend=b)),
    ]


def same(a, b):
    if isinstance(a, (int, np.integer)):
        return a == b
    return np.allclose(np.asarray(a), np.asarray(b), rtol=1e-9, atol=1e-9)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--Q", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if _backend.compiled is None:
        print("compiled kernels are not built; nothing to compare", file=sys.stderr)
        return 1
    print(f"{'workload':34s} {'cython s':>10s} {'python s':>10s} {'speedup':>8s}  agree")
    ok = True
    for name, fn in workloads(args.Q):
        tc, rc = best_of(lambda: fn("cython"), args.repeat)
        tp, rp = best_of(lambda: fn("python"), args.repeat)
        agree = same(rc, rp)
        ok &= agree
        print(f"{name:34s} {tc:10.4f} {tp:10.4f} {tp / tc:8.1f}  {agree}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
