"""Time the compiled kernels against their numpy twins.

    python benchmarks/bench_kernels.py [--limit N] [--repeat R]

Prints one line per kernel with the best-of-R wall time for each backend and
the speedup of the compiled one.
"""
import argparse
import timeit

import numpy as np

from friable import kernels, sieves


def cases(limit):
    primes = sieves.primes_up_to(int(limit ** 0.5) + 1)
    t = sieves.build_tables(limit)
    lpf = np.ascontiguousarray(t.lpf[1:])
    rad = np.ascontiguousarray(t.radical[1:])
    lo = limit // 2
    return {
        "factor_window": lambda m: m.factor_window(lo, limit, primes),
        "psi_window": lambda m: m.psi_window(lo, limit, primes),
        "count_root_le (u=3)": lambda m: m.count_root_le(lpf, 1, 3.0),
        "count_root_le (u=2.7)": lambda m: m.count_root_le(lpf, 1, 2.7),
        "count_kernel_threshold": lambda m: m.count_kernel_threshold(rad, 1, 0.5, 0.3),
        "dickman_sum": lambda m: m.dickman_sum(lpf, 1, -1.0),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--limit", type=int, default=2_000_000)
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)
    found = kernels.backends()
    print(f"limit = {args.limit}, backends: {', '.join(found)}")
    for name, fn in cases(args.limit).items():
        times = {b: min(timeit.repeat(lambda: fn(m), number=1, repeat=args.repeat))
                 for b, m in found.items()}
        line = "  ".join(f"{b} {t * 1e3:9.2f} ms" for b, t in times.items())
        if "cython" in times and "python" in times:
            line += f"  speedup {times['python'] / times['cython']:6.1f}x"
        print(f"{name:<24} {line}")


if __name__ == "__main__":
    main()
