"""Time the compiled kernels against the NumPy fallback.

Run with ``python benchmarks/bench_kernels.py``. Each row reports the best
of several repeats and the speedup of the compiled backend.
"""
import argparse
import timeit

import numpy as np

from sspc import _kernels_py as python
from sspc.kernels import compiled


def cases(rng):
    probs = rng.random((6, 4**6))
    vec = rng.random(4**3)
    mats = np.ascontiguousarray(rng.standard_normal((5000, 8, 8)) + 1j * rng.standard_normal((5000, 8, 8)))
    mats /= np.linalg.norm(mats, axis=(1, 2), keepdims=True)
    return {
        "fwht 6x4096": (lambda m: m.fwht(probs.copy())),
        "xor_convolve 64": (lambda m: m.xor_convolve(vec, vec)),
        "prefix_products 5000x8x8": (lambda m: m.prefix_products(mats)),
        "suffix_products 5000x8x8": (lambda m: m.suffix_products(mats)),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if compiled is None:
        print("compiled extension not built; only the fallback can be timed")
    rng = np.random.default_rng(0)
    print(f"{'kernel':28s} {'python [ms]':>12s} {'compiled [ms]':>14s} {'speedup':>8s}")
    for name, fn in cases(rng).items():
        t_py = min(timeit.repeat(lambda: fn(python), number=1, repeat=args.repeat)) * 1e3
        if compiled is None:
            print(f"{name:28s} {t_py:12.3f} {'-':>14s} {'-':>8s}")
            continue
        t_c = min(timeit.repeat(lambda: fn(compiled), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:28s} {t_py:12.3f} {t_c:14.3f} {t_py / t_c:8.1f}x")


if __name__ == "__main__":
    main()
