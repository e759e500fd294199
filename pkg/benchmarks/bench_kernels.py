"""Time the compiled kernels against the NumPy fallback.

Run with ``python3 benchmarks/bench_kernels.py``.
"""

import argparse
import timeit

import numpy as np

from latinmac import kernels


def collision_args(rng, n):
    return (
        rng.integers(0, 24, n).astype(np.int64),
        rng.integers(0, 16, n).astype(np.int64),
        rng.integers(0, n // 12 + 1, n).astype(np.int64),
        *(rng.random(n) * 10.0 for _ in range(4)),
        3.0,
    )


def oracle_args(rng, T, O):
    return (*(rng.random((T, O)) for _ in range(3)), 0.6, 24, 11, 16)


def bench(label, fn, args, repeat):
    best = min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))
    print(f"{label:<40s} {best * 1e3:9.3f} ms")
    return best


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    rng = np.random.default_rng(args.seed)
    impls = [("python", kernels.python_impl)]
    if kernels.compiled_impl is not None:
        impls.append(("cython", kernels.compiled_impl))
    else:
        print("compiled extension not built; timing the fallback only")
    cases = [
        ("collided_flags n=360", "collided_flags", collision_args(rng, 360)),
        ("collided_flags n=4800", "collided_flags", collision_args(rng, 4800)),
        ("dail_oracle_successes T=1e5 O=6", "dail_oracle_successes", oracle_args(rng, 100_000, 6)),
    ]
    for label, name, a in cases:
        times = {impl: bench(f"{label} [{impl}]", getattr(mod, name), a, args.repeat) for impl, mod in impls}
        if len(times) == 2:
            print(f"{'':<40s} speedup x{times['python'] / times['cython']:.1f}")


if __name__ == "__main__":
    main()
