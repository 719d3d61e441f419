"""Compiled kernels vs the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Prints the best-of-N wall time per kernel for each backend and the speedup.
"""
import argparse
import timeit

import numpy as np

from catrot import kernels
from catrot.gf2n import builtin_poly


def cases(rng):
    f = builtin_poly(20)
    a = rng.integers(0, 1 << 20, size=1 << 18, dtype=np.uint64)
    b = rng.integers(0, 1 << 20, size=1 << 18, dtype=np.uint64)
    q = 20
    amps = rng.normal(size=1 << q) + 1j * rng.normal(size=1 << q)
    amps /= np.linalg.norm(amps)
    yield "gf_mul_batch n=20, 2^18 pairs", lambda be: be.gf_mul_batch(a, b, f.low, 20)
    yield "gf_orbit n=18", lambda be: be.gf_orbit(builtin_poly(18).low, 18)
    yield "ccx on 20 qubits", lambda be: be.xor_permute(amps, 0b11, 1 << 19)
    yield "fanout 1->8 on 20 qubits", lambda be: be.xor_permute(amps, 1, 0xFF << 4)
    yield "cswap on 20 qubits", lambda be: be.swap_permute(amps, 1, 1 << 5, 1 << 17)
    yield "cz on 20 qubits", lambda be: be.phase_mask(amps, 0b1001, -1.0 + 0j)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if kernels.compiled is None:
        raise SystemExit("compiled kernels are not built; reinstall without CATROT_PURE_PYTHON")
    rng = np.random.default_rng(0)
    print(f"{'kernel':32s} {'cython ms':>10s} {'numpy ms':>10s} {'speedup':>8s}")
    for name, fn in cases(rng):
        times = {}
        for be in (kernels.compiled, kernels.fallback):
            times[be.BACKEND] = min(timeit.repeat(lambda: fn(be), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:32s} {times['cython']:10.2f} {times['numpy']:10.2f} "
              f"{times['numpy'] / times['cython']:7.1f}x")


if __name__ == "__main__":
    main()
