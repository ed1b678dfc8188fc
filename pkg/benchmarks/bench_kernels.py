"""Benchmark the compiled statevector kernels against the numpy fallback.

The hot path of a pure-state entanglement run is two-qubit gate application
plus pairwise reduced-density-matrix extraction, so those are what we time,
head to head, at growing register sizes.

Usage: python benchmarks/bench_kernels.py [--qubits 12 16 20] [--repeats 5]
"""

import argparse
import time

import numpy as np

from collidekit.kernels import numpy_backend

try:
    from collidekit.kernels import _fastkernels
except ImportError:
    _fastkernels = None


def _time(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_backend(backend, psi, u, n, repeats):
    apply_t = _time(lambda: backend.apply_two_qubit(psi, u, 0, n // 2), repeats)
    rdm_t = _time(lambda: backend.reduced_density_2(psi, 0, n // 2), repeats)
    # the per-step cost of a tangle sweep: one collision + all (j, k) pairs
    pairs = [(j, k) for j in range(n) for k in range(j + 1, n)]

    def sweep():
        backend.apply_two_qubit(psi, u, 0, 1)
        for j, k in pairs[: min(len(pairs), 64)]:
            backend.reduced_density_2(psi, j, k)

    sweep_t = _time(sweep, max(1, repeats // 2))
    return apply_t, rdm_t, sweep_t


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--qubits", type=int, nargs="+", default=[10, 14, 18, 20])
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    u = np.ascontiguousarray(
        np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))[0]
    )

    print(f"{'qubits':>6} {'backend':>9} {'apply (ms)':>12} {'rdm2 (ms)':>12} {'sweep (ms)':>12}")
    for n in args.qubits:
        psi = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
        psi = np.ascontiguousarray(psi / np.linalg.norm(psi))
        rows = [("numpy", bench_backend(numpy_backend, psi, u, n, args.repeats))]
        if _fastkernels is not None:
            rows.append(("compiled", bench_backend(_fastkernels, psi, u, n, args.repeats)))
        for name, (a, r, s) in rows:
            print(f"{n:>6} {name:>9} {a * 1e3:>12.3f} {r * 1e3:>12.3f} {s * 1e3:>12.3f}")
        if _fastkernels is not None:
            base, fast = rows[0][1], rows[1][1]
            print(
                f"{'':>6} {'speedup':>9} {base[0] / fast[0]:>11.2f}x "
                f"{base[1] / fast[1]:>11.2f}x {base[2] / fast[2]:>11.2f}x"
            )
    if _fastkernels is None:
        print("\ncompiled kernels not built; showing numpy backend only")


if __name__ == "__main__":
    main()
