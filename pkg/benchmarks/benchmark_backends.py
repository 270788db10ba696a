"""Compare the numba and pure-numpy backends on the three hot kernels.

Runs each workload under both backends (numba warmed separately so JIT
compilation is not billed) and reports best-of-N wall times:

    python benchmarks/benchmark_backends.py
    python benchmarks/benchmark_backends.py --repeats 5 --eta-limit 60000
"""

import argparse
import time

from galim import arith, dickson, kernels


def best_of(fn, repeats: int) -> float:
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bernoulli_workload(p: int):
    return lambda: kernels.bernoulli_table_mod(p)


def eta_workload(limit: int):
    primes = arith.primes_up_to(limit)
    primes = primes[primes >= 7]
    return lambda: kernels.eta_scan(primes)


def closure_workload(p: int):
    field = dickson.GFq(p)
    gens = [dickson.Mat2(field, 0, 1, p - 1, 0), dickson.Mat2(field, 1, 1, 0, 1)]
    expected = p * (p * p - 1) // 2  # PSL2(Fp)

    def run():
        group = dickson.closure(gens, budget=2 * expected)
        assert group is not None and len(group) == expected

    return run


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--bernoulli-prime", type=int, default=10007)
    ap.add_argument("--eta-limit", type=int, default=30000)
    ap.add_argument("--closure-prime", type=int, default=61)
    args = ap.parse_args()

    workloads = [
        (f"bernoulli_table_mod(p={args.bernoulli_prime})",
         bernoulli_workload(args.bernoulli_prime)),
        (f"eta_scan(primes <= {args.eta_limit})", eta_workload(args.eta_limit)),
        (f"closure of PSL2(F{args.closure_prime})",
         closure_workload(args.closure_prime)),
    ]
    backends = kernels.available_backends()
    print(f"backends: {', '.join(backends)}   repeats: {args.repeats}")

    for label, fn in workloads:
        row = {}
        for backend in backends:
            previous = kernels.active_backend()
            kernels.set_backend(backend)
            try:
                fn()  # warm-up; lets numba JIT outside the timed region
                row[backend] = best_of(fn, args.repeats)
            finally:
                kernels.set_backend(previous)
        line = f"{label:40s}"
        for backend in backends:
            line += f"  {backend} {row[backend]:8.3f}s"
        if "numba" in row and "numpy" in row and row["numba"] > 0:
            line += f"  speedup x{row['numpy'] / row['numba']:.1f}"
        print(line)


if __name__ == "__main__":
    main()
