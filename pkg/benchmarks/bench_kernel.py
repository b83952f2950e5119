"""Compare the compiled and pure-Python lasso kernels on random programs.

    python benchmarks/bench_kernel.py [--cases 2000] [--positions 8 32 64]
"""
import argparse
import random
import time

from hyperq import kernel
from hyperq.generators import random_qf


def workload(rng, cases, n):
    out = []
    for _ in range(cases):
        prog = kernel.compile_qf(random_qf(rng, ["pi", "rho"], ["p", "a"], 6, ["q"]))
        out.append((prog, [rng.getrandbits(n) for _ in prog.leaves], rng.randrange(n)))
    return out


def timed(items, n, backend, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        for prog, atoms, S in items:
            prog.run(atoms, S, n, backend=backend)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cases", type=int, default=2000)
    ap.add_argument("--positions", type=int, nargs="+", default=[8, 32, 64])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if kernel._ckernel is None:
        raise SystemExit("compiled kernel not built; run `pip install -e . --no-build-isolation`")
    print(f"{'positions':>9} {'python (s)':>11} {'cython (s)':>11} {'speedup':>8}")
    for n in args.positions:
        items = workload(random.Random(args.seed + n), args.cases, n)
        for prog, atoms, S in items[:50]:
            assert prog.run(atoms, S, n, backend="cython") == prog.run(atoms, S, n, backend="python")
        py = timed(items, n, "python", args.repeat)
        cy = timed(items, n, "cython", args.repeat)
        print(f"{n:>9} {py:>11.4f} {cy:>11.4f} {py / cy:>7.1f}x")


if __name__ == "__main__":
    main()
