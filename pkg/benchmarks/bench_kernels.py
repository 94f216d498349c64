"""Compare the compiled and pure-Python matching kernels.

Usage: python3 benchmarks/bench_kernels.py [--repeat R] [--seed S]
"""

from __future__ import annotations

import argparse
import random
import timeit

from dynmwm import kernels


def dense_instance(rng: random.Random, n: int, p: float = 0.5) -> list[tuple[int, int, int]]:
    return [(i, j, rng.randint(1, 1000)) for i in range(n) for j in range(i + 1, n) if rng.random() < p]


def chain_instance(rng: random.Random, length: int) -> tuple[list[int], list[int]]:
    order = list(range(length))
    rng.shuffle(order)
    return [rng.randint(1, 1000) for _ in range(length)], order


def bench(label: str, fn, repeat: int) -> dict[str, float]:
    out = {}
    for backend in ("python", "cython"):
        best = min(timeit.repeat(lambda: fn(backend), number=1, repeat=repeat))
        out[backend] = best
    print(f"{label:<28} python {out['python'] * 1e3:9.3f} ms   cython {out['cython'] * 1e3:9.3f} ms   speedup {out['python'] / out['cython']:7.1f}x")
    return out


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    if kernels.BACKEND != "cython":
        raise SystemExit("compiled kernels are not built; run `pip install -e . --no-build-isolation` first")
    rng = random.Random(args.seed)
    for n in (8, 12, 16, 18):
        edges = dense_instance(rng, n)
        assert kernels.mwm_bitmask(n, edges, "python") == kernels.mwm_bitmask(n, edges, "cython")
        bench(f"mwm_bitmask n={n}", lambda b, n=n, e=edges: kernels.mwm_bitmask(n, e, b), args.repeat)
    for length in (100, 1000, 3000):
        ws, order = chain_instance(rng, length)
        for cycle in (False, True):
            assert kernels.path_cycle_lexmin(ws, cycle, order, "python") == kernels.path_cycle_lexmin(ws, cycle, order, "cython")
            kind = "cycle" if cycle else "path"
            bench(f"path_cycle_lexmin {kind} L={length}", lambda b, w=ws, c=cycle, o=order: kernels.path_cycle_lexmin(w, c, o, b), args.repeat)


if __name__ == "__main__":
    main()
