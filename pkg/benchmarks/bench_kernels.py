"""Time the compiled and pure-Python kernels on the same inputs.

Usage::

    python3 benchmarks/bench_kernels.py [--q 256] [--dim 60] [--repeat 3]

Each kernel runs on every available backend; outputs are checked to agree
before timing, and the best of ``--repeat`` runs is reported.
"""
import argparse
import timeit

import numpy as np

from securenc import kernels
from securenc.gf import gf


def _cases(q, dim, members, domain, rng):
    F = gf(q)
    t = F.tables
    a = rng.integers(0, q, size=(dim, dim))
    b = rng.integers(0, q, size=(dim, dim))
    images = rng.integers(0, 4, size=(members, domain))
    return {
        f"rref {dim}x{dim} GF({q})": lambda be: kernels.rref(a, t, backend=be)[0],
        f"matmul {dim}x{dim} GF({q})": lambda be: kernels.matmul(a, b, t, backend=be),
        f"pair collisions {members}x{domain}": lambda be: np.array(kernels.max_pair_collisions(images, backend=be)),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--q", type=int, default=256)
    ap.add_argument("--dim", type=int, default=60)
    ap.add_argument("--members", type=int, default=168)
    ap.add_argument("--domain", type=int, default=256)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    backends = kernels.available_backends()
    cases = _cases(args.q, args.dim, args.members, args.domain, np.random.default_rng(args.seed))
    print(f"{'kernel':32s}" + "".join(f"{b:>12s}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for name, fn in cases.items():
        ref = fn(backends[-1])
        times = []
        for be in backends:
            if not np.array_equal(fn(be), ref):
                raise SystemExit(f"{name}: backend {be} disagrees with {backends[-1]}")
            times.append(min(timeit.repeat(lambda: fn(be), number=1, repeat=args.repeat)))
        line = f"{name:32s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times)
        if len(times) > 1:
            line += f"{times[-1] / times[0]:11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
