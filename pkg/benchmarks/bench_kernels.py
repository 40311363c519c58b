"""Time the compiled F_{p^2} kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--primes 101 211 401] [--repeat 3]
"""

from __future__ import annotations

import argparse
import random
import timeit

from genjac.supersingular import _pykernels
from genjac.supersingular.fp2 import field

try:
    from genjac.supersingular import _ckernels
except ImportError:  # not built
    _ckernels = None


def _cases(p: int, rng: random.Random):
    s = field(p).s
    cu = [rng.randrange(p) for _ in range(5)]
    cv = [rng.randrange(p) for _ in range(5)]
    a = (rng.randrange(p), rng.randrange(p))
    b = (rng.randrange(p), rng.randrange(p))
    return {
        "poly_roots": lambda m: m.poly_roots(p, s, cu, cv),
        "char_sum": lambda m: m.char_sum(p, s, a[0], a[1], b[0], b[1]),
    }


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--primes", type=int, nargs="+", default=[101, 211, 401])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    rng = random.Random(0)
    mods = [("numpy", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    print(f"{'kernel':<11}{'p':>6}" + "".join(f"{name:>12}" for name, _ in mods) + ("     speedup" if _ckernels else ""))
    for p in args.primes:
        for kname, fn in _cases(p, rng).items():
            results = [fn(m) for _, m in mods]
            if any(sorted(r) != sorted(results[0]) if isinstance(r, list) else r != results[0] for r in results):
                raise SystemExit(f"backends disagree on {kname} at p = {p}")
            times = [min(timeit.repeat(lambda m=m: fn(m), number=1, repeat=args.repeat)) for _, m in mods]
            line = f"{kname:<11}{p:>6}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times)
            if len(times) == 2:
                line += f"{times[0] / times[1]:>11.1f}x"
            print(line)
    if not _ckernels:
        print("compiled kernels not built; only the fallback was timed")


if __name__ == "__main__":
    main()
