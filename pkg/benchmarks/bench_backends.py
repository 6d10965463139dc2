"""Compare the accelerated and pure-NumPy orbit kernels.

Runs the first-level orbit enumeration (the hot loop of order
certification) on a few representative configurations under both
backends and prints wall times plus the speedup. The first accelerated
call includes JIT compilation; a warm-up pass is timed separately so the
steady-state numbers are comparable.

Usage: python3 benchmarks/bench_backends.py [--repeats N]
"""

import argparse
import time

from omega23._kernels import backend_name
from omega23.certify import orbit
from omega23.fields import make_field
from omega23.generators import build_pair
from omega23.linalg import unit_vector

POINTS = [
    (9, 3, 1),   # headline odd case
    (11, 3, 1),  # larger odd case, ~6x the state space
    (12, 3, 1),  # even tail family
    (9, 5, 1),   # bigger field, same dimension
]


def _time_orbit(gens, v, backend: str, repeats: int) -> tuple:
    best = float("inf")
    size = 0
    for _ in range(repeats):
        t0 = time.perf_counter()
        orb = orbit(gens, v, backend=backend)
        best = min(best, time.perf_counter() - t0)
        size = orb.size
    return best, size


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=3,
                    help="timing repetitions per configuration (best-of)")
    args = ap.parse_args()

    try:
        backend_name("numba")
        have_numba = True
    except Exception:
        have_numba = False
    backends = ["numpy"] + (["numba"] if have_numba else [])
    if not have_numba:
        print("accelerated backend unavailable; timing numpy only")

    if have_numba:
        pair = build_pair(9, make_field(3, 1))
        v = unit_vector(pair.ctx, 9, 0)
        t0 = time.perf_counter()
        orbit((pair.x, pair.y), v, backend="numba")
        print(f"JIT warm-up: {time.perf_counter() - t0:8.3f}s\n")

    header = f"{'point':>14s} {'orbit':>8s}"
    for b in backends:
        header += f" {b + ' (s)':>12s}"
    if have_numba:
        header += f" {'speedup':>9s}"
    print(header)

    for n, p, f in POINTS:
        pair = build_pair(n, make_field(p, f))
        gens = (pair.x, pair.y)
        v = unit_vector(pair.ctx, n, 0)
        times = {}
        size = 0
        for b in backends:
            times[b], size = _time_orbit(gens, v, b, args.repeats)
        row = f"{f'n={n} q={p**f}':>14s} {size:>8d}"
        for b in backends:
            row += f" {times[b]:>12.4f}"
        if have_numba:
            row += f" {times['numpy'] / times['numba']:>8.1f}x"
        print(row)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
