"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--N 1244] [--times 4097] [--repeat 5]

Both backends are imported directly, so the CRITPROBE_PURE switch does not
matter here.  Prints best-of-``repeat`` wall times and the max difference.
"""
import argparse
import math
import timeit

import numpy as np

from critprobe import _fallback
from critprobe.dephasing import _coefficients
from critprobe.spectrum import ChainParams, build_mode_table

try:
    from critprobe import _kernels
except ImportError:
    _kernels = None


def best_of(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def bench_echo(N, n_times, repeat):
    table = build_mode_table(ChainParams(N, 0.95, 1.0, 0.1))
    args = _coefficients(table, allow_degenerate=True) + (np.linspace(0, 10, n_times),)
    rows = [("python", best_of(lambda: _fallback.echo_factor(*args), repeat))]
    if _kernels is not None:
        rows.append(("compiled", best_of(lambda: _kernels.echo_factor(*args), repeat)))
        diff = np.max(np.abs(_kernels.echo_factor(*args) - _fallback.echo_factor(*args)))
    else:
        diff = math.nan
    return rows, diff


def bench_mixed(n_levels, n_times, repeat):
    rng = np.random.default_rng(0)
    energies = np.sort(rng.uniform(-3, 3, n_levels))
    weights = rng.uniform(0.1, 1, n_levels)
    weights /= weights.sum()
    rho0 = np.array([[0.5, 0.5], [0.5, 0.5]], dtype=complex)
    args = (energies, weights, 0.8, 0.3, 0.1, rho0, np.linspace(0, 10, n_times))
    rows = [("python", best_of(lambda: _fallback.mixed_evolution(*args), repeat))]
    if _kernels is not None:
        rows.append(("compiled", best_of(lambda: _kernels.mixed_evolution(*args), repeat)))
        diff = max(np.max(np.abs(a - b)) for a, b in
                   zip(_kernels.mixed_evolution(*args), _fallback.mixed_evolution(*args)))
    else:
        diff = math.nan
    return rows, diff


def show(title, rows, diff):
    print(title)
    base = rows[0][1]
    for name, seconds in rows:
        print(f"  {name:9s} {1e3 * seconds:9.2f} ms   x{base / seconds:5.1f}")
    print(f"  max |compiled - python| = {diff:.2e}")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--N", type=int, default=1244)
    parser.add_argument("--times", type=int, default=4097)
    parser.add_argument("--levels", type=int, default=64)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if _kernels is None:
        print("compiled kernels not built; timing the fallback only")
    show(f"echo_factor: N={args.N}, {args.times} times", *bench_echo(args.N, args.times, args.repeat))
    show(f"mixed_evolution: {args.levels} levels, {args.times} times",
         *bench_mixed(args.levels, args.times, args.repeat))


if __name__ == "__main__":
    main()
