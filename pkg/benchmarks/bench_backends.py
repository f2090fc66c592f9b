"""Benchmark the jit-compiled kernels against the pure-numpy fallback.

Times a single-condition batch (the hot path behind sweeps) on each
available backend, after one warm-up call so jit compilation is not billed
to the measurement.

Usage: python3 benchmarks/bench_backends.py [--trials N] [--repeats K]
"""

import argparse
import os
import time

from votfield import Condition, available_backends, default_config, run_batch

os.environ.setdefault("VOTFIELD_OUT", ".")  # no files are written, just in case


def time_batch(backend, trials, repeats):
    os.environ["VOTFIELD_BACKEND"] = backend
    cfg = default_config()
    cond = Condition(a_target=6.0, a_mp=-3.0)
    run_batch(cfg, cond, n_trials=min(8, trials), master_seed=1)  # warm-up
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        run_batch(cfg, cond, n_trials=trials, master_seed=1)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trials", type=int, default=500, metavar="N",
                        help="trials per timed batch (default 500)")
    parser.add_argument("--repeats", type=int, default=3, metavar="K",
                        help="timed repeats, best-of (default 3)")
    args = parser.parse_args()

    backends = available_backends()
    print(f"batch of {args.trials} trials, best of {args.repeats} runs")
    print(f"{'backend':<10} {'seconds':>10} {'trials/s':>12}")
    times = {}
    for backend in backends:
        sec = time_batch(backend, args.trials, args.repeats)
        times[backend] = sec
        print(f"{backend:<10} {sec:>10.3f} {args.trials / sec:>12.1f}")
    if "numba" in times and "numpy" in times:
        print(f"speedup (numpy/numba): {times['numpy'] / times['numba']:.1f}x")


if __name__ == "__main__":
    main()
