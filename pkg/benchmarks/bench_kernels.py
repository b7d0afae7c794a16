"""Compare the compiled and numpy fusion kernels.

Times the kernel alone on a synthetic LLR block, then a full simulation
block (sampling plus kernel) so the kernel's share of a trial is visible.

    python3 benchmarks/bench_kernels.py --trials 1024 --periods 200
"""

import argparse
import timeit

import numpy as np

from csd import kernels
from csd.harness import bundled_scenario, simulate_statistics


def best_of(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--trials", type=int, default=1024)
    parser.add_argument("--periods", type=int, default=200)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    spec = bundled_scenario("scenario2").replace(max_periods=args.periods)
    rng = np.random.default_rng(0)
    llr = rng.normal(size=(args.trials, args.periods, len(spec.nodes)))
    truth = spec.truth(1)
    trials = range(args.trials)

    backends = kernels.available_backends()
    print(f"block: {args.trials} trials x {args.periods} periods x {len(spec.nodes)} nodes")
    print(f"{'backend':<10}{'kernel s':>12}{'us/trial':>12}{'full s':>12}{'us/trial':>12}")
    results = {}
    for name in backends:
        fn = kernels.load_backend(name).filtered_statistics
        k = best_of(lambda: fn(llr, spec.mu, 1.0), args.repeat)
        full = best_of(lambda: simulate_statistics(spec, truth, trials, backend=name), max(1, args.repeat // 2))
        results[name] = (k, full)
        print(f"{name:<10}{k:>12.4f}{1e6 * k / args.trials:>12.1f}{full:>12.4f}{1e6 * full / args.trials:>12.1f}")

    if {"cython", "python"} <= results.keys():
        (kc, fc), (kp, fp) = results["cython"], results["python"]
        print(f"kernel speedup {kp / kc:.1f}x, end-to-end speedup {fp / fc:.2f}x")
        same = np.array_equal(
            kernels.load_backend("cython").filtered_statistics(llr, spec.mu, 1.0),
            kernels.load_backend("python").filtered_statistics(llr, spec.mu, 1.0),
            equal_nan=True,
        )
        print(f"outputs bit-identical: {same}")


if __name__ == "__main__":
    main()
