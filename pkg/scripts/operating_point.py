"""Measure the finite-N frameless operating point and its baseline gap.

Runs frameless Monte Carlo at the design point (beta, termination threshold),
prints round-length and throughput statistics, then sweeps the irregular
framed baseline over M/N and reports its best mean throughput for contrast.

    python scripts/operating_point.py --n 1000 --runs 500
"""

import argparse

import numpy as np

from frameless_aloha import (
    IRREGULAR_BASELINE,
    ConstantBeta,
    FixedM,
    Frameless,
    Irregular,
    RoundConfig,
    monte_carlo,
)


def parse_args():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--beta", type=float, default=2.9)
    ap.add_argument("--threshold", type=float, default=0.923)
    ap.add_argument("--runs", type=int, default=500)
    ap.add_argument("--baseline-runs", type=int, default=300)
    ap.add_argument("--seed", type=int, default=20260814)
    return ap.parse_args()


def main():
    args = parse_args()
    n = args.n

    config = RoundConfig(
        num_users=n,
        mode=Frameless(threshold=args.threshold, max_slots=4 * n),
        access=ConstantBeta(beta=args.beta),
        seed=args.seed,
    )
    stats = monte_carlo(config, args.runs)
    se_t = stats.sd_realized_throughput / np.sqrt(stats.runs)
    print(f"frameless, N={n}, beta={args.beta}, threshold={args.threshold}:")
    print(f"  mean slots used      {stats.mean_slots_used:9.2f}  (sd {stats.sd_slots_used:.2f})")
    print(f"  mean resolution      {stats.mean_resolution_fraction:9.4f}")
    print(f"  mean throughput      {stats.mean_realized_throughput:9.4f}  (SE {se_t:.4f})")
    print(f"  reached threshold    {stats.fraction_reached_threshold:9.3f}")

    print(f"\nirregular baseline, N={n}, {args.baseline_runs} runs per ratio:")
    best = (0.0, None)
    for ratio in np.round(np.arange(0.8, 1.4001, 0.1), 12):
        m = round(float(ratio) * n)
        config = RoundConfig(
            num_users=n,
            mode=FixedM(num_slots=m),
            access=Irregular(distribution=IRREGULAR_BASELINE),
            seed=args.seed,
        )
        base = monte_carlo(config, args.baseline_runs)
        t = base.mean_realized_throughput
        print(f"  M/N = {float(ratio):.1f}: mean throughput {t:.4f}")
        if t > best[0]:
            best = (t, float(ratio))
    print(f"\nbaseline best: T = {best[0]:.4f} at M/N = {best[1]}")
    print(f"frameless gain: {stats.mean_realized_throughput - best[0]:+.4f}")


if __name__ == "__main__":
    main()
