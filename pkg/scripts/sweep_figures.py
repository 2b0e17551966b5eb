"""Emit the asymptotic curve data: P_R*, beta*, T* versus M/N.

Per ratio on the grid, the optimal constant slot degree is located by density
evolution and the resolution probability and throughput at that optimum are
reported, together with the classical slotted-ALOHA reference curve. Output
is CSV, ready for any plotting tool.

    python scripts/sweep_figures.py --out-dir data/
"""

import argparse
import csv
import pathlib

import numpy as np

from frameless_aloha import (
    DEFAULT_BETA_GRID,
    classical_sa_throughput,
    evolve,
    optimize_beta_asymptotic,
)


def parse_args():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ratio-min", type=float, default=0.8)
    ap.add_argument("--ratio-max", type=float, default=2.0)
    ap.add_argument("--ratio-step", type=float, default=0.01)
    ap.add_argument("--out-dir", type=str, default="data")
    return ap.parse_args()


def main():
    args = parse_args()
    out_dir = pathlib.Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    count = int(round((args.ratio_max - args.ratio_min) / args.ratio_step)) + 1
    ratios = np.round(args.ratio_min + args.ratio_step * np.arange(count), 12)

    curve_path = out_dir / "asymptotic_optimum.csv"
    with open(curve_path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["ratio", "beta_star", "p_r_star", "t_star"])
        best = (0.0, None, None)
        for ratio in ratios:
            result = optimize_beta_asymptotic(float(ratio), "throughput", DEFAULT_BETA_GRID)
            p_r = evolve(beta=result.beta_star, epsilon=float(ratio) - 1.0).resolution_probability
            t = p_r / float(ratio)
            writer.writerow([repr(float(ratio)), repr(result.beta_star), repr(p_r), repr(t)])
            if t > best[0]:
                best = (t, float(ratio), result.beta_star)
    print(f"wrote {curve_path}")
    print(f"max T* = {best[0]:.6f} at M/N = {best[1]}, beta* = {best[2]}")
    print(f"average user degree at the optimum: {best[1] * best[2]:.4f}")

    sa_path = out_dir / "classical_sa.csv"
    with open(sa_path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["g", "throughput"])
        for g in np.round(0.001 * np.arange(0, 5001), 12):
            writer.writerow([repr(float(g)), repr(classical_sa_throughput(float(g)))])
    print(f"wrote {sa_path}")


if __name__ == "__main__":
    main()
