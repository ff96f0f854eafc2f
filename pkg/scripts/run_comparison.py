"""Train the hybrid/zz x cobyla/lbfgsb grid on the fixture and print the accuracy table.

    python3 scripts/run_comparison.py --out-dir runs/compare --jobs 4
    python3 scripts/run_comparison.py --seeds 0 1 2 3 4   # weight-seed sweep, no artifacts
"""

import argparse
from pathlib import Path

from qencode.cli import main, train_one

FIXTURE = Path(__file__).resolve().parents[1] / "data" / "synthetic_1000x6_seed42.csv"


def seed_sweep(seeds, max_iter):
    print(f"{'seed':>4} {'hybrid/cobyla':>14} {'hybrid/lbfgsb':>14} {'zz/cobyla':>10} {'zz/lbfgsb':>10}")
    for seed in seeds:
        accs = [train_one(fm, opt, max_iter, seed, str(FIXTURE), 2, "linear", 0.2, 42).test_accuracy
                for fm in ("hybrid", "zz") for opt in ("cobyla", "lbfgsb")]
        print(f"{seed:>4} {accs[0]:>14.3f} {accs[1]:>14.3f} {accs[2]:>10.3f} {accs[3]:>10.3f}")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--out-dir", default="runs/compare")
    parser.add_argument("--max-iter", type=int, default=100)
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--seeds", type=int, nargs="*")
    args = parser.parse_args()
    if args.seeds:
        seed_sweep(args.seeds, args.max_iter)
    else:
        raise SystemExit(main(["compare", "--data", str(FIXTURE), "--max-iter", str(args.max_iter),
                               "--out-dir", args.out_dir, "--jobs", str(args.jobs)]))
