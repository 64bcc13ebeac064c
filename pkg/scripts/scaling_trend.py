"""Plug-in H(X|K) against sample size, averaged over several seeds.

    python3 scripts/scaling_trend.py fixtures/side_two_state.json --seeds 20
"""
import argparse

import numpy as np

from semantic_it.cli import parse_model
from semantic_it.prior import conditional_entropy_given_prior, scaling_trend_report


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("model")
    ap.add_argument("--sizes", default="10,30,100,300,1000,3000,10000,30000")
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--smoothing", type=float, default=1.0)
    args = ap.parse_args(argv)

    m = parse_model(args.model).side_info
    sizes = [int(s) for s in args.sizes.split(",")]
    runs = np.array([scaling_trend_report(m, sizes, seed, args.smoothing).estimates for seed in range(args.seeds)])
    print(f"# true H(X|K) = {conditional_entropy_given_prior(m):.6f} bits, smoothing {args.smoothing}")
    print("size,mean_estimate,std_estimate")
    for n, mu, sd in zip(sizes, runs.mean(axis=0), runs.std(axis=0)):
        print(f"{n},{mu:.6f},{sd:.6f}")


if __name__ == "__main__":
    main()
