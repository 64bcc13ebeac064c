"""Random search for channels where semantic capacity differs most from C.

For each random channel and random pair of mappings, reports C, C_s under both
variants, and keeps the extremes. Useful for probing when C is near 0 but C_s
(UP) is not.

    python3 scripts/capacity_gap_search.py --trials 200 --n-in 3 --n-out 4 --seed 1
"""
import argparse

import numpy as np

from semantic_it.capacity import SolverConfig, capacity_comparison_report
from semantic_it.probability import Channel
from semantic_it.rng import make_generator
from semantic_it.semantic import SynonymousMapping, Variant


def random_mapping(rng, n):
    _, labels = np.unique(rng.integers(0, n, size=n), return_inverse=True)
    return SynonymousMapping(labels)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--n-in", type=int, default=3)
    ap.add_argument("--n-out", type=int, default=3)
    ap.add_argument("--concentration", type=float, default=0.5, help="Dirichlet parameter for channel rows")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    cfg = SolverConfig(starts=8, seed=args.seed)
    rng = make_generator(args.seed)
    best_ratio = (-1.0, None)
    print("trial,C,C_s_eq5,C_s_up")
    for t in range(args.trials):
        w = Channel(rng.dirichlet(np.full(args.n_out, args.concentration), size=args.n_in))
        fx, fy = random_mapping(rng, args.n_in), random_mapping(rng, args.n_out)
        eq5 = capacity_comparison_report(w, fx, fy, None, Variant.EQ5, cfg)
        up = capacity_comparison_report(w, fx, fy, None, Variant.UP, cfg)
        print(f"{t},{eq5.C:.6f},{eq5.C_s:.6f},{up.C_s:.6f}")
        ratio = up.C_s / max(eq5.C, 1e-9)
        if ratio > best_ratio[0]:
            best_ratio = (ratio, (w.rows.round(4).tolist(), fx.class_of.tolist(), fy.class_of.tolist(), eq5.C, up.C_s))
    ratio, (rows, fx, fy, c, cs) = best_ratio
    print(f"# largest C_s(UP)/C = {ratio:.3g}: C = {c:.6f}, C_s = {cs:.6f}")
    print(f"# channel {rows}, fx {fx}, fy {fy}")


if __name__ == "__main__":
    main()
