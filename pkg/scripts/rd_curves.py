"""Classical vs semantic R(D) for a model file, written side by side as CSV.

    python3 scripts/rd_curves.py fixtures/four_symbol.json --steps 32 > curves.csv

The classical curve uses the class distortion lifted to symbols, so at every
distortion level the semantic rate should sit at or below the classical one.
"""
import argparse
import sys

import numpy as np

from semantic_it.cli import parse_model
from semantic_it.distortion import class_mismatch_distortion, cosine_distortion
from semantic_it.ratedistortion import LambdaSweep, rate_at_distortion, semantic_rate_at_distortion, zero_rate_distortion
from semantic_it.semantic import pushforward, semantic_entropy
from semantic_it.probability import entropy


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("model")
    ap.add_argument("--steps", type=int, default=24, help="distortion levels")
    args = ap.parse_args(argv)

    doc = parse_model(args.model)
    f = doc.input_mapping()
    if doc.distortion == "class-mismatch" or (doc.distortion is None and doc.features is None):
        ds = class_mismatch_distortion(f.n_classes)
    elif doc.distortion is not None:
        ds = doc.distortion
    else:
        ds = cosine_distortion(doc.features)
    lifted = ds.lift(f)
    dmax = zero_rate_distortion(pushforward(doc.source, f), ds)
    print(f"# H = {entropy(doc.source):.6f} bits, H_s = {semantic_entropy(doc.source, f):.6f} bits", file=sys.stderr)
    print("distortion,semantic_rate_bits,classical_rate_bits")
    for D in np.linspace(0.0, dmax, args.steps):
        s = semantic_rate_at_distortion(doc.source, f, ds, D).rate
        c = rate_at_distortion(doc.source, lifted, D).rate
        print(f"{D:.8g},{s:.8g},{c:.8g}")


if __name__ == "__main__":
    main()
