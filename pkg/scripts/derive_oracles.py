"""Independent high-precision evaluation of the reference values frozen into the tests.

Uses only decimal/fractions arithmetic, none of the package code.
"""
from decimal import Decimal, getcontext
from fractions import Fraction

getcontext().prec = 40
LN2 = Decimal(2).ln()


def log2(x):
    return Decimal(x).ln() / LN2


def H(*ps):
    return -sum((Decimal(p.numerator) / Decimal(p.denominator)) * log2(Decimal(p.numerator) / Decimal(p.denominator)) for p in map(Fraction, ps) if p > 0)


def h(p):
    p = Fraction(p)
    return H(p, 1 - p)


def main():
    F = Fraction
    out = {}
    out["H(1/2,1/4,1/8,1/8)"] = H(F(1, 2), F(1, 4), F(1, 8), F(1, 8))
    out["h(1/4) = H_s of the 4-symbol source"] = h(F(1, 4))
    for eps in ("0.05", "0.11", "0.25", "0.2"):
        out[f"1 - h({eps})"] = 1 - h(F(eps))
    # joint of (0.3, 0.7) through BSC(0.1)
    cells = [F("0.27"), F("0.03"), F("0.07"), F("0.63")]
    out["H(X,Y) - H(Y), BSC(0.1) joint"] = H(*cells) - H(F("0.34"), F("0.66"))
    out["I(X;Y), BSC(0.1) joint"] = H(F("0.3"), F("0.7")) + H(F("0.34"), F("0.66")) - H(*cells)
    hxk = (h(F("0.1")) + h(F("0.2"))) / 2
    out["H(X|K) two-state"] = hxk
    out["h(0.55)"] = h(F("0.55"))
    out["prior gain two-state"] = h(F("0.55")) - hxk
    # fixtures/samples10.csv: k=0 -> x counts (4, 1); k=1 -> (1, 4); add-one smoothing
    out["plug-in H(X|K), samples10, smoothing 1"] = (h(F(5, 7)) + h(F(2, 7))) / 2
    out["plug-in H(X|K), samples10, smoothing 0"] = (h(F(4, 5)) + h(F(1, 5))) / 2
    out["cosine (1,0) vs (1,1)"] = (1 - 1 / Decimal(2).sqrt()) / 2
    out["cosine class features (1,0) vs (0.6,0.8)"] = (1 - Decimal("0.6")) / 2
    for k, v in out.items():
        print(f"{k:45s} {v:.15f}")


if __name__ == "__main__":
    main()
