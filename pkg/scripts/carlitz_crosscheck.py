"""Compare the closed-form Carlitz series with the one read off the Tate chain.

Prints, per case, whether the Frobenius relation holds, whether the two
series differ by an F_q scalar, and whether they differ by an F_q[[t]] unit.
"""
import argparse
import json

from ellsheaf.harness import HarnessConfig, suite_carlitz


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--prec", type=int, default=6)
    args = ap.parse_args()
    for rec in suite_carlitz(HarnessConfig(carlitz_prec=args.prec)):
        print(json.dumps({k: rec[k] for k in ("case", "relation", "scalar_in_fq", "unit_ratio_exists")}))


if __name__ == "__main__":
    main()
