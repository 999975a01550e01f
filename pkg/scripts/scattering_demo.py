"""Moore determinant of a rank-2 uniformizer and the rank-one module it defines."""
import argparse

from ellsheaf import FieldTower, build_uniformizer, drinfeld_module, scattering_det


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=int, default=2)
    ap.add_argument("--phi", default="1,0,1")
    ap.add_argument("--prec", type=int, default=6)
    args = ap.parse_args()
    T = FieldTower(args.p, 1)
    U = build_uniformizer(drinfeld_module(T, [int(c) for c in args.phi.split(",")]), 0, args.prec)
    rep = scattering_det(U)
    print("derived g constant:", rep.g_constant, "value:", list(rep.g_value.digits()) if rep.g_value is not None else None)
    print("rebuilt series equals d up to F_q scalar:", rep.fq_scalar is not None)
    print("rebuilt series equals d up to F_q[[t]] unit:", rep.unit_in_fq_series)
    if rep.unit_ratio is not None:
        print("unit ratio head:", [list(rep.unit_ratio.coeff(i).digits()) for i in range(min(5, rep.unit_ratio.prec))])
    print("generation check:", rep.generation)


if __name__ == "__main__":
    main()
