"""Build the degree-zero lattice of a rank-2 module and run the ellipticity checks on it."""
import argparse

from ellsheaf import FieldTower, drinfeld_module, build_uniformizer, elliptic_check, lattice_from_uniformizer, stabilizer_ring


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=int, default=2)
    ap.add_argument("--phi", default="1,0,1", help="comma separated theta-coefficients of phi_t")
    ap.add_argument("--N", type=int, default=4)
    ap.add_argument("--M", type=int, default=6)
    args = ap.parse_args()
    T = FieldTower(args.p, 1)
    coeffs = [int(c) for c in args.phi.split(",")]
    U = build_uniformizer(drinfeld_module(T, coeffs), 0, args.M + args.N + 2)
    L = lattice_from_uniformizer(U, args.N, args.M)
    print(f"window dim {L.dim}, chi {L.chi()}")
    rep = elliptic_check(L)
    for name, ok in rep.verdicts().items():
        print(f"  {name:15s} {'ok' if ok else 'FAIL'}")
    st = stabilizer_ring(L)
    print(f"stabilizer contains u: {st.has_u}, u-degrees found: {st.as_u_degrees()}")


if __name__ == "__main__":
    main()
