"""Command-line interface.  Every artifact is canonical JSON on stdout (or --output)."""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import harness
from .drinfeld import XPoint, carlitz, drinfeld_module, tate_basis, torsion_basis
from .errors import EXIT_CODES, EllSheafError
from .ffield import POLICIES, FieldTower
from .lattice import (elliptic_check, lattice_from_uniformizer, scattering_det, shifted_lattice, stabilizer_ring,
                      trivial_lattice)
from .store import Store, canonical_dumps, tate_key_fields, STORE_ENV
from .tseries import SeriesMat
from .uniformizer import (baker, build_uniformizer, carlitz_uniformizer, scalar_ratio, series_unit_ratio,
                          uniformizer_from_tate)

EXIT_FAILED_CHECK = 1
EXIT_USAGE = 2


@dataclass
class JobSpec:
    command: str
    q: int = 2
    theta: list = field(default_factory=lambda: [1])
    phi: list = None                 # module coefficients [theta, g1, ..., gn]; None = Carlitz
    xi: list = field(default_factory=lambda: [0])
    x: list = None                   # monic P coefficients (low first) for deg(x) > 1
    prec: int = 6
    r: int = 1
    depth: int = 6
    window: tuple = (4, 6)
    lattice: str = "L0"
    k: int = 1
    g: list = None
    seed: int = harness.HarnessConfig.seed
    suites: list = None
    policy: str = "least"
    strict: bool = False
    action: str = "tate"
    output: str = None


# ---------------------------------------------------------------- parsing helpers

def _tower(q) -> FieldTower:
    for p in (2, 3, 5, 7, 11, 13):
        e, m = 0, q
        while m % p == 0:
            m //= p
            e += 1
        if m == 1 and e:
            return FieldTower(p, e)
    raise ValueError(f"q={q} is not a small prime power")


def _parse_elem(text: str):
    """'2' -> [2]; '0,1' -> [0, 1] (F_p-digits of an F_q element, low first)."""
    text = text.strip().strip("[]")
    return [int(t) for t in text.split(",") if t.strip()] or [0]


def _parse_elems(text: str):
    return [_parse_elem(t) for t in text.split(";")]


def _module(spec: JobSpec, T):
    if spec.phi is None:
        return carlitz(T, T.fq(spec.theta))
    return drinfeld_module(T, [T.fq(c) for c in spec.phi])


def _point(spec: JobSpec, T):
    if spec.x is not None:
        return XPoint(tuple(T.fq(c) for c in spec.x))
    return T.fq(spec.xi)


def _xjson(spec):
    return {"x": spec.x} if spec.x is not None else {"xi": spec.xi}


# ---------------------------------------------------------------- commands

def cmd_uniformizer(spec: JobSpec) -> dict:
    T = _tower(spec.q)
    if spec.phi is None and spec.x is None:
        Uc = carlitz_uniformizer(T, T.fq(spec.theta), spec.prec)
        M = carlitz(T, T.fq(spec.theta))
        Ut = uniformizer_from_tate(tate_basis(M, _point(spec, T), spec.prec - 1), spec.prec) \
            if spec.xi == [0] else None
        out = {"uniformizer": Uc.to_json(), "construction": "carlitz"}
        if Ut is not None:
            r = scalar_ratio(Ut.s1, Uc.s1)
            out["tate"] = Ut.to_json()
            out["cross_validation"] = {
                "scalar": r.to_json() if r is not None else None,
                "unit_ratio": series_unit_ratio(Ut.s1, Uc.s1) is not None,
            }
        return out
    U = build_uniformizer(_module(spec, T), _point(spec, T), spec.prec, spec.policy)
    return {"uniformizer": U.to_json(), "construction": "tate"}


def cmd_torsion(spec: JobSpec) -> dict:
    T = _tower(spec.q)
    M = _module(spec, T)
    basis = torsion_basis(M, _point(spec, T), spec.r)
    return {"r": spec.r, "dimension": len(basis), "basis": [b.to_json() for b in basis],
            "tower": T.to_json()}


def _g_matrix(T, g):
    return SeriesMat.from_polys(T.fq, [[[T.fq(c) for c in entry] for entry in row] for row in g])


def cmd_baker(spec: JobSpec) -> dict:
    T = _tower(spec.q)
    M = _module(spec, T)
    U = build_uniformizer(M, _point(spec, T), spec.prec, spec.policy)
    g = spec.g if spec.g is not None else [[[[int(i == j)]] for j in range(M.n)] for i in range(M.n)]
    res = baker(U, _g_matrix(T, g))
    return {"psi": res.psi.to_json(), "s_g": res.s_g.to_json(), "exponents": list(map(int, res.exponents)),
            "a0_units": bool(res.a0_units),
            "scalar_to_s1": res.scalar_to_s1.to_json() if res.scalar_to_s1 is not None else None}


def cmd_scattering(spec: JobSpec) -> dict:
    T = _tower(spec.q)
    U = build_uniformizer(_module(spec, T), _point(spec, T), spec.prec, spec.policy)
    rep = scattering_det(U)
    return {
        "d": rep.d.to_json(),
        "derived_g": rep.derived_g.to_json(),
        "g_constant": bool(rep.g_constant),
        "g_value": rep.g_value.to_json(),
        "expected_g": rep.expected_g.to_json(),
        "rebuilt": rep.rebuilt.to_json() if rep.rebuilt is not None else None,
        "fq_scalar": rep.fq_scalar.to_json() if rep.fq_scalar is not None else None,
        "unit_ratio": rep.unit_ratio.to_json() if rep.unit_ratio is not None else None,
        "unit_ratio_in_fq_series": bool(rep.unit_in_fq_series),
        "generation": bool(rep.generation),
        "generation_detail": rep.generation_detail,
    }


def _lattice(spec: JobSpec):
    T = _tower(spec.q)
    N, Mw = spec.window
    U = build_uniformizer(_module(spec, T), _point(spec, T), N + Mw + 6, spec.policy)
    if spec.lattice == "L0":
        return lattice_from_uniformizer(U, N, Mw)
    if spec.lattice == "trivial":
        return trivial_lattice(U.level, U.n, N, Mw)
    if spec.lattice == "shifted":
        return shifted_lattice(U, -1, N, Mw)
    raise ValueError(f"unknown lattice kind {spec.lattice!r}")


def cmd_lattice_check(spec: JobSpec) -> dict:
    L = _lattice(spec)
    rep = elliptic_check(L, spec.k)
    big = elliptic_check(L.enlarge(2), spec.k)
    return {"lattice": spec.lattice, "window": list(rep.window), "verdicts": rep.verdicts(),
            "passed": rep.passed, "coranks": rep.coranks, "expected_coranks": rep.expected_coranks,
            "h0": rep.h0, "h1": rep.h1, "window_stable": rep.verdicts() == big.verdicts()}


def cmd_stabilizer(spec: JobSpec) -> dict:
    L = _lattice(spec)
    res = stabilizer_ring(L, depth=max(1, spec.window[0] // 2))
    return {"basis": [s.to_json() for s in res.basis], "u_degrees": res.as_u_degrees(),
            "exponent_range": list(res.exponents), "has_u": bool(res.has_u), "closed": bool(res.closed)}


def cmd_verify(spec: JobSpec) -> dict:
    cfg = harness.HarnessConfig(seed=spec.seed)
    names = spec.suites or list(harness.SUITES)
    unknown = [n for n in names if n not in harness.SUITES]
    if unknown:
        raise ValueError(f"unknown suite(s): {', '.join(unknown)}")
    runs = harness.run_all(names, cfg)
    for r in runs:
        print(f"{r.name}: {'pass' if r.passed else 'FAIL'} ({r.seconds:.2f} s)", file=sys.stderr)
    return harness.report(runs)


def cmd_cache(spec: JobSpec) -> dict:
    store = Store()
    if spec.action == "clear":
        return {"removed": store.clear()}
    if spec.action == "check":
        return {"corrupt": store.check(), "entries": len(store.entries())}
    fields = tate_key_fields(spec.q, spec.theta, spec.phi, _xjson(spec), spec.depth, spec.policy)

    def compute():
        T = _tower(spec.q)
        Ts = tate_basis(_module(spec, T), _point(spec, T), spec.depth, spec.policy)
        return {"tower": T.to_json(), "tate": Ts.to_json()}

    payload, status = store.fetch(fields, compute, strict=spec.strict)
    return {"status": status, "key": store.key(fields), "payload": payload}


COMMANDS = {
    "uniformizer": cmd_uniformizer,
    "torsion": cmd_torsion,
    "baker": cmd_baker,
    "scattering": cmd_scattering,
    "lattice-check": cmd_lattice_check,
    "stabilizer": cmd_stabilizer,
    "verify": cmd_verify,
    "cache": cmd_cache,
}


# ---------------------------------------------------------------- argparse

def _exit_code_help():
    lines = ["exit codes:", f"  0   success", f"  {EXIT_FAILED_CHECK}   verify: a suite failed",
             f"  {EXIT_USAGE}   usage error"]
    seen = {}
    for name, code in sorted(EXIT_CODES.items(), key=lambda kv: kv[1]):
        seen.setdefault(code, []).append(name)
    for code, names in seen.items():
        lines.append(f"  {code}  {' / '.join(names)}")
    lines.append(f"  {EllSheafError.code}  other library error")
    lines.append(f"\nstore directory: ${STORE_ENV} (default ~/.cache/ellsheaf)")
    return "\n".join(lines)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--q", type=int, default=2, help="base field size")
    common.add_argument("--theta", type=_parse_elem, default=[1], help="theta as F_p-digits, e.g. 1 or 0,1")
    common.add_argument("--phi", type=_parse_elems, default=None,
                        help="module coefficients theta;g1;...;gn (default: Carlitz)")
    common.add_argument("--xi", type=_parse_elem, default=[0], help="rational point t_x = t - xi")
    common.add_argument("--x", type=_parse_elems, default=None, help="monic P (low first) for deg(x) > 1")
    common.add_argument("--prec", type=int, default=6)
    common.add_argument("--policy", choices=POLICIES, default="least")
    common.add_argument("--format", choices=["json"], default="json")
    common.add_argument("--output", default=None, help="write the artifact here (atomic)")

    p = argparse.ArgumentParser(prog="ellsheaf", description="Elliptic sheaves, uniformizers and lattices over F_q[t].",
                                epilog=_exit_code_help(), formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("uniformizer", parents=[common], help="uniformizer series (Carlitz cross-check by default)")
    t = sub.add_parser("torsion", parents=[common], help="F_q-basis of the t_x^r-division points")
    t.add_argument("--r", type=int, default=1)
    b = sub.add_parser("baker", parents=[common], help="Baker function Psi(g) = g^-1 s1^g")
    b.add_argument("--g", type=json.loads, default=None,
                   help="JSON n x n matrix of polynomials in t_x: entries are lists of F_q digits lists")
    sub.add_parser("scattering", parents=[common], help="Moore/scattering determinant report")
    for name, hlp in (("lattice-check", "elliptic-sheaf conditions on a lattice window"),
                      ("stabilizer", "stabilizer ring of a lattice window")):
        s = sub.add_parser(name, parents=[common], help=hlp)
        s.add_argument("--window", type=int, nargs=2, default=(4, 6), metavar=("N", "M"))
        s.add_argument("--lattice", choices=["L0", "trivial", "shifted"], default="L0")
        s.add_argument("--k", type=int, default=1)
    v = sub.add_parser("verify", parents=[common], help="run acceptance suites")
    v.add_argument("--suite", dest="suites", action="append", choices=list(harness.SUITES))
    v.add_argument("--seed", type=int, default=harness.HarnessConfig.seed)
    c = sub.add_parser("cache", parents=[common], help="content-addressed store of Tate chains and towers")
    c.add_argument("action", choices=["tate", "check", "clear"], nargs="?", default="tate")
    c.add_argument("--depth", type=int, default=6)
    c.add_argument("--strict", action="store_true", help="fail on a corrupted entry instead of recomputing")
    return p


def spec_from_args(ns) -> JobSpec:
    d = {k: v for k, v in vars(ns).items() if k in JobSpec.__dataclass_fields__ and v is not None}
    if "window" in d:
        d["window"] = tuple(d["window"])
    if ns.phi is not None:
        d["theta"] = ns.phi[0]
    return JobSpec(**d)


def write_atomic(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    spec = spec_from_args(ns)
    try:
        result = COMMANDS[spec.command](spec)
    except EllSheafError as exc:
        print(canonical_dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": exc.code}),
              file=sys.stderr)
        return exc.code
    except ValueError as exc:
        print(canonical_dumps({"error": "UsageError", "message": str(exc), "exit_code": EXIT_USAGE}), file=sys.stderr)
        return EXIT_USAGE
    job = asdict(spec) | {"window": list(spec.window)}
    job.pop("output")                    # where the artifact goes is not part of its content
    result = {"job": job, "result": result}
    text = canonical_dumps(result) + "\n"
    if spec.output:
        write_atomic(spec.output, text)
    else:
        sys.stdout.write(text)
    if spec.command == "verify" and not result["result"]["passed"]:
        return EXIT_FAILED_CHECK
    return 0


if __name__ == "__main__":
    sys.exit(main())
