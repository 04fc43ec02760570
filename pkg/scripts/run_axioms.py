"""Run the axiom suite on a truncated vertex algebra and print one line per check.

    python3 scripts/run_axioms.py heisenberg --N 6
    python3 scripts/run_axioms.py virasoro --c 1/2 --N 6 --module simple:1/16
"""

import argparse
import time
from fractions import Fraction

from voacoinv.voa.axioms import run_axiom_suite, run_module_suite
from voacoinv.voa.instance import (build_fock, build_heisenberg, build_simple, build_verma,
                                   build_virasoro, voa_as_module)


def build_module(spec, V, N):
    tag, _, value = spec.partition(":")
    if tag == "fock":
        return build_fock(Fraction(value), N, V)
    if tag == "verma":
        return build_verma(V.central_charge, Fraction(value), N, V)
    if tag == "simple":
        return build_simple(V.central_charge, Fraction(value), N, V)
    if tag == "vacuum":
        return voa_as_module(V, N)
    raise SystemExit(f"unknown module {spec!r}")


def report(title, suite):
    for name, v in sorted(suite.items()):
        status = "ok  " if v.passed else "FAIL"
        extra = f"  ({v.details})" if v.details else ""
        print(f"  {status} {title}.{name}: {v.checked} checks{extra}")
        if not v.passed:
            print(f"       witness: {v.witness}")
    return all(v.passed for v in suite.values())


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("voa", choices=["heisenberg", "virasoro"])
    p.add_argument("--c", default="1/2", help="central charge (virasoro)")
    p.add_argument("--N", type=int, default=6, help="truncation degree")
    p.add_argument("--modes", type=int, default=2, help="check modes |i|, |j| <= modes")
    p.add_argument("--module", action="append", default=[],
                   help="fock:LAMBDA, verma:H, simple:H or vacuum (repeatable)")
    args = p.parse_args(argv)
    start = time.perf_counter()
    V = build_heisenberg(args.N) if args.voa == "heisenberg" else build_virasoro(Fraction(args.c), args.N)
    print(f"{V!r}")
    ok = report("voa", run_axiom_suite(V, modes=args.modes))
    for spec in args.module:
        M = build_module(spec, V, args.N)
        print(f"{M!r}")
        ok = report(spec, run_module_suite(M, modes=args.modes)) and ok
    print(f"{'all checks passed' if ok else 'FAILURES'} in {time.perf_counter() - start:.1f}s")
    raise SystemExit(0 if ok else 1)


if __name__ == "__main__":
    main()
