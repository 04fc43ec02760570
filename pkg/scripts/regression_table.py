"""Record the c = 1/2 Virasoro three-point dimensions at (0, 1, inf).

Writes ``tests/data/ising_regression.json`` (or the path given with --out)
with the stabilized dimension for each ordered triple of conformal
dimensions from {0, 1/2, 1/16}, after checking each value against the
brute-force oracle of the test suite.

    python3 scripts/regression_table.py [--caps 6] [--out PATH] [--no-oracle]
"""

import argparse
import itertools
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

from voacoinv.coinvariants import CoinvariantProblem, coinvariants_dimension  # noqa: E402
from voacoinv.voa.instance import build_simple, build_virasoro  # noqa: E402

WEIGHTS = ("0", "1/2", "1/16")
POINTS = ["0", "1", "inf"]


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--caps", type=int, default=6, help="D = M = K = N")
    p.add_argument("--out", default=str(ROOT / "tests" / "data" / "ising_regression.json"))
    p.add_argument("--no-oracle", action="store_true", help="skip the brute-force comparison")
    args = p.parse_args(argv)
    n = args.caps
    V = build_virasoro(Fraction(1, 2), n)
    simple = {h: build_simple(Fraction(1, 2), Fraction(h), n, V) for h in WEIGHTS}
    dims = {}
    for hs in itertools.product(WEIGHTS, repeat=3):
        start = time.perf_counter()
        prob = CoinvariantProblem(V, [simple[h] for h in hs], POINTS, n, n, n)
        rep = coinvariants_dimension(prob)
        if not rep.stabilized:
            raise SystemExit(f"{hs}: not stabilized: {rep.stabilization}")
        line = f"{','.join(hs):>14}  dim {rep.dimension}  ambient {rep.ambient:4d}"
        if not args.no_oracle:
            from oracles import BruteForceCoinvariants
            oracle = BruteForceCoinvariants(V, prob.modules, POINTS).dimension(n, n, n)
            if oracle != (rep.dimension, rep.ambient):
                raise SystemExit(f"{hs}: engine {rep.dimension} disagrees with oracle {oracle[0]}")
            line += "  oracle ok"
        print(f"{line}  {time.perf_counter() - start:.2f}s")
        dims[",".join(hs)] = rep.dimension
    out = {"central_charge": "1/2", "points": POINTS, "caps": {"D": n, "M": n, "K": n, "N": n},
           "dimensions": dims}
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    Path(args.out).write_text(json.dumps(out, indent=2, sort_keys=True) + "\n")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
