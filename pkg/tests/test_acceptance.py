"""Acceptance criteria, one test per criterion.

Each test prints a single ``criterion k PASS/FAIL`` line (also collected in
the terminal summary). Every comparison is exact: rational arithmetic with
zero tolerance. The only pinned tolerances are the wall-time budgets.
"""

import itertools
import json
import random
import time
from fractions import Fraction
from pathlib import Path

import pytest

from oracles import BruteForceCoinvariants
from voacoinv.chern import (chern_character, moduli_dimension, taut_log, total_chern,
                            total_chern_from_character, character_from_total_chern,
                            TautPolynomial)
from voacoinv.chiral import LVElement, lv_bracket, virasoro_image
from voacoinv.cli import deterministic_part, render, run
from voacoinv.coinvariants import (CoinvariantEngine, CoinvariantProblem, coinvariants_dimension,
                                   propagation_check, random_vector_field, vector_field_triviality)
from voacoinv.kernel.series import TruncatedSeries, compose, invert_composition
from voacoinv.modules import CoordinateChange, gamma_gluing, huang_compatibility_check
from voacoinv.voa.axioms import run_axiom_suite
from voacoinv.voa.instance import (build_fock, build_heisenberg, build_simple, build_verma,
                                   build_virasoro, voa_as_module)
from voacoinv.voa.virasoro import VirasoroElement, virasoro_bracket

AXIOM_BUDGET_S = 60
COORD_BUDGET_S = 120
CASE_BUDGET_S = 600
CAPS = (6, 6, 6)
CHARGES = (-2, -1, 0, 1, 2)
WEIGHTS = ("0", "1/2", "1/16")
REGRESSION = Path(__file__).parent / "data" / "ising_regression.json"
EXTRA_POINTS = {2: ("1", "-1", "1/2"), 3: ("2", "-1", "1/2")}
FIELDS_PER_CONFIG = 20

pytestmark = pytest.mark.acceptance


# -- shared instances -----------------------------------------------------------------

@pytest.fixture(scope="module")
def heis():
    H = build_heisenberg(6)
    return H, {lam: build_fock(lam, 6, H) for lam in CHARGES}, voa_as_module(H, 6)


@pytest.fixture(scope="module")
def ising():
    V = build_virasoro(Fraction(1, 2), 6)
    return V, {h: build_simple(Fraction(1, 2), Fraction(h), 6, V) for h in WEIGHTS}, voa_as_module(V, 6)


def heisenberg_configs():
    out = []
    for n, pts in ((2, ("0", "inf")), (3, ("0", "1", "inf"))):
        out += [(lams, pts) for lams in itertools.product(CHARGES, repeat=n)]
    return out


def ising_configs():
    return [(hs, ("0", "1", "inf")) for hs in itertools.product(WEIGHTS, repeat=3)]


@pytest.fixture(scope="module")
def heis_reports(heis):
    """Stabilized reports and wall times for every Heisenberg case."""
    H, fock, _ = heis
    out = {}
    for lams, pts in heisenberg_configs():
        prob = CoinvariantProblem(H, [fock[x] for x in lams], list(pts), *CAPS)
        start = time.perf_counter()
        rep = coinvariants_dimension(prob)
        out[(lams, pts)] = (prob, rep, time.perf_counter() - start)
    return out


@pytest.fixture(scope="module")
def ising_reports(ising):
    V, simple, _ = ising
    out = {}
    for hs, pts in ising_configs():
        prob = CoinvariantProblem(V, [simple[h] for h in hs], list(pts), *CAPS)
        out[(hs, pts)] = (prob, coinvariants_dimension(prob))
    return out


# -- 1. axioms ---------------------------------------------------------------------------

def test_criterion_1_axiom_suite(criterion):
    with criterion(1, "vacuum, Virasoro (with central term), degree rule and commutator formula "
                      "|i|,|j| <= 2 on Heisenberg and Virasoro c in {1/2, 1, 26} at N = 6") as c:
        start = time.perf_counter()
        checked, skipped, failures = 0, 0, []
        for V in (build_heisenberg(6), *(build_virasoro(x, 6) for x in ("1/2", "1", "26"))):
            suite = run_axiom_suite(V, modes=2, pmax=3)
            for name in ("vacuum", "virasoro", "degree_rule", "commutator"):
                v = suite[name]
                checked += v.checked
                if not v.passed:
                    failures.append(f"{V.tag}{V.params} {name}: {v.witness}")
            skipped += suite["commutator"].details["skipped_windows"]
            # [L_2, L_-2] = 4 L_0 + c/2 on the vacuum
            om = V.conformal_vector
            vac = {V.vacuum: Fraction(1)}
            if V.mode_state(om, 3, V.mode_state(om, -1, vac)) != {V.vacuum: V.central_charge / 2}:
                failures.append(f"{V.tag}{V.params}: central term")
        elapsed = time.perf_counter() - start
        c.detail = (f"{checked} exact checks, {skipped} mode pairs outside the N = 6 window, "
                    f"{elapsed:.1f}s (budget {AXIOM_BUDGET_S}s)")
        assert not failures, failures
        assert elapsed < AXIOM_BUDGET_S


# -- 2. the bracket on L(V) ------------------------------------------------------------------

def _random_element(V, rng, max_degree, max_terms=3):
    basis = [a for a in range(V.dim) if 0 < V.degree(a) <= max_degree]
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        terms[(rng.choice(basis), rng.randint(-3, 3))] = Fraction(rng.randint(-3, 3) or 1, rng.randint(1, 3))
    return LVElement(V, terms)


def test_criterion_2_bracket(criterion):
    with criterion(2, "antisymmetry and Jacobi on 100 random triples per instance; "
                      "Virasoro embedding for |p|, |q| <= 3") as c:
        rng = random.Random(20240601)
        # degree <= 3 states on an N = 8 Heisenberg truncation give non-central nested brackets
        instances = [(build_heisenberg(8), 3)] + [(build_virasoro(x, 6), 2) for x in ("1/2", "1", "26")]
        failures, nontrivial, embedded = [], 0, 0
        for V, deg in instances:
            for _ in range(100):
                x, y, z = (_random_element(V, rng, deg) for _ in range(3))
                if not (lv_bracket(x, y) + lv_bracket(y, x)).is_zero():
                    failures.append(f"antisymmetry {V.tag}: {x}, {y}")
                inner = lv_bracket(y, z)
                jac = lv_bracket(x, inner) + lv_bracket(y, lv_bracket(z, x)) + lv_bracket(z, lv_bracket(x, y))
                if not jac.is_zero():
                    failures.append(f"Jacobi {V.tag}: {x}, {y}, {z}")
                nontrivial += not lv_bracket(x, inner).is_zero()
            for p in range(-3, 4):
                for q in range(-3, 4):
                    lhs = virasoro_image(V, virasoro_bracket(VirasoroElement.L(p), VirasoroElement.L(q)))
                    rhs = lv_bracket(virasoro_image(V, VirasoroElement.L(p)),
                                     virasoro_image(V, VirasoroElement.L(q)))
                    embedded += 1
                    if lhs != rhs:
                        failures.append(f"embedding {V.tag}{V.params}: p={p}, q={q}")
        c.detail = (f"{100 * len(instances)} triples on {len(instances)} instances "
                    f"({nontrivial} with nonzero nested bracket), {embedded} embedding brackets, exact")
        assert not failures, failures[:5]


# -- 3. coordinate changes ---------------------------------------------------------------------

def test_criterion_3_coordinate_changes(criterion):
    with criterion(3, "reversion to order 8, gamma involution to order 12, Huang compatibility "
                      "for rho in {z+z^2, z+z^3}, |i| <= 2, source degree <= 3") as c:
        start = time.perf_counter()
        rng = random.Random(3)
        ident8 = TruncatedSeries.identity(8)
        for _ in range(50):
            coeffs = {1: Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 4))}
            coeffs.update({k: Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for k in range(2, 9)})
            rho = TruncatedSeries(coeffs, 8, "z", low=1)
            assert compose(invert_composition(rho), rho).agrees_with(ident8, 8)
        g = gamma_gluing(12)
        assert g(g).series.agrees_with(TruncatedSeries.identity(12), 12)
        H = build_heisenberg(6)
        V = build_virasoro(Fraction(1, 2), 6)
        modules = [voa_as_module(H), build_fock(Fraction(1, 2), 6, H), build_fock(-2, 6, H),
                   voa_as_module(V), build_simple(Fraction(1, 2), Fraction(1, 16), 6, V),
                   build_verma(Fraction(1, 2), Fraction(1, 3), 6, V)]
        checks = 0
        failures = []
        for coeffs in ([0, 1, 1], [0, 1, 0, 1]):
            rho = CoordinateChange.polynomial(coeffs, 40)
            for M in modules:
                P = M.parent
                for a in range(P.dim):
                    if not 0 < P.degree(a) <= 2:
                        continue
                    v = huang_compatibility_check(rho, M, a, range(-2, 3), 3)
                    checks += v.checked
                    if not v.passed:
                        failures.append(v.witness)
        elapsed = time.perf_counter() - start
        c.detail = f"50 reversions, {checks} Huang coefficient identities, {elapsed:.1f}s (budget {COORD_BUDGET_S}s)"
        assert not failures, failures[:3]
        assert elapsed < COORD_BUDGET_S


# -- 4. Heisenberg coinvariants -----------------------------------------------------------------

def test_criterion_4_heisenberg(criterion, heis_reports):
    with criterion(4, "Heisenberg n in {2,3}, charges in {0,+-1,+-2}: dimension 1 iff the charges sum "
                      "to 0, stabilized at D = M = K = 6") as c:
        wrong, unstable, slow = [], [], []
        for (lams, pts), (_, rep, secs) in heis_reports.items():
            if rep.dimension != (1 if sum(lams) == 0 else 0):
                wrong.append((lams, rep.dimension))
            if not rep.stabilized:
                unstable.append(lams)
            if secs >= CASE_BUDGET_S:
                slow.append(lams)
        worst = max(s for *_, s in heis_reports.values())
        c.detail = (f"{len(heis_reports)} cases, {len(wrong)} wrong, {len(unstable)} unstabilized, "
                    f"slowest {worst:.1f}s (budget {CASE_BUDGET_S}s per case)")
        assert not wrong and not unstable and not slow


# -- 5. Ising three-point dimensions ---------------------------------------------------------------

def test_criterion_5_virasoro(criterion, ising, ising_reports):
    with criterion(5, "Virasoro c = 1/2 triples at (0,1,inf), D = 6: oracle equality, permutation "
                      "and Moebius invariance, regression table") as c:
        V, simple, _ = ising
        table = {}
        problems = []
        for (hs, pts), (prob, rep) in ising_reports.items():
            table[",".join(hs)] = rep.dimension
            if not rep.stabilized:
                problems.append(f"{hs}: not stabilized")
            oracle = BruteForceCoinvariants(V, prob.modules, pts).dimension(*CAPS)
            if oracle != (rep.dimension, rep.ambient):
                problems.append(f"{hs}: engine {rep.dimension} vs oracle {oracle[0]}")
        for hs in itertools.product(WEIGHTS, repeat=3):
            perms = {table[",".join(p)] for p in itertools.permutations(hs)}
            if len(perms) != 1:
                problems.append(f"{hs}: permutation dims {perms}")
        moebius = 0
        for images in (("0", "1", "2"), ("0", "2", "-1")):
            for hs in itertools.product(WEIGHTS, repeat=3):
                prob = CoinvariantProblem(V, [simple[h] for h in hs], list(images), *CAPS)
                rep = coinvariants_dimension(prob)
                moebius += 1
                if rep.dimension != table[",".join(hs)] or not rep.stabilized:
                    problems.append(f"{hs} at {images}: {rep.dimension}")
        recorded = json.loads(REGRESSION.read_text())["dimensions"]
        if recorded != table:
            problems.append("regression table differs")
        ones = sorted(k for k, d in table.items() if d)
        c.detail = (f"27 triples = oracle, {moebius} Moebius images agree, dimension 1 for {len(ones)} "
                    f"ordered triples and 0 otherwise")
        assert not problems, problems


# -- 6. propagation of vacua ---------------------------------------------------------------------

def test_criterion_6_propagation(criterion, heis, ising, heis_reports, ising_reports):
    with criterion(6, "inserting the vacuum module at three fresh points leaves every stabilized "
                      "dimension of criteria 4-5 unchanged") as c:
        cases = [(prob, rep, heis[2]) for prob, rep, _ in heis_reports.values()]
        cases += [(prob, rep, ising[2]) for prob, rep in ising_reports.values()]
        failures = []
        checks = 0
        for prob, rep, vac in cases:
            for q in EXTRA_POINTS[len(prob.points)]:
                res = propagation_check(prob, q, vac, base=rep)
                checks += 1
                if not (res["passed"] and res["with"].stabilized):
                    failures.append((prob.points, [Mi.params for Mi in prob.modules], q))
        c.detail = f"{checks} insertions over {len(cases)} configurations, {len(failures)} failures"
        assert not failures, failures[:5]


# -- 7. vector fields ------------------------------------------------------------------------------

def test_criterion_7_vector_fields(criterion, heis_reports, ising_reports):
    with criterion(7, f"{FIELDS_PER_CONFIG} random admissible vector fields per configuration act by "
                      "zero on the truncated coinvariants") as c:
        problems = [p for p, _, _ in heis_reports.values()] + [p for p, _ in ising_reports.values()]
        rng = random.Random(7)
        failures, fields, applications = [], 0, 0
        for prob in problems:
            engine = CoinvariantEngine(prob.voa, prob.modules, prob.points)
            for _ in range(FIELDS_PER_CONFIG):
                f = random_vector_field(prob.points, rng)
                res = vector_field_triviality(prob, f, engine=engine)
                fields += 1
                applications += res["checked"]
                if not res["passed"]:
                    failures.append((prob.points, f, res["witness"]))
        c.detail = (f"{fields} fields on {len(problems)} configurations, {applications} tensor vectors "
                    f"checked, {len(failures)} failures")
        assert not failures, failures[:3]


# -- 8. Chern calculator ----------------------------------------------------------------------------

def test_criterion_8_chern(criterion):
    with criterion(8, "closed forms on M_{1,1}, Newton identities on M_{0,5}, log(exp) at rank 1") as c:
        ch = chern_character(1, 1, [Fraction(1, 2)], 1, 1)
        assert ch == TautPolynomial.linear(1, 1, Fraction(1, 2), [Fraction(1, 2)]) + 1
        assert total_chern(2, 1, [Fraction(1, 2)], 1, 1) == TautPolynomial.linear(1, 1, 1, [1]) + 1
        rng = random.Random(8)
        for _ in range(10):
            rank = rng.randint(1, 5)
            cc = Fraction(rng.randint(-30, 30), rng.randint(1, 10))
            a = [Fraction(rng.randint(-8, 8), rng.randint(1, 16)) for _ in range(5)]
            chv, tot = chern_character(rank, cc, a, 0, 5), total_chern(rank, cc, a, 0, 5)
            assert total_chern_from_character(chv) == tot
            assert character_from_total_chern(tot, rank) == chv
        for g, n in ((0, 5), (1, 3), (2, 2)):
            a = [Fraction(rng.randint(-5, 5), rng.randint(1, 8)) for _ in range(n)]
            cc = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
            assert taut_log(chern_character(1, cc, a, g, n)) == TautPolynomial.linear(g, n, cc / 2, a)
        c.detail = (f"ch = {ch.to_text()}, c(E) = {total_chern(2, 1, [Fraction(1, 2)], 1, 1).to_text()}, "
                    f"10 Newton round trips on M_0,5 (dim {moduli_dimension(0, 5)}), 3 log/exp round trips")


# -- 9. determinism ---------------------------------------------------------------------------------

DETERMINISM_CONFIGS = [
    {"command": "verify-axioms", "voa": {"tag": "heisenberg"}, "modules": [{"tag": "fock", "params": {"lambda": "2/3"}}],
     "caps": {"N": 4}},
    {"command": "coinvariants", "voa": {"tag": "virasoro", "params": {"c": "1/2"}},
     "modules": [{"tag": "simple", "params": {"h": h}} for h in ("1/16", "1/16", "1/2")],
     "points": ["0", "1", "inf"], "caps": {"D": 5, "M": 5, "K": 5}},
    {"command": "propagation", "voa": {"tag": "heisenberg"},
     "modules": [{"tag": "fock", "params": {"lambda": x}} for x in ("1", "-1")],
     "points": ["0", "inf"], "caps": {"D": 4, "M": 4, "K": 4}, "extra_points": ["1", "1/2"]},
    {"command": "vector-field", "voa": {"tag": "heisenberg"},
     "modules": [{"tag": "fock", "params": {"lambda": x}} for x in ("1", "1", "-2")],
     "points": ["0", "1", "2"], "caps": {"D": 4, "M": 4, "K": 4}, "random": {"count": 5, "seed": 1}},
    {"command": "chern", "rank": 3, "g": 0, "c": "7/10", "a": ["3/5", "3/5", "1/10", "3/2", "0"]},
    {"command": "coord-change", "voa": {"tag": "virasoro", "params": {"c": "1/2"}},
     "modules": [{"tag": "verma", "params": {"h": "1/16"}}], "rho": ["0", "2", "1", "-1/3"], "caps": {"N": 5},
     "huang": {"element": "L[-2]|0>", "modes": [-1, 1], "max_source_degree": 1}},
]


def _floats(obj):
    if isinstance(obj, float):
        return 1
    if isinstance(obj, dict):
        return sum(_floats(v) for v in obj.values())
    if isinstance(obj, list):
        return sum(_floats(v) for v in obj)
    return 0


def test_criterion_9_determinism(criterion, tmp_path):
    with criterion(9, "byte-identical reports (modulo the runtime section) across repeated runs "
                      "and thread counts 1, 2, 4, with and without a warm cache") as c:
        runs = 0
        for k, cfg in enumerate(DETERMINISM_CONFIGS):
            texts = set()
            for threads in (1, 2, 4):
                for cache in (None, tmp_path / f"cache{k}", tmp_path / f"cache{k}"):
                    code, report = run(cfg, cache_dir=cache, threads=threads)
                    assert code == 0, report["error"]
                    assert _floats(report) == 0
                    texts.add(render(deterministic_part(report)))
                    runs += 1
            assert len(texts) == 1, cfg["command"]
        c.detail = f"{len(DETERMINISM_CONFIGS)} configurations (every command), {runs} runs, no floats in reports"
