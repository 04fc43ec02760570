"""Command-line entry point: JSON config in, deterministic JSON report out.

Exit codes: 0 success, 2 validation error, 3 insufficient truncation,
4 internal failure. Every error is also written into the report.

Reports are deterministic given the config and tool version, except for
the ``runtime`` section (wall times, thread count, cache hits), which
describes the particular run.
"""

import argparse
import json
import os
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .chern import (AtiyahCombination, chern_character, first_chern, moduli_dimension,
                    total_chern)
from .coinvariants import (CoinvariantEngine, CoinvariantProblem, coinvariants_dimension,
                           propagation_check, random_vector_field, vector_field_triviality)
from .config import ConfigError, parse_config
from .errors import DimensionError, DomainError, InsufficientTruncation
from .kernel.rational import RationalFunction
from .kernel.scalars import qstr
from .kernel.sparse import SparseMatrix
from .modules import (CoordinateChange, coordinate_change_action, huang_compatibility_check,
                      is_block_lower_triangular, vector_field_of)
from .voa.axioms import run_axiom_suite, run_module_suite
from .voa.instance import (build_fock, build_heisenberg, build_simple, build_verma,
                           build_virasoro, voa_as_module)
from .voa.serialize import FORMAT_VERSION, cache_key, cache_lookup, cache_store

EXIT_OK, EXIT_VALIDATION, EXIT_TRUNCATION, EXIT_INTERNAL = 0, 2, 3, 4
ENV_PREFIX = "VOACOINV_"
REPORT_SCHEMA_VERSION = 1


def default_cache_dir():
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return os.path.join(base, "voacoinv")


# -- instances ----------------------------------------------------------------

class InstanceCache:
    """Builds instances and prefills their mode tables from the cache directory."""

    def __init__(self, cache_dir):
        self.dir = cache_dir
        self.events = []
        self.warnings = []
        self._fresh = []
        self.build_ms = 0

    def attach(self, X):
        if self.dir is None:
            return X
        start = time.perf_counter()
        hit, warning = cache_lookup(X, self.dir)
        self.build_ms += int((time.perf_counter() - start) * 1000)
        self.events.append({"instance": cache_key(X), "hit": hit})
        if warning:
            self.warnings.append(warning)
        if not hit:
            self._fresh.append(X)
        return X

    def store(self):
        for X in self._fresh:
            try:
                cache_store(X, self.dir)
            except OSError as exc:
                self.warnings.append(f"could not write cache for {cache_key(X)}: {exc}")
        self._fresh = []


def build_voa(spec, N, cache):
    if spec.tag == "heisenberg":
        V = build_heisenberg(N)
    else:
        V = build_virasoro(spec.param("c"), N)
    return cache.attach(V)


def build_module(spec, V, N, cache):
    if spec.tag == "fock":
        M = build_fock(spec.param("lambda"), N, parent=V)
    elif spec.tag == "verma":
        M = build_verma(V.central_charge, spec.param("h"), N, parent=V)
    elif spec.tag == "simple":
        M = build_simple(V.central_charge, spec.param("h"), N, parent=V)
    else:
        M = voa_as_module(V, N)
    return cache.attach(M)


def _verdict_json(v):
    return {"passed": v.passed, "checked": v.checked, "witness": v.witness,
            "sources": list(v.sources), "details": dict(v.details)}


# -- commands -------------------------------------------------------------------

def _coinvariant_setup(cfg, cache, threads):
    caps = cfg.caps
    N = caps.N if caps.N is not None else max(caps.D, caps.K, 2)
    V = build_voa(cfg.voa, max(N, caps.K), cache)
    modules = [build_module(m, V, N, cache) for m in cfg.modules]
    problem = CoinvariantProblem(V, modules, cfg.points, caps.D, caps.M, caps.K)
    return V, problem


def _report_json(rep):
    out = rep.to_json()
    out.pop("wall_time_ms", None)
    return out


def cmd_verify_axioms(cfg, cache, threads, timings):
    N = cfg.caps.N or 6
    V = build_voa(cfg.voa, N, cache)
    modes, pmax = cfg.options["modes"], cfg.options["pmax"]
    start = time.perf_counter()
    suite = run_axiom_suite(V, modes=modes, pmax=pmax)
    result = {"voa": {k: _verdict_json(v) for k, v in sorted(suite.items())}, "modules": []}
    passed = all(v.passed for v in suite.values())
    for spec in cfg.modules:
        M = build_module(spec, V, N, cache)
        msuite = run_module_suite(M, modes=modes, pmax=pmax)
        passed = passed and all(v.passed for v in msuite.values())
        result["modules"].append({"module": spec.to_json(), "graded_dims": list(M.space.graded_dims()),
                                  "checks": {k: _verdict_json(v) for k, v in sorted(msuite.items())}})
    result["graded_dims"] = list(V.space.graded_dims())
    result["passed"] = passed
    timings["compute_ms"] = int((time.perf_counter() - start) * 1000)
    return result


def cmd_coinvariants(cfg, cache, threads, timings):
    _, problem = _coinvariant_setup(cfg, cache, threads)
    rep = coinvariants_dimension(problem, cfg.options["stabilization"], threads)
    timings["compute_ms"] = rep.wall_time_ms
    return _report_json(rep)


def cmd_propagation(cfg, cache, threads, timings):
    V, problem = _coinvariant_setup(cfg, cache, threads)
    stab = cfg.options["stabilization"]
    start = time.perf_counter()
    base = coinvariants_dimension(problem, stab, threads)
    vac = cache.attach(voa_as_module(V, problem.modules[0].N))
    cases = []
    for q in cfg.options["extra_points"]:
        res = propagation_check(problem, q, vac, stab, threads, base=base)
        cases.append({"point": res["point"], "passed": res["passed"],
                      "with": _report_json(res["with"])})
    timings["compute_ms"] = int((time.perf_counter() - start) * 1000)
    return {"without": _report_json(base), "cases": cases,
            "passed": all(c["passed"] for c in cases)}


def _rf(spec):
    return RationalFunction(tuple(Fraction(c) for c in spec["num"]),
                            tuple(Fraction(c) for c in spec["den"]))


def _rf_json(f):
    return {"num": [qstr(c) for c in f.num], "den": [qstr(c) for c in f.den]}


def cmd_vector_field(cfg, cache, threads, timings):
    _, problem = _coinvariant_setup(cfg, cache, threads)
    fields = [_rf(s) for s in cfg.options["vector_fields"]]
    rnd = cfg.options.get("random")
    if rnd:
        rng = random.Random(rnd["seed"])
        fields += [random_vector_field(problem.points, rng, rnd["max_pole"], rnd["max_degree"])
                   for _ in range(rnd["count"])]
    start = time.perf_counter()
    engine = CoinvariantEngine(problem.voa, problem.modules, problem.points, threads)
    out = []
    for f in fields:
        res = vector_field_triviality(problem, f, threads, engine=engine)
        witness = None
        if res["witness"] is not None:
            witness = [Mi.space.names[v] for Mi, v in zip(problem.modules, res["witness"])]
        out.append({"f": _rf_json(f), "passed": res["passed"], "checked": res["checked"],
                    "witness": witness})
    timings["compute_ms"] = int((time.perf_counter() - start) * 1000)
    return {"fields": out, "passed": all(r["passed"] for r in out)}


def cmd_chern(cfg, cache, threads, timings):
    opts = cfg.options
    V = None if cfg.voa is None else build_voa(cfg.voa, 2, cache)
    c = Fraction(opts["c"]) if "c" in opts else V.central_charge
    if "a" in opts:
        a = [Fraction(x) for x in opts["a"]]
    else:
        a = [build_module(m, V, 2, cache).conformal_dimension for m in cfg.modules]
    n = opts.get("n", len(a))
    if n != len(a):
        raise DimensionError(f"n = {n} but {len(a)} conformal dimensions were given")
    g, rank = opts["g"], opts["rank"]
    top = moduli_dimension(g, n)
    cls = AtiyahCombination.of_module_data(c, a)
    ch = chern_character(rank, c, a, g, n)
    tot = total_chern(rank, c, a, g, n)
    c1 = first_chern(rank, cls, g)
    return {"moduli_dimension": top,
            "atiyah_class": {"lambda": qstr(cls.lam), "psi": [qstr(x) for x in cls.psi]},
            "first_chern": {"json": c1.to_json(), "text": c1.to_text()},
            "chern_character": {"json": ch.to_json(), "text": ch.to_text()},
            "total_chern": {"json": tot.to_json(), "text": tot.to_text()}}


def cmd_coord_change(cfg, cache, threads, timings):
    N = cfg.caps.N or 4
    V = build_voa(cfg.voa, N, cache)
    M = build_module(cfg.modules[0], V, N, cache) if cfg.modules else cache.attach(voa_as_module(V, N))
    rho = CoordinateChange.polynomial([Fraction(c) for c in cfg.options["rho"]], cfg.options["order"])
    start = time.perf_counter()
    a1, vs = vector_field_of(rho, max(M.N, 1))
    R = coordinate_change_action(rho, M)
    Rinv = coordinate_change_action(rho, M, inverse=True)
    triangular = all(M.degree(r) <= M.degree(c) for (r, c) in R.entries)
    result = {"a1": qstr(a1), "vector_field": {str(j): qstr(v) for j, v in sorted(vs.items())},
              "basis": list(M.space.names),
              "matrix": [[r, c, qstr(v)] for (r, c), v in sorted(R.entries.items())],
              "degree_non_increasing": triangular,
              "unipotent": is_block_lower_triangular(R, M),
              "inverse_ok": R @ Rinv == SparseMatrix.identity(M.dim)}
    h = cfg.options.get("huang")
    if h:
        lo, hi = h["modes"]
        v = huang_compatibility_check(rho, M, V.space.index(h["element"]), range(lo, hi + 1),
                                      h["max_source_degree"])
        result["huang"] = _verdict_json(v)
    timings["compute_ms"] = int((time.perf_counter() - start) * 1000)
    return result


COMMAND_HANDLERS = {
    "verify-axioms": cmd_verify_axioms,
    "coinvariants": cmd_coinvariants,
    "propagation": cmd_propagation,
    "vector-field": cmd_vector_field,
    "chern": cmd_chern,
    "coord-change": cmd_coord_change,
}


# -- running --------------------------------------------------------------------

def _error(kind, exc, **extra):
    out = {"type": kind, "message": str(exc)}
    out.update({k: v for k, v in extra.items() if v is not None})
    return out


def run(raw_config, cache_dir=None, threads=1):
    """Run one configuration; returns ``(exit_code, report dict)``."""
    start = time.perf_counter()
    report = {"tool": "voacoinv", "version": __version__, "format_version": FORMAT_VERSION,
              "report_schema_version": REPORT_SCHEMA_VERSION}
    cache = InstanceCache(cache_dir)
    timings = {}
    code = EXIT_OK
    try:
        cfg = parse_config(raw_config)
        report["config"] = cfg.to_json()
        report["result"] = COMMAND_HANDLERS[cfg.command](cfg, cache, threads, timings)
        report["status"] = "ok"
        cache.store()
    except ConfigError as exc:
        code = EXIT_VALIDATION
        report["error"] = _error("validation", exc, field=exc.field)
    except InsufficientTruncation as exc:
        code = EXIT_TRUNCATION
        report["error"] = _error("insufficient_truncation", exc, needed=exc.needed)
    except (DomainError, DimensionError) as exc:
        code = EXIT_VALIDATION
        report["error"] = _error("validation", exc)
    except Exception as exc:  # noqa: BLE001 - every failure must land in the report
        code = EXIT_INTERNAL
        report["error"] = _error("internal", f"{type(exc).__name__}: {exc}")
    if code != EXIT_OK:
        report["status"] = "error"
        report.setdefault("result", None)
        if isinstance(raw_config, dict):
            report.setdefault("config", raw_config)
    report["exit_code"] = code
    report["runtime"] = {"wall_time_ms": int((time.perf_counter() - start) * 1000),
                         "build_ms": cache.build_ms, "threads": threads, **timings,
                         "cache": {"dir": None if cache_dir is None else str(cache_dir),
                                   "lookups": cache.events, "warnings": cache.warnings}}
    return code, report


def render(report):
    """Canonical report text: sorted keys, two-space indent, UTF-8."""
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def deterministic_part(report):
    """The report without its run-specific ``runtime`` section."""
    return {k: v for k, v in report.items() if k != "runtime"}


def _env(name, default=None):
    return os.environ.get(ENV_PREFIX + name, default)


def build_parser():
    p = argparse.ArgumentParser(prog="voacoinv", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="JSON problem configuration (env VOACOINV_CONFIG; '-' for stdin)")
    p.add_argument("--cache-dir", help="instance cache directory (env VOACOINV_CACHE_DIR)")
    p.add_argument("--threads", type=int, help="worker threads (env VOACOINV_THREADS; default: logical cores)")
    p.add_argument("--output", help="report path (env VOACOINV_OUTPUT; default: config 'output' or stdout)")
    p.add_argument("--version", action="version", version=f"voacoinv {__version__}")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    config_path = args.config or _env("CONFIG")
    cache_dir = args.cache_dir or _env("CACHE_DIR") or default_cache_dir()
    threads = args.threads
    if threads is None:
        env_threads = _env("THREADS")
        try:
            threads = int(env_threads) if env_threads else (os.cpu_count() or 1)
        except ValueError:
            threads = 0
    output = args.output or _env("OUTPUT")

    raw = None
    load_error = None
    if not config_path:
        load_error = ConfigError("--config", "no configuration given")
    elif threads < 1:
        load_error = ConfigError("--threads", "must be a positive integer")
    else:
        try:
            text = sys.stdin.read() if config_path == "-" else Path(config_path).read_text()
            raw = json.loads(text)
        except (OSError, ValueError) as exc:
            load_error = ConfigError("--config", f"cannot read configuration: {exc}")
    if load_error is not None:
        code = EXIT_VALIDATION
        report = {"tool": "voacoinv", "version": __version__, "format_version": FORMAT_VERSION,
                  "report_schema_version": REPORT_SCHEMA_VERSION, "status": "error",
                  "result": None, "exit_code": code,
                  "error": _error("validation", load_error, field=load_error.field)}
    else:
        code, report = run(raw, cache_dir, threads)
        if output is None and isinstance(raw, dict) and isinstance(raw.get("output"), str):
            output = raw["output"]
    text = render(report)
    if output and output != "-":
        Path(output).parent.mkdir(parents=True, exist_ok=True)
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if code != EXIT_OK:
        print(f"voacoinv: {report['error']['type']}: {report['error']['message']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
