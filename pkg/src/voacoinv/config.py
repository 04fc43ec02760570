"""Problem configurations read from JSON.

Schema (version 1)::

    {
      "schema_version": 1,
      "command": "verify-axioms" | "coinvariants" | "propagation"
                 | "vector-field" | "chern" | "coord-change",
      "voa": {"tag": "heisenberg" | "virasoro", "params": {"c": "1/2"}},
      "modules": [{"tag": "fock", "params": {"lambda": "1"}},
                  {"tag": "simple" | "verma", "params": {"h": "1/16"}},
                  {"tag": "vacuum"}],
      "points": ["0", "1", "inf"],
      "caps": {"D": 6, "M": 6, "K": 6, "N": 6},
      "output": "report.json",
      ... command-specific fields (see ``COMMAND_FIELDS``)
    }

Rationals are given as integers or strings ``"p/q"``; floats are rejected.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .kernel.rational import parse_point, point_str
from .kernel.scalars import qstr

SCHEMA_VERSION = 1

COMMANDS = ("verify-axioms", "coinvariants", "propagation", "vector-field", "chern", "coord-change")

VOA_TAGS = {"heisenberg": (), "virasoro": ("c",)}
MODULE_TAGS = {"fock": ("lambda",), "verma": ("h",), "simple": ("h",), "vacuum": ()}

COMMON_FIELDS = {"schema_version", "command", "voa", "modules", "points", "caps", "output"}
COMMAND_FIELDS = {
    "verify-axioms": {"modes", "pmax"},
    "coinvariants": {"stabilization"},
    "propagation": {"stabilization", "extra_points"},
    "vector-field": {"vector_fields", "random"},
    "chern": {"rank", "c", "a", "g", "n"},
    "coord-change": {"rho", "order", "huang"},
}


class ConfigError(ValueError):
    """A configuration does not validate; ``field`` names the offending entry."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


def rational(value, where):
    if isinstance(value, bool) or isinstance(value, float):
        raise ConfigError(where, "expected an exact rational (integer or \"p/q\" string)")
    try:
        return Fraction(value.strip()) if isinstance(value, str) else Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ConfigError(where, f"not a rational number: {value!r}") from None


def integer(value, where, low=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(where, f"expected an integer, got {value!r}")
    if low is not None and value < low:
        raise ConfigError(where, f"must be >= {low}")
    return value


@dataclass(frozen=True)
class InstanceSpec:
    tag: str
    params: tuple = ()

    def param(self, name):
        return dict(self.params)[name]

    def to_json(self):
        return {"tag": self.tag, "params": {k: qstr(v) for k, v in self.params}}


@dataclass(frozen=True)
class Caps:
    D: int = 6
    M: int = 6
    K: int = 6
    N: int = None

    def to_json(self):
        return {"D": self.D, "M": self.M, "K": self.K, "N": self.N}


@dataclass
class ProblemConfig:
    command: str
    voa: InstanceSpec = None
    modules: list = field(default_factory=list)
    points: list = field(default_factory=list)
    caps: Caps = field(default_factory=Caps)
    options: dict = field(default_factory=dict)
    output: str = None

    def to_json(self):
        """Normalized echo of the configuration (deterministic)."""
        out = {"schema_version": SCHEMA_VERSION, "command": self.command,
               "caps": self.caps.to_json(), "options": self.options}
        if self.voa is not None:
            out["voa"] = self.voa.to_json()
        out["modules"] = [m.to_json() for m in self.modules]
        out["points"] = [point_str(p) for p in self.points]
        return out


def _instance(raw, where, tags):
    if not isinstance(raw, dict):
        raise ConfigError(where, "expected an object with 'tag' and 'params'")
    tag = raw.get("tag")
    if tag not in tags:
        raise ConfigError(f"{where}.tag", f"unknown tag {tag!r}; expected one of {sorted(tags)}")
    params = raw.get("params", {}) or {}
    if not isinstance(params, dict):
        raise ConfigError(f"{where}.params", "expected an object")
    extra = set(params) - set(tags[tag])
    if extra:
        raise ConfigError(f"{where}.params", f"unexpected parameters {sorted(extra)}")
    vals = []
    for name in tags[tag]:
        if name not in params:
            raise ConfigError(f"{where}.params.{name}", "required")
        vals.append((name, rational(params[name], f"{where}.params.{name}")))
    return InstanceSpec(tag, tuple(vals))


def _points(raw):
    if not isinstance(raw, list):
        raise ConfigError("points", "expected a list")
    pts = []
    for k, p in enumerate(raw):
        try:
            if isinstance(p, (bool, float)):
                raise TypeError
            pts.append(parse_point(p))
        except (TypeError, ValueError, ZeroDivisionError):
            raise ConfigError(f"points[{k}]", f"not a rational point or 'inf': {p!r}") from None
    seen = set()
    for k, p in enumerate(pts):
        if p in seen:
            raise ConfigError(f"points[{k}]", f"duplicate point {point_str(p)}")
        seen.add(p)
    return pts


def _caps(raw):
    if raw is None:
        return Caps()
    if not isinstance(raw, dict):
        raise ConfigError("caps", "expected an object")
    extra = set(raw) - {"D", "M", "K", "N"}
    if extra:
        raise ConfigError("caps", f"unexpected caps {sorted(extra)}")
    vals = {}
    for name, low in (("D", 1), ("M", 1), ("K", 1), ("N", 2)):
        if name in raw:
            vals[name] = integer(raw[name], f"caps.{name}", low)
    return Caps(**vals)


def _options(command, raw):
    opts = {}
    if command == "verify-axioms":
        opts["modes"] = integer(raw.get("modes", 2), "modes", 0)
        opts["pmax"] = integer(raw.get("pmax", 3), "pmax", 0)
    elif command in ("coinvariants", "propagation"):
        stab = raw.get("stabilization", True)
        if not isinstance(stab, bool):
            raise ConfigError("stabilization", "expected true or false")
        opts["stabilization"] = stab
        if command == "propagation":
            extra = raw.get("extra_points")
            if not isinstance(extra, list) or not extra:
                raise ConfigError("extra_points", "required: a non-empty list of points")
            opts["extra_points"] = [point_str(p) for p in _points(extra)]
    elif command == "vector-field":
        fields = raw.get("vector_fields", [])
        if not isinstance(fields, list):
            raise ConfigError("vector_fields", "expected a list of {num, den} objects")
        clean = []
        for k, f in enumerate(fields):
            if not isinstance(f, dict) or "num" not in f:
                raise ConfigError(f"vector_fields[{k}]", "expected {\"num\": [...], \"den\": [...]}")
            num = [qstr(rational(c, f"vector_fields[{k}].num")) for c in f["num"]]
            den = [qstr(rational(c, f"vector_fields[{k}].den")) for c in f.get("den", [1])]
            if not any(Fraction(c) for c in den):
                raise ConfigError(f"vector_fields[{k}].den", "denominator is zero")
            clean.append({"num": num, "den": den})
        opts["vector_fields"] = clean
        rnd = raw.get("random")
        if rnd is not None:
            if not isinstance(rnd, dict):
                raise ConfigError("random", "expected {\"count\": n, \"seed\": s}")
            opts["random"] = {"count": integer(rnd.get("count", 20), "random.count", 0),
                              "seed": integer(rnd.get("seed", 0), "random.seed"),
                              "max_pole": integer(rnd.get("max_pole", 2), "random.max_pole", 0),
                              "max_degree": integer(rnd.get("max_degree", 2), "random.max_degree", 0)}
        if not clean and not rnd:
            raise ConfigError("vector_fields", "give vector_fields and/or random")
    elif command == "chern":
        for name in ("rank", "g"):
            if name not in raw:
                raise ConfigError(name, "required")
        opts["rank"] = integer(raw["rank"], "rank", 0)
        opts["g"] = integer(raw["g"], "g", 0)
        if "c" in raw:
            opts["c"] = qstr(rational(raw["c"], "c"))
        if "a" in raw:
            if not isinstance(raw["a"], list):
                raise ConfigError("a", "expected a list of conformal dimensions")
            opts["a"] = [qstr(rational(v, f"a[{k}]")) for k, v in enumerate(raw["a"])]
        if "n" in raw:
            opts["n"] = integer(raw["n"], "n", 0)
    elif command == "coord-change":
        rho = raw.get("rho")
        if not isinstance(rho, list) or len(rho) < 2:
            raise ConfigError("rho", "required: coefficient list [a0, a1, a2, ...] with a0 = 0, a1 != 0")
        coeffs = [rational(c, f"rho[{k}]") for k, c in enumerate(rho)]
        if coeffs[0]:
            raise ConfigError("rho[0]", "a coordinate change has zero constant term")
        if not coeffs[1]:
            raise ConfigError("rho[1]", "linear coefficient must be nonzero")
        opts["rho"] = [qstr(c) for c in coeffs]
        opts["order"] = integer(raw.get("order", 32), "order", 2)
        h = raw.get("huang")
        if h is not None:
            if not isinstance(h, dict) or "element" not in h:
                raise ConfigError("huang", "expected {\"element\": name, \"modes\": [lo, hi], \"max_source_degree\": d}")
            modes = h.get("modes", [-2, 2])
            if (not isinstance(modes, list) or len(modes) != 2
                    or integer(modes[0], "huang.modes[0]") > integer(modes[1], "huang.modes[1]")):
                raise ConfigError("huang.modes", "expected [lo, hi] with lo <= hi")
            if not isinstance(h["element"], str):
                raise ConfigError("huang.element", "expected a basis vector name")
            opts["huang"] = {"element": h["element"], "modes": list(modes),
                             "max_source_degree": integer(h.get("max_source_degree", 3),
                                                          "huang.max_source_degree", 0)}
    return opts


def parse_config(raw):
    """Validate a decoded JSON object and build a ProblemConfig."""
    if not isinstance(raw, dict):
        raise ConfigError("config", "expected a JSON object")
    version = raw.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError("schema_version", f"unsupported version {version!r} (expected {SCHEMA_VERSION})")
    command = raw.get("command")
    if command not in COMMANDS:
        raise ConfigError("command", f"unknown command {command!r}; expected one of {list(COMMANDS)}")
    unknown = set(raw) - COMMON_FIELDS - COMMAND_FIELDS[command]
    if unknown:
        raise ConfigError(sorted(unknown)[0], f"unexpected field for command {command}")
    output = raw.get("output")
    if output is not None and not isinstance(output, str):
        raise ConfigError("output", "expected a path string")
    caps = _caps(raw.get("caps"))
    voa = None
    if "voa" in raw:
        voa = _instance(raw["voa"], "voa", VOA_TAGS)
    elif command not in ("chern",):
        raise ConfigError("voa", "required")
    modules = []
    raw_modules = raw.get("modules", [])
    if not isinstance(raw_modules, list):
        raise ConfigError("modules", "expected a list")
    for k, m in enumerate(raw_modules):
        modules.append(_instance(m, f"modules[{k}]", MODULE_TAGS))
    points = _points(raw.get("points", []))
    if command in ("coinvariants", "propagation", "vector-field"):
        if not modules:
            raise ConfigError("modules", "at least one module is required")
        if len(points) != len(modules):
            raise ConfigError("points", f"{len(points)} points for {len(modules)} modules")
    if command == "coord-change" and len(modules) > 1:
        raise ConfigError("modules", "coord-change acts on a single module (default: the vacuum module)")
    for k, m in enumerate(modules):
        if m.tag == "fock" and voa.tag != "heisenberg":
            raise ConfigError(f"modules[{k}].tag", "fock modules need the heisenberg vertex algebra")
        if m.tag in ("verma", "simple") and voa.tag != "virasoro":
            raise ConfigError(f"modules[{k}].tag", f"{m.tag} modules need the virasoro vertex algebra")
    options = _options(command, raw)
    if command == "propagation":
        for k, q in enumerate(options["extra_points"]):
            if parse_point(q) in points:
                raise ConfigError(f"extra_points[{k}]", "must differ from the marked points")
    if command == "chern":
        if "c" not in options and voa is None:
            raise ConfigError("c", "required (or give a voa to use its central charge)")
        if "a" not in options and not modules:
            raise ConfigError("a", "required (or give modules to use their conformal dimensions)")
    return ProblemConfig(command, voa, modules, points, caps, options, output)

