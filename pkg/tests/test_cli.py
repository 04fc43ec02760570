"""The command-line tool: validation, exit codes, determinism, caching, environment."""

import json
import subprocess
import sys

import pytest

from voacoinv import cli
from voacoinv.cli import deterministic_part, main, render, run
from voacoinv.config import ConfigError, parse_config

ISING = {"command": "coinvariants", "voa": {"tag": "virasoro", "params": {"c": "1/2"}},
         "modules": [{"tag": "simple", "params": {"h": "1/16"}}, {"tag": "simple", "params": {"h": "1/16"}},
                     {"tag": "simple", "params": {"h": "1/2"}}],
         "points": ["0", "1", "inf"], "caps": {"D": 4, "M": 4, "K": 4}}

HEIS = {"command": "coinvariants", "voa": {"tag": "heisenberg"},
        "modules": [{"tag": "fock", "params": {"lambda": 1}}, {"tag": "fock", "params": {"lambda": "-1"}}],
        "points": [0, "inf"], "caps": {"D": 4, "M": 4, "K": 4}}


def with_(base, **kw):
    out = json.loads(json.dumps(base))
    out.update(kw)
    return out


# -- configuration validation ------------------------------------------------------

@pytest.mark.parametrize("patch, field", [
    ({"points": ["0", "0", "inf"]}, "points[1]"),
    ({"points": [0.5, "1", "inf"]}, "points[0]"),
    ({"caps": {"D": 0}}, "caps.D"),
    ({"caps": {"Q": 3}}, "caps"),
    ({"command": "frobnicate"}, "command"),
    ({"voa": {"tag": "lattice"}}, "voa.tag"),
    ({"voa": {"tag": "virasoro", "params": {"c": 0.5}}}, "voa.params.c"),
    ({"extra": 1}, "extra"),
    ({"points": ["0", "1"]}, "points"),
    ({"schema_version": 2}, "schema_version"),
    ({"modules": [{"tag": "fock", "params": {"lambda": 1}}] * 3}, "modules[0].tag"),
])
def test_validation_errors_name_the_field(patch, field):
    with pytest.raises(ConfigError) as err:
        parse_config(with_(ISING, **patch))
    assert err.value.field == field
    code, report = run(with_(ISING, **patch))
    assert code == 2 and report["error"]["field"] == field and report["status"] == "error"


def test_normalized_config_echo():
    cfg = parse_config(with_(HEIS, points=["0", "Inf"]))
    echo = cfg.to_json()
    assert echo["points"] == ["0", "inf"]
    assert echo["modules"][1] == {"tag": "fock", "params": {"lambda": "-1"}}
    assert echo["caps"] == {"D": 4, "M": 4, "K": 4, "N": None}


# -- exit codes -----------------------------------------------------------------------

def test_success_report_layout():
    code, report = run(HEIS)
    assert code == 0 and report["status"] == "ok" and report["exit_code"] == 0
    assert report["result"]["dimension"] == 1 and report["result"]["stabilized"]
    assert {"tool", "version", "format_version", "report_schema_version", "config", "runtime"} <= set(report)


def test_insufficient_truncation_exits_3():
    code, report = run(with_(HEIS, caps={"D": 5, "M": 4, "K": 4, "N": 3}))
    assert code == 3
    assert report["error"]["type"] == "insufficient_truncation" and report["error"]["needed"] == 5


def test_domain_error_exits_2():
    code, report = run({"command": "chern", "rank": 1, "g": 0, "c": "1", "a": ["1", "1"]})
    assert code == 2 and "stable" in report["error"]["message"]


def test_internal_error_exits_4(monkeypatch):
    def boom(*args):
        raise RuntimeError("kaboom")
    monkeypatch.setitem(cli.COMMAND_HANDLERS, "coinvariants", boom)
    code, report = run(HEIS)
    assert code == 4 and "kaboom" in report["error"]["message"]


# -- commands -------------------------------------------------------------------------

def test_every_command_runs():
    cases = [
        ({"command": "verify-axioms", "voa": {"tag": "virasoro", "params": {"c": "1/2"}},
          "modules": [{"tag": "simple", "params": {"h": "1/16"}}], "caps": {"N": 4}},
         lambda r: r["passed"] and r["graded_dims"] == [1, 0, 1, 1, 2]),
        (ISING, lambda r: r["dimension"] == 1),
        (with_(HEIS, command="propagation", extra_points=["1", "2"]), lambda r: r["passed"]),
        (with_(ISING, command="vector-field", vector_fields=[{"num": [0, 1]}],
               random={"count": 3, "seed": 5}), lambda r: r["passed"] and len(r["fields"]) == 4),
        ({"command": "chern", "voa": {"tag": "virasoro", "params": {"c": "1/2"}},
          "modules": ISING["modules"] + [{"tag": "simple", "params": {"h": "1/2"}}], "rank": 1, "g": 0},
         lambda r: r["chern_character"]["text"] == "1 + 1/4·λ + 1/16·ψ₁ + 1/16·ψ₂ + 1/2·ψ₃ + 1/2·ψ₄"),
        ({"command": "coord-change", "voa": {"tag": "virasoro", "params": {"c": "1/2"}},
          "modules": [{"tag": "verma", "params": {"h": "1/16"}}], "rho": [0, 1, 1], "caps": {"N": 5},
          "huang": {"element": "L[-2]|0>", "modes": [-1, 1], "max_source_degree": 1}},
         lambda r: r["unipotent"] and r["inverse_ok"] and r["huang"]["passed"]),
    ]
    for config, ok in cases:
        code, report = run(config)
        assert code == 0, report.get("error")
        assert ok(report["result"]), config["command"]


# -- determinism and caching ----------------------------------------------------------------

def test_reports_identical_across_thread_counts():
    _, one = run(ISING, threads=1)
    _, three = run(ISING, threads=3)
    assert render(deterministic_part(one)) == render(deterministic_part(three))


def test_cache_hit_miss_and_corruption(tmp_path):
    _, first = run(HEIS, cache_dir=tmp_path)
    assert not any(e["hit"] for e in first["runtime"]["cache"]["lookups"])
    files = sorted(tmp_path.glob("*.json"))
    assert len(files) == 3                          # the VOA and two Fock modules
    _, second = run(HEIS, cache_dir=tmp_path)
    assert all(e["hit"] for e in second["runtime"]["cache"]["lookups"])
    assert deterministic_part(first) == deterministic_part(second)
    _, other = run(with_(HEIS, caps={"D": 4, "M": 4, "K": 4, "N": 5}), cache_dir=tmp_path)
    assert not any(e["hit"] for e in other["runtime"]["cache"]["lookups"])
    for f in files:
        f.write_text("{not json")
    code, third = run(HEIS, cache_dir=tmp_path)
    assert code == 0 and len(third["runtime"]["cache"]["warnings"]) == 3
    assert deterministic_part(third) == deterministic_part(first)


# -- entry point and environment ---------------------------------------------------------------

def test_main_writes_report_and_respects_precedence(tmp_path, monkeypatch, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(HEIS))
    env_out = tmp_path / "env.json"
    flag_out = tmp_path / "flag.json"
    monkeypatch.setenv("VOACOINV_CONFIG", str(cfg))
    monkeypatch.setenv("VOACOINV_OUTPUT", str(env_out))
    monkeypatch.setenv("VOACOINV_CACHE_DIR", str(tmp_path / "cache"))
    monkeypatch.setenv("VOACOINV_THREADS", "2")
    assert main([]) == 0
    report = json.loads(env_out.read_text(encoding="utf-8"))
    assert report["runtime"]["threads"] == 2 and report["runtime"]["cache"]["dir"].endswith("cache")
    assert main(["--output", str(flag_out), "--threads", "1"]) == 0
    assert json.loads(flag_out.read_text())["runtime"]["threads"] == 1


def test_main_validation_without_config(monkeypatch, capsys):
    monkeypatch.delenv("VOACOINV_CONFIG", raising=False)
    assert main([]) == 2
    out = json.loads(capsys.readouterr().out)
    assert out["error"]["field"] == "--config"
    monkeypatch.setenv("VOACOINV_THREADS", "zero")
    assert main(["--config", "whatever.json"]) == 2


def test_console_script_is_deterministic_across_processes(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(ISING))
    outs = []
    for threads in ("1", "2"):
        out = tmp_path / f"r{threads}.json"
        proc = subprocess.run([sys.executable, "-m", "voacoinv.cli", "--config", str(cfg), "--output", str(out),
                               "--threads", threads, "--cache-dir", str(tmp_path / "c")],
                              capture_output=True, text=True, check=False)
        assert proc.returncode == 0, proc.stderr
        outs.append(render(deterministic_part(json.loads(out.read_text(encoding="utf-8")))))
    assert outs[0] == outs[1]
