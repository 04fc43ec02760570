"""Mode-table cache files: round trips, staleness and corruption."""

import json
from fractions import Fraction

from voacoinv.voa.axioms import run_axiom_suite
from voacoinv.voa.instance import build_fock, build_heisenberg, build_virasoro
from voacoinv.voa.serialize import (FORMAT_VERSION, cache_key, cache_lookup, cache_store,
                                    table_payload)


def full_table(X):
    return {(a, i, v): dict(col) for a, i, v, col in X.mode_table_entries()}


def test_round_trip_reproduces_every_column(tmp_path):
    V = build_virasoro(Fraction(1, 2), 5)
    cache_store(V, tmp_path)
    fresh = build_virasoro(Fraction(1, 2), 5)
    assert cache_lookup(fresh, tmp_path) == (True, None)
    assert len(fresh._columns) == len(full_table(V))     # prefilled, nothing recomputed yet
    assert full_table(fresh) == full_table(V)
    assert all(v.passed for v in run_axiom_suite(fresh).values())


def test_module_round_trip(tmp_path):
    M = build_fock(Fraction(2, 3), 4)
    cache_store(M, tmp_path)
    fresh = build_fock(Fraction(2, 3), 4)
    assert cache_lookup(fresh, tmp_path)[0]
    assert full_table(fresh) == full_table(M)


def test_key_depends_on_parameters_and_truncation():
    keys = {cache_key(build_virasoro(c, N)) for c in ("1/2", "1") for N in (3, 4)}
    assert len(keys) == 4
    assert cache_key(build_fock(1, 3)) != cache_key(build_fock(2, 3))


def test_truncation_mismatch_is_a_plain_miss(tmp_path):
    cache_store(build_heisenberg(4), tmp_path)
    assert cache_lookup(build_heisenberg(5), tmp_path) == (False, None)


def test_format_version_mismatch_is_a_miss(tmp_path):
    V = build_heisenberg(3)
    path = cache_store(V, tmp_path)
    data = json.loads(path.read_text())
    data["header"]["format_version"] = FORMAT_VERSION + 1
    path.write_text(json.dumps(data))
    assert cache_lookup(build_heisenberg(3), tmp_path) == (False, None)


def test_corrupt_file_is_a_miss_with_warning(tmp_path):
    path = cache_store(build_heisenberg(3), tmp_path)
    path.write_text(path.read_text()[:40])
    hit, warning = cache_lookup(build_heisenberg(3), tmp_path)
    assert not hit and "corrupt" in warning


def test_bad_entry_is_a_miss_with_warning(tmp_path):
    V = build_heisenberg(3)
    path = cache_store(V, tmp_path)
    data = json.loads(path.read_text())
    data["entries"].append([0, 99, 0, 0, 1, 1])            # outside the window
    path.write_text(json.dumps(data))
    hit, warning = cache_lookup(build_heisenberg(3), tmp_path)
    assert not hit and warning


def test_payload_lists_exact_fractions():
    payload = table_payload(build_virasoro(Fraction(1, 2), 4))
    assert payload["header"]["format_version"] == FORMAT_VERSION
    assert any(den != 1 for *_, den in payload["entries"])
