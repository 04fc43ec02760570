"""JSON cache files for truncated mode tables.

A cache file holds a header (kind, tag, parameters, N, format version and,
for modules, the parent header) and the full mode table inside the
validity window as ``[a, i, row, col, num, den]`` entries, meaning
``(A_a)_(i) e_col`` has coefficient ``num/den`` on ``e_row``. Loading
prefills the lazy column cache of a freshly built (cheap) instance, so no
mode is recomputed.
"""

import hashlib
import json
import os
from fractions import Fraction
from pathlib import Path

FORMAT_VERSION = 1


class CacheMiss(Exception):
    """The cache file is absent, stale or unreadable; ``reason`` says which."""

    def __init__(self, reason, warning=False):
        super().__init__(reason)
        self.reason = reason
        self.warning = warning


def cache_header(X):
    head = dict(X.header())
    head["format_version"] = FORMAT_VERSION
    return head


def cache_key(X):
    """Stable file stem derived from the header."""
    blob = json.dumps(cache_header(X), sort_keys=True, separators=(",", ":"))
    return f"{X.kind}-{X.tag}-N{X.N}-" + hashlib.sha256(blob.encode()).hexdigest()[:16]


def table_payload(X):
    entries = []
    for a, i, v, col in X.mode_table_entries():
        for u, c in sorted(col.items()):
            c = Fraction(c)
            entries.append([a, i, u, v, c.numerator, c.denominator])
    return {"header": cache_header(X), "dim": X.dim, "degrees": list(X.space.degrees),
            "entries": entries}


def save_instance(X, path):
    """Write the full mode table of ``X`` atomically."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + f".tmp{os.getpid()}")
    with open(tmp, "w") as fh:
        json.dump(table_payload(X), fh, separators=(",", ":"))
    os.replace(tmp, path)
    return path


def load_into(X, path):
    """Prefill ``X`` from a cache file; raise CacheMiss when it does not match."""
    path = Path(path)
    if not path.exists():
        raise CacheMiss("no cache file")
    try:
        with open(path) as fh:
            data = json.load(fh)
        header = data["header"]
        entries = data["entries"]
        degrees = data["degrees"]
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise CacheMiss(f"corrupt cache file {path.name}: {exc}", warning=True) from None
    if header != cache_header(X):
        raise CacheMiss("header mismatch")
    if degrees != list(X.space.degrees):
        raise CacheMiss(f"corrupt cache file {path.name}: basis mismatch", warning=True)
    columns = {}
    for a, i, v, _ in _window(X):
        columns[(a, i, v)] = {}
    try:
        for a, i, u, v, num, den in entries:
            columns[(a, i, v)][u] = Fraction(num, den)
    except (KeyError, ValueError, TypeError, ZeroDivisionError) as exc:
        raise CacheMiss(f"corrupt cache file {path.name}: bad entry ({exc})", warning=True) from None
    X.prefill(columns)
    return X


def _window(X):
    P = X.parent
    for a in range(P.dim):
        da = P.degree(a)
        for v in range(X.dim):
            dv = X.degree(v)
            for i in range(da + dv - 1 - X.N, da + dv):
                yield a, i, v, None


def cache_lookup(X, cache_dir):
    """Prefill ``X`` from ``cache_dir`` if a matching file exists.

    Returns ``(hit, warning)``: a corrupt file is treated as a miss and
    reported through ``warning``.
    """
    path = Path(cache_dir) / (cache_key(X) + ".json")
    try:
        load_into(X, path)
        return True, None
    except CacheMiss as miss:
        return False, (miss.reason if miss.warning else None)


def cache_store(X, cache_dir):
    return save_instance(X, Path(cache_dir) / (cache_key(X) + ".json"))
