"""Text class cache and report serialisation.

Cache layout (one file per sign):

    # shintani-classes v1
    # sign=-1 max_disc=1000 scheme=hessian-root-v1 sha256=<hex>
    sign,disc,a,b,c,d,stab,irreducible,square_quad,shape_x,shape_y
    -1,-23,1,0,-1,-1,1,1,0,...

The hash covers every byte after the second line. Floats are written with
17 significant digits, so a rewrite from the same table is byte-identical.
"""

from __future__ import annotations

import hashlib
import io
import json
import os
from pathlib import Path

import numpy as np

from .enumeration import SCHEME_ID, ClassTable, enumerate_table
from .shapes import shape_points

FORMAT_TAG = "# shintani-classes v1"
COLUMNS = "sign,disc,a,b,c,d,stab,irreducible,square_quad,shape_x,shape_y"
ENV_CACHE_DIR = "SHINTANI_CACHE_DIR"


class CacheError(RuntimeError):
    pass


def sha256(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def fmt_float(v: float) -> str:
    return format(float(v), ".17g")


def default_cache_dir() -> Path:
    env = os.environ.get(ENV_CACHE_DIR)
    return Path(env) if env else Path.home() / ".cache" / "shintani"


def cache_path(sign: int, cache_dir=None) -> Path:
    d = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    return d / f"classes-{'pos' if sign > 0 else 'neg'}.csv"


def _body(table: ClassTable) -> str:
    shapes = shape_points(table.reps.astype(float)) if len(table) else np.empty(0, complex)
    out = io.StringIO()
    out.write(COLUMNS + "\n")
    sign = str(table.sign)
    for i in range(len(table)):
        a, b, c, d = table.reps[i]
        out.write(f"{sign},{table.disc[i]},{a},{b},{c},{d},{table.stab[i]},"
                  f"{int(table.irreducible[i])},{int(table.square[i])},"
                  f"{fmt_float(shapes[i].real)},{fmt_float(shapes[i].imag)}\n")
    return out.getvalue()


def dumps_table(table: ClassTable) -> str:
    body = _body(table)
    meta = f"# sign={table.sign} max_disc={table.max_disc} scheme={SCHEME_ID} sha256={sha256(body)}"
    return f"{FORMAT_TAG}\n{meta}\n{body}"


def write_table(table: ClassTable, path) -> str:
    """Write the cache file atomically; returns the body hash."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = dumps_table(table)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)
    return text.split("sha256=", 1)[1].split("\n", 1)[0]


def parse_header(line1: str, line2: str) -> dict:
    if line1.rstrip("\n") != FORMAT_TAG:
        raise CacheError(f"unknown cache format {line1.strip()!r}")
    if not line2.startswith("# "):
        raise CacheError("missing cache metadata line")
    meta = dict(kv.split("=", 1) for kv in line2[2:].split())
    for key in ("sign", "max_disc", "scheme", "sha256"):
        if key not in meta:
            raise CacheError(f"cache metadata lacks {key}")
    return {"sign": int(meta["sign"]), "max_disc": int(meta["max_disc"]),
            "scheme": meta["scheme"], "sha256": meta["sha256"]}


def loads_table(text: str):
    """(ClassTable, shapes, header) from cache text; hash or scheme mismatch raises CacheError."""
    l1, l2, body = text.split("\n", 2)
    head = parse_header(l1, l2)
    if sha256(body) != head["sha256"]:
        raise CacheError("cache content hash mismatch")
    if head["scheme"] != SCHEME_ID:
        raise CacheError(f"cache built with reduction scheme {head['scheme']}, expected {SCHEME_ID}")
    lines = body.split("\n", 1)
    if lines[0] != COLUMNS:
        raise CacheError("unexpected cache columns")
    rows = lines[1] if len(lines) > 1 else ""
    if rows.strip():
        data = np.loadtxt(io.StringIO(rows), delimiter=",", dtype=np.float64, ndmin=2)
    else:
        data = np.zeros((0, 11))
    ints = data[:, :9].astype(np.int64)
    table = ClassTable(head["sign"], head["max_disc"], ints[:, 2:6].copy(), ints[:, 1].copy(),
                       ints[:, 6].copy(), ints[:, 7].astype(bool), ints[:, 8].astype(bool))
    if len(table) and (np.abs(table.disc).max() > table.max_disc or np.any(np.sign(table.disc) != table.sign)):
        raise CacheError("cache records violate the header")
    return table, data[:, 9] + 1j * data[:, 10], head


def read_table(path):
    with open(path, newline="\n") as fh:
        return loads_table(fh.read())


def load_or_build(sign: int, X: int, cache_dir=None, build: bool = True):
    """Class table covering |disc| <= X from the cache, extending it if needed.

    Returns (table restricted to |disc| <= X, path, built) where built says
    whether the file was (re)written.
    """
    sign = 1 if sign > 0 else -1
    path = cache_path(sign, cache_dir)
    if path.exists():
        table, _, head = read_table(path)
        if head["sign"] != sign:
            raise CacheError(f"{path} holds sign {head['sign']}")
        if head["max_disc"] >= X:
            keep = np.abs(table.disc) <= X
            return ClassTable(sign, X, *(arr[keep] for arr in (table.reps, table.disc, table.stab,
                                                               table.irreducible, table.square))), path, False
    if not build:
        raise CacheError(f"no class cache covering max_disc {X} at {path}")
    table = enumerate_table(sign, X)
    write_table(table, path)
    return table, path, True


# --- reports -------------------------------------------------------------------

def jsonable(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.complexfloating):
        return [float(v.real), float(v.imag)]
    if isinstance(v, np.ndarray):
        return [jsonable(x) for x in v.tolist()]
    if isinstance(v, dict):
        return {str(k): jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [jsonable(x) for x in v]
    return v


def report(command: str, config: dict, results) -> dict:
    results = jsonable(results)
    digest = sha256(json.dumps(results, sort_keys=True, separators=(",", ":")))
    return {"command": command, "config": jsonable(config), "results": results, "content_hash": digest}


def dumps_report(rep: dict) -> str:
    return json.dumps(rep, indent=2, sort_keys=True) + "\n"


def dumps_weyl(X, S, config: dict) -> str:
    body = "X,ReS,ImS\n" + "".join(f"{int(x)},{fmt_float(s.real)},{fmt_float(s.imag)}\n" for x, s in zip(X, S))
    cfg = json.dumps(jsonable(config), sort_keys=True, separators=(",", ":"))
    return f"# shintani-weyl v1 {cfg}\n# sha256={sha256(body)}\n{body}"


def loads_weyl(text: str):
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    if not lines or lines[0] != "X,ReS,ImS":
        raise CacheError("not a Weyl-sum CSV")
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]]).reshape(-1, 3)
    return data[:, 0], data[:, 1] + 1j * data[:, 2]
