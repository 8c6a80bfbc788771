"""
Plain-text spec files (a YAML subset) and their canonical serialization.

Layout::

    name: aff1_point
    description: "..."
    n: 0
    k: 2
    rho_L: []                  # k rows of n expressions, rho^i(e_a)
    rho_Lstar: []              # k rows of n expressions, rho^i(f_a)
    c_low:                     # c_{ab}^c, 1-based "a,b,c" keys
      "1,2,2": "1"
      "2,1,2": "-1"
    c_up: {}                   # c^{ab}_c
    phi: {}                    # phi^{abc}
    psi: {}                    # psi_{abc}
    connection: {}             # "i,a,b": Gamma^b_{ia}
    defaults:
      truncate: 2
      seed: 0

Three-index tables are sparse and must list every nonzero entry
explicitly, including the antisymmetric partners.  Expressions use the
element grammar in q1..qn.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import yaml

from .courant import AlgebroidSpec, SpecError
from .rothstein import ConnectionData
from .superalg import Element, GeneratorSet, ParseError, format_element, parse

__all__ = ["SpecFile", "SpecFileError", "load_spec", "loads_spec", "dumps_spec",
           "bundled_names", "bundled_path", "resolve_spec_path"]

KEYS = ("name", "description", "n", "k", "rho_L", "rho_Lstar", "c_low", "c_up",
        "phi", "psi", "connection", "defaults")


class SpecFileError(ValueError):
    pass


@dataclass
class SpecFile:
    spec: AlgebroidSpec
    defaults: dict = field(default_factory=dict)

    @property
    def name(self):
        return self.spec.name

    def canonical(self) -> str:
        return dumps_spec(self)

    def digest(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:16]


def _expr(text, gens, where):
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise SpecFileError(f"{where}: expected an expression string, got {text!r}")
    try:
        x = parse(str(text), gens)
    except ParseError as exc:
        raise SpecFileError(f"{where}: {exc}") from None
    n = gens.n
    if any(m or any(e[n:]) for (e, m) in x.terms):
        raise SpecFileError(f"{where}: structure functions must be polynomials in q")
    return x


def _index_key(key, count, bounds, where):
    try:
        parts = [int(p) for p in str(key).split(",")]
    except ValueError:
        raise SpecFileError(f"{where}: bad index key {key!r}") from None
    if len(parts) != count or any(not 1 <= p <= b for p, b in zip(parts, bounds)):
        raise SpecFileError(f"{where}: index key {key!r} out of range")
    return tuple(p - 1 for p in parts)


def loads_spec(text: str) -> SpecFile:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        loc = f" (line {mark.line + 1}, column {mark.column + 1})" if mark else ""
        raise SpecFileError(f"YAML syntax error{loc}: {getattr(exc, 'problem', exc)}") from None
    if not isinstance(data, dict):
        raise SpecFileError("spec file must be a mapping")
    unknown = set(data) - set(KEYS)
    if unknown:
        raise SpecFileError(f"unknown keys: {', '.join(sorted(unknown))}")
    for req in ("n", "k"):
        if not isinstance(data.get(req), int):
            raise SpecFileError(f"missing or non-integer {req!r}")
    n, k = data["n"], data["k"]
    try:
        gens = GeneratorSet(n, k, "r")
    except ValueError as exc:
        raise SpecFileError(str(exc)) from None

    def matrix(key):
        rows = data.get(key) or []
        if n == 0 and rows == []:
            return [[] for _ in range(k)]
        if not isinstance(rows, list) or len(rows) != k:
            raise SpecFileError(f"{key}: expected {k} rows")
        out = []
        for a, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != n:
                raise SpecFileError(f"{key}: row {a + 1} must have {n} entries")
            out.append([_expr(v, gens, f"{key}[{a + 1}][{i + 1}]") for i, v in enumerate(row)])
        return out

    def cube(key, bounds):
        table = data.get(key) or {}
        if not isinstance(table, dict):
            raise SpecFileError(f"{key}: expected a mapping of index keys")
        out = {}
        for kk, v in table.items():
            idx = _index_key(kk, 3, bounds, key)
            if idx in out:
                raise SpecFileError(f"{key}: duplicate entry {kk!r}")
            out[idx] = _expr(v, gens, f"{key}[{kk}]")
        return out

    conn = None
    if data.get("connection"):
        entries = cube("connection", (n, k, k))
        z = Element.zero(gens)
        table = [[[entries.get((i, a, b), z) for b in range(k)] for a in range(k)] for i in range(n)]
        conn = ConnectionData.from_table(gens, table)
    defaults = data.get("defaults") or {}
    if not isinstance(defaults, dict) or set(defaults) - {"truncate", "seed"}:
        raise SpecFileError("defaults: only 'truncate' and 'seed' are allowed")
    try:
        spec = AlgebroidSpec.build(
            n, k,
            rho_L=matrix("rho_L") if n else None,
            rho_Lstar=matrix("rho_Lstar") if n else None,
            c_low=cube("c_low", (k, k, k)),
            c_up=cube("c_up", (k, k, k)),
            phi=cube("phi", (k, k, k)),
            psi=cube("psi", (k, k, k)),
            connection=conn,
            name=str(data.get("name", "")),
            description=str(data.get("description", "")),
        )
    except SpecError as exc:
        raise SpecFileError(f"invariant violation: {exc}") from None
    return SpecFile(spec, dict(defaults))


def load_spec(path) -> SpecFile:
    path = resolve_spec_path(path)
    return loads_spec(Path(path).read_text())


def _q(s: str) -> str:
    return json.dumps(s)


def dumps_spec(sf: SpecFile) -> str:
    spec = sf.spec
    n, k = spec.n, spec.k
    lines = [f"name: {_q(spec.name)}", f"description: {_q(spec.description)}",
             f"n: {n}", f"k: {k}"]
    for key in ("rho_L", "rho_Lstar"):
        table = getattr(spec, key)
        if n == 0:
            lines.append(f"{key}: []")
            continue
        lines.append(f"{key}:")
        for row in table:
            lines.append("  - [" + ", ".join(_q(format_element(v)) for v in row) + "]")

    def cube_lines(key, entries):
        if not entries:
            lines.append(f"{key}: {{}}")
            return
        lines.append(f"{key}:")
        for idx, v in entries:
            lines.append(f"  {_q(','.join(str(i + 1) for i in idx))}: {_q(format_element(v))}")

    for key in ("c_low", "c_up", "phi", "psi"):
        t = getattr(spec, key)
        cube_lines(key, [(idx, t[idx[0]][idx[1]][idx[2]])
                         for idx in itertools.product(range(k), repeat=3)
                         if t[idx[0]][idx[1]][idx[2]]])
    if spec.connection is not None and not spec.connection.is_flat():
        g = spec.connection.gamma
        gens = spec.gens
        cube_lines("connection", [((i, a, b), g[i][a][b].with_gens(gens))
                                  for i in range(n) for a in range(k) for b in range(k)
                                  if g[i][a][b]])
    else:
        lines.append("connection: {}")
    if sf.defaults:
        lines.append("defaults:")
        for key in ("truncate", "seed"):
            if key in sf.defaults:
                lines.append(f"  {key}: {int(sf.defaults[key])}")
    return "\n".join(lines) + "\n"


def bundled_names():
    root = resources.files("diracdeform") / "specs"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".yaml"))


def bundled_path(name) -> Path:
    return Path(str(resources.files("diracdeform") / "specs" / f"{name}.yaml"))


def resolve_spec_path(path) -> Path:
    """A filesystem path, or the name of a bundled spec."""
    p = Path(path)
    if p.exists():
        return p
    if str(path) in bundled_names():
        return bundled_path(str(path))
    raise SpecFileError(f"no such spec file or bundled spec: {path}")
