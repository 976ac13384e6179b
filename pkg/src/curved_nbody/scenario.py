"""Scenario files: TOML documents describing one run, fixed-point table or phase portrait.

See ``docs/scenario.md`` for the schema. Validation errors carry the line of
the offending key (or of its table header when the key is missing).
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import tomli

from .errors import ScenarioError
from .families import FAMILY_NAMES, FamilySpec
from .integrate import IntegratorSettings
from .manifold import as_space
from .rotopulse import Kind, as_kind

KINDS = ("run", "fixed-points", "phase-portrait")
_TABLES = {"scenario", "integrator", "full", "ansatz", "family", "grid", "initial", "output"}


@dataclass(frozen=True)
class FullInit:
    space: object
    masses: tuple
    positions: tuple
    velocities: tuple


@dataclass(frozen=True)
class AnsatzInit:
    kind: Kind
    masses: tuple
    constants: tuple
    a: Optional[tuple]
    b: Optional[tuple]
    state: tuple


@dataclass(frozen=True)
class FamilyInit:
    spec: FamilySpec
    state: tuple


@dataclass(frozen=True)
class Scenario:
    name: str
    kind: str
    settings: IntegratorSettings
    mode: str = "full"
    full: Optional[FullInit] = None
    ansatz: Optional[AnsatzInit] = None
    family: Optional[FamilyInit] = None
    family_name: Optional[str] = None
    grid: dict = field(default_factory=dict)
    fixed: dict = field(default_factory=dict)
    initial: tuple = ()
    shape: float = 0.0
    output_dir: Optional[str] = None
    path: str = "<string>"


class _Doc:
    """Parsed TOML plus the source text, for locating keys."""

    def __init__(self, text: str, path: str):
        self.text = text
        self.path = path
        try:
            self.data = tomli.loads(text)
        except tomli.TOMLDecodeError as exc:
            m = re.search(r"line (\d+)", str(exc))
            raise ScenarioError(str(exc), int(m.group(1)) if m else None, path) from exc
        self.lines = text.splitlines()

    def line_of(self, table: Optional[str], key: Optional[str] = None) -> Optional[int]:
        current = None
        header_line = None
        for no, raw in enumerate(self.lines, 1):
            line = raw.strip()
            m = re.match(r"^\[\s*([A-Za-z0-9_.\-]+)\s*\]", line)
            if m:
                current = m.group(1)
                if current == table:
                    header_line = no
                continue
            if key is not None and current == table and re.match(rf"^{re.escape(key)}\s*=", line):
                return no
        return header_line

    def error(self, msg, table=None, key=None):
        return ScenarioError(msg, self.line_of(table, key), self.path)


def _table(doc, name, required=False):
    t = doc.data.get(name)
    if t is None:
        if required:
            raise ScenarioError(f"missing [{name}] table", None, doc.path)
        return None
    if not isinstance(t, dict):
        raise doc.error(f"'{name}' must be a table", None, name)
    return t


def _get(doc, table, tname, key, kind, required=True, default=None):
    if key not in table:
        if required:
            raise doc.error(f"[{tname}] is missing required key '{key}'", tname)
        return default
    val = table[key]
    try:
        return kind(val)
    except (TypeError, ValueError) as exc:
        raise doc.error(f"[{tname}].{key}: {exc}", tname, key) from exc


def _real(x):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise TypeError(f"expected a number, got {x!r}")
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("must be finite")
    return x


def _vec(x):
    if not isinstance(x, list):
        raise TypeError(f"expected an array, got {x!r}")
    return tuple(_real(v) for v in x)


def _mat(x):
    if not isinstance(x, list):
        raise TypeError(f"expected an array of arrays, got {x!r}")
    rows = tuple(_vec(r) for r in x)
    if any(len(r) != 4 for r in rows):
        raise ValueError("each row needs 4 ambient coordinates (w, x, y, z)")
    return rows


def _params(x):
    if not isinstance(x, dict):
        raise TypeError("expected an inline table of parameters")
    return {k: _real(v) for k, v in x.items()}


def _settings(doc, overrides):
    t = _table(doc, "integrator") or {}
    known = {"rel_tol", "abs_tol", "h_init", "h_min", "h_max", "project_every", "t_end", "samples", "max_steps"}
    for k in t:
        if k not in known:
            raise doc.error(f"[integrator] has unknown key '{k}'", "integrator", k)
    kw = {}
    for k in ("rel_tol", "abs_tol", "h_init", "h_min", "h_max", "t_end"):
        if k in t:
            kw[k] = _get(doc, t, "integrator", k, _real)
    for k in ("project_every", "samples", "max_steps"):
        if k in t:
            v = t[k]
            if isinstance(v, bool) or not isinstance(v, int):
                raise doc.error(f"[integrator].{k} must be an integer", "integrator", k)
            kw[k] = v
    kw.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        return IntegratorSettings(**kw)
    except ValueError as exc:
        raise doc.error(f"[integrator]: {exc}", "integrator") from exc


def _family_spec(doc, t, tname):
    name = _get(doc, t, tname, "name", str)
    if name not in FAMILY_NAMES:
        raise doc.error(f"unknown family '{name}' (known: {', '.join(FAMILY_NAMES)})", tname, "name")
    return name


def parse_scenario(text: str, path: str = "<string>", overrides: Optional[dict] = None) -> Scenario:
    doc = _Doc(text, path)
    for k in doc.data:
        if k not in _TABLES:
            raise doc.error(f"unknown table or key '{k}'", k if isinstance(doc.data[k], dict) else None, k)
    head = _table(doc, "scenario") or {}
    name = _get(doc, head, "scenario", "name", str, required=False, default=Path(path).stem)
    kind = _get(doc, head, "scenario", "kind", str, required=False, default="run")
    if kind not in KINDS:
        raise doc.error(f"[scenario].kind must be one of {', '.join(KINDS)}", "scenario", "kind")
    settings = _settings(doc, overrides)
    out = _table(doc, "output") or {}
    output_dir = _get(doc, out, "output", "dir", str, required=False)
    common = dict(name=name, kind=kind, settings=settings, output_dir=output_dir, path=path)
    if kind == "run":
        return _parse_run(doc, head, common)
    fam = _table(doc, "family", required=True)
    fname = _family_spec(doc, fam, "family")
    shape = _get(doc, fam, "family", "shape", _real, required=False, default=0.0)
    if kind == "fixed-points":
        grid_t = _table(doc, "grid") or {}
        grid = {}
        for k, v in grid_t.items():
            try:
                grid[k] = _vec(v) if isinstance(v, list) else (_real(v),)
            except (TypeError, ValueError) as exc:
                raise doc.error(f"[grid].{k}: {exc}", "grid", k) from exc
        fixed = _get(doc, fam, "family", "params", _params, required=False, default={})
        return Scenario(**common, family_name=fname, grid=grid, fixed=fixed, shape=shape)
    params = _get(doc, fam, "family", "params", _params)
    try:
        spec = FamilySpec(fname, params, shape=shape)
    except ValueError as exc:
        raise doc.error(str(exc), "family", "params") from exc
    init = _table(doc, "initial") or {}
    states = []
    if "states" in init:
        try:
            states = [_vec(s) for s in init["states"]]
        except (TypeError, ValueError) as exc:
            raise doc.error(f"[initial].states: {exc}", "initial", "states") from exc
    if any(len(s) != 2 for s in states):
        raise doc.error("[initial].states entries must be [x, v] pairs", "initial", "states")
    for axis in ("x", "v"):
        if axis in init and not isinstance(init[axis], dict):
            raise doc.error(f"[initial].{axis} must be {{start, stop, num}}", "initial", axis)
    if "x" in init:
        xs = _linspace(doc, init["x"], "x")
        vs = _linspace(doc, init["v"], "v") if "v" in init else (0.0,)
        states += [(x, v) for x in xs for v in vs]
    return Scenario(**common, family=FamilyInit(spec, ()), family_name=fname, initial=tuple(states), shape=shape)


def _linspace(doc, t, axis):
    try:
        start, stop = _real(t["start"]), _real(t["stop"])
        num = t["num"]
        if isinstance(num, bool) or not isinstance(num, int) or num < 0:
            raise ValueError("num must be a non-negative integer")
    except (KeyError, TypeError, ValueError) as exc:
        raise doc.error(f"[initial].{axis}: {exc}", "initial", axis) from exc
    return tuple(float(x) for x in np.linspace(start, stop, num))


def _parse_run(doc, head, common):
    present = [t for t in ("full", "ansatz", "family") if t in doc.data]
    if len(present) != 1:
        raise ScenarioError(
            f"a run needs exactly one of [full], [ansatz], [family]; found {len(present) or 'none'}",
            doc.line_of(present[1]) if len(present) > 1 else None, doc.path)
    which = present[0]
    t = _table(doc, which)
    mode = _get(doc, t, which, "mode", str, required=False, default="full" if which == "full" else "reduced")
    if mode not in ("full", "reduced"):
        raise doc.error("mode must be 'full' or 'reduced'", which, "mode")
    if which == "full":
        try:
            space = as_space(_get(doc, head, "scenario", "space", str))
        except ValueError as exc:
            raise doc.error(str(exc), "scenario", "space") from exc
        masses = _get(doc, t, "full", "masses", _vec)
        pos = _get(doc, t, "full", "positions", _mat)
        vel = _get(doc, t, "full", "velocities", _mat)
        if not (len(masses) == len(pos) == len(vel)):
            raise doc.error("masses, positions and velocities must list the same bodies", "full", "masses")
        if any(m <= 0 for m in masses):
            raise doc.error("masses must be positive", "full", "masses")
        return Scenario(**common, full=FullInit(space, masses, pos, vel))
    if which == "ansatz":
        try:
            kind = as_kind(_get(doc, t, "ansatz", "class", str))
        except ValueError as exc:
            raise doc.error(str(exc), "ansatz", "class") from exc
        init = AnsatzInit(
            kind,
            _get(doc, t, "ansatz", "masses", _vec),
            _get(doc, t, "ansatz", "constants", _vec),
            _get(doc, t, "ansatz", "a", _vec, required=False),
            _get(doc, t, "ansatz", "b", _vec, required=False),
            _get(doc, t, "ansatz", "state", _vec),
        )
        return Scenario(**common, mode=mode, ansatz=init)
    fname = _family_spec(doc, t, "family")
    params = _get(doc, t, "family", "params", _params)
    shape = _get(doc, t, "family", "shape", _real, required=False, default=0.0)
    try:
        spec = FamilySpec(fname, params, shape=shape)
    except ValueError as exc:
        raise doc.error(str(exc), "family", "params") from exc
    state = _get(doc, t, "family", "state", _vec)
    return Scenario(**common, mode=mode, family=FamilyInit(spec, state), family_name=fname, shape=shape)


def load_scenario(path, overrides: Optional[dict] = None) -> Scenario:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc.strerror}", None, str(p)) from exc
    return parse_scenario(text, str(p), overrides)
