"""Run configuration for the command-line front end."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from etahat.curves import _parse_complex, make_curve
from etahat.errors import BadConfiguration

DEFAULT_GRID = (1.1j, 2j, 0.4 + 1.3j, -0.3 + 0.9j, 0.1 + 2.5j)


@dataclass(frozen=True)
class Tolerances:
    quad_rtol: float = 1e-11
    jet_tol: float = 1e-7
    legendre: float = 1e-10
    riemann: float = 1e-8
    contract: float = 1e-8
    symmetry: float = 1e-10
    obstruction: float = 1e-6
    uniqueness: float = 1e-8
    cup: float = 1e-6
    cocycle: float = 1e-6
    richardson: float = 1e-6
    kappa: float = 1e-4

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not isinstance(v, (int, float)) or not v > 0:
                raise BadConfiguration(f"tolerance {f.name} must be positive, got {v!r}")

    def override(self, items) -> "Tolerances":
        """Apply ``key=value`` strings."""
        known = {f.name for f in fields(self)}
        upd = {}
        for item in items or ():
            key, sep, val = item.partition("=")
            key = key.strip()
            if not sep or key not in known:
                raise BadConfiguration(f"bad tolerance override {item!r}; keys: {sorted(known)}")
            try:
                upd[key] = float(val)
            except ValueError as exc:
                raise BadConfiguration(f"tolerance {key} is not a number: {val!r}") from exc
        return replace(self, **upd)


@dataclass(frozen=True)
class TraceConfig:
    curve: dict
    root: int = 2
    x: complex = 3.0
    eps: tuple = (0j, 1e-3, 1e-3j)
    h: float = 1e-3
    complex_path: bool = True


@dataclass(frozen=True)
class RunConfig:
    curves: tuple = ()
    points: tuple = ()
    tolerances: Tolerances = field(default_factory=Tolerances)
    grid: tuple = DEFAULT_GRID
    h: float = 2e-4
    perturb: tuple | None = None
    trace: TraceConfig | None = None
    threads: int = 1

    def built_curves(self):
        return [make_curve(s) for s in self.curves]


def _complex_list(v, name):
    if not isinstance(v, list):
        raise BadConfiguration(f"'{name}' must be a list")
    return tuple(_parse_complex(x) for x in v)


def parse_config(data) -> RunConfig:
    if not isinstance(data, dict):
        raise BadConfiguration("config must be a JSON object")
    kw = {}
    if "curves" in data:
        if not isinstance(data["curves"], list):
            raise BadConfiguration("'curves' must be a list of curve specs")
        kw["curves"] = tuple(data["curves"])
    if "points" in data:
        kw["points"] = _complex_list(data["points"], "points")
    if "tolerances" in data:
        tol = data["tolerances"]
        if not isinstance(tol, dict):
            raise BadConfiguration("'tolerances' must be an object")
        try:
            kw["tolerances"] = Tolerances(**tol)
        except TypeError as exc:
            raise BadConfiguration(str(exc)) from exc
    if "grid" in data:
        grid = _complex_list(data["grid"], "grid")
        if not grid:
            raise BadConfiguration("empty tau grid")
        if any(t.imag <= 0 for t in grid):
            raise BadConfiguration("grid points must lie in the upper half-plane")
        kw["grid"] = grid
    if "h" in data:
        kw["h"] = float(data["h"])
        if not kw["h"] > 0:
            raise BadConfiguration("step h must be positive")
    if "perturb" in data:
        kw["perturb"] = tuple(_complex_list(row, "perturb row") for row in data["perturb"])
    if "trace" in data:
        t = dict(data["trace"])
        if "curve" not in t:
            raise BadConfiguration("'trace' needs a 'curve'")
        if "x" in t:
            t["x"] = _parse_complex(t["x"])
        if "eps" in t:
            t["eps"] = _complex_list(t["eps"], "eps")
        try:
            kw["trace"] = TraceConfig(**t)
        except TypeError as exc:
            raise BadConfiguration(str(exc)) from exc
    unknown = set(data) - {"curves", "points", "tolerances", "grid", "h", "perturb", "trace"}
    if unknown:
        raise BadConfiguration(f"unknown config keys: {sorted(unknown)}")
    return RunConfig(**kw)


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise BadConfiguration(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BadConfiguration(f"malformed JSON in {path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return parse_config(data)
